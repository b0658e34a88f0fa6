use clap::Args;
use etc_consensus::oracle::{j_et_b, j_tt_b, j_tt_bl};
use etc_consensus::{
    calibrate_delta_b, calibrate_delta_bl, run_batch, run_trial, run_trials, t_quantile_975, unit_cube_exit_time,
    Error, InfoScenario, Report, Scenario, Scheme,
};
use serde::Serialize;

use crate::args::{
    check_n_list, CalibrationArgs, NumericsArgs, OnOff, OutArgs, ResolvedScenario, ScenarioArg, SchemeArgs,
    TriggerArg,
};
use crate::output::{cell, Sink};
use crate::UsageError;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct TrialRow {
    trial: String,
    j: f64,
    ci: Option<f64>,
    j_renewal: f64,
    global_events: u64,
    local_events: u64,
    mean_global_t: f64,
    mean_local_t: f64,
}

#[derive(Serialize)]
struct BatchSummary {
    j_time_avg: f64,
    ci_halfwidth: f64,
    j_renewal: f64,
    mean_global_interevent: f64,
    mean_local_interevent: f64,
}

impl From<&Report> for BatchSummary {
    fn from(r: &Report) -> Self {
        Self {
            j_time_avg: r.j_time_avg,
            ci_halfwidth: r.ci_halfwidth,
            j_renewal: r.j_renewal,
            mean_global_interevent: r.mean_global_interevent,
            mean_local_interevent: r.mean_local_interevent,
        }
    }
}

pub fn simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let (config, resolved) = args.scheme.resolve(args.n)?;
    let trials = run_trials(&config)?;
    let accs: Vec<_> = trials.into_iter().map(|t| t.accumulator).collect();
    let report = Report::from_trials(&accs)?;
    let mut rows: Vec<TrialRow> = accs
        .iter()
        .enumerate()
        .map(|(k, a)| {
            let global = a.global_event_count();
            let local: u64 = a.local_event_counts().iter().sum();
            TrialRow {
                trial: k.to_string(),
                j: a.time_average().expect("nonempty trial"),
                ci: None,
                j_renewal: a.renewal_estimate().unwrap_or(f64::NAN),
                global_events: global,
                local_events: local,
                mean_global_t: a.elapsed() / global as f64,
                mean_local_t: a.elapsed() * a.n() as f64 / local as f64,
            }
        })
        .collect();
    rows.push(TrialRow {
        trial: "mean".into(),
        j: report.j_time_avg,
        ci: Some(report.ci_halfwidth),
        j_renewal: report.j_renewal,
        global_events: rows.iter().map(|r| r.global_events).sum(),
        local_events: rows.iter().map(|r| r.local_events).sum(),
        mean_global_t: report.mean_global_interevent,
        mean_local_t: report.mean_local_interevent,
    });
    log::info!(
        "J = {:.5} ± {:.5}, global inter-event {:.4} s",
        report.j_time_avg,
        report.ci_halfwidth,
        report.mean_global_interevent
    );
    let sink = Sink::new("simulate", args.out.out.clone());
    sink.rows(&rows)?;
    sink.manifest(&resolved, &BatchSummary::from(&report))
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// `b` uses the closed form, `bl` the simulated exit time of the cube.
    #[arg(long, value_enum, default_value_t = ScenarioArg::Bl)]
    pub scenario: ScenarioArg,
    /// Target global mean inter-event time in seconds.
    #[arg(long, default_value_t = 0.5)]
    pub target_t: f64,
    /// Step of the exit-time sampler.
    #[arg(long, default_value_t = 1e-3)]
    pub dt: f64,
    /// Relative tolerance on the verified mean.
    #[arg(long, default_value_t = 0.03)]
    pub tolerance: f64,
    #[arg(long, default_value_t = etc_consensus::sim::DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub calibration: CalibrationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct CalibrationRow {
    n: usize,
    scenario: ScenarioArg,
    target_global_t: f64,
    delta: f64,
    achieved_t: f64,
    ci: f64,
    unit_cube_exit_time: Option<f64>,
    samples: usize,
    method: &'static str,
}

#[derive(Serialize)]
struct CalibrationConfig {
    n: usize,
    scenario: ScenarioArg,
    target_t: f64,
    dt: f64,
    tolerance: f64,
    samples: usize,
    bridge_correction: OnOff,
    seed: u64,
}

pub fn calibrate(args: &CalibrateArgs) -> anyhow::Result<()> {
    let mut opts = args.calibration.options(args.seed);
    opts.dt = args.dt;
    opts.tolerance = args.tolerance;
    let scenario: InfoScenario = args.scenario.into();
    let (result, m_n) = match scenario {
        InfoScenario::BroadcastOnly => {
            // per-agent target is n times the global one
            let r = calibrate_delta_b(args.n as f64 * args.target_t, &opts)?;
            (r, None)
        }
        InfoScenario::BroadcastPlusLocal => {
            let r = calibrate_delta_bl(args.n, args.target_t, &opts)?;
            (r, Some(unit_cube_exit_time(args.n, &opts)?.mean))
        }
    };
    log::info!(
        "n = {}: delta = {:.4} ({}), verified {:.4} ± {:.4} s",
        args.n,
        result.delta_star,
        result.method.name(),
        result.achieved_t,
        result.ci_halfwidth
    );
    let row = CalibrationRow {
        n: args.n,
        scenario: args.scenario,
        target_global_t: args.target_t,
        delta: result.delta_star,
        achieved_t: result.achieved_t,
        ci: result.ci_halfwidth,
        unit_cube_exit_time: m_n,
        samples: result.samples_used,
        method: result.method.name(),
    };
    let config = CalibrationConfig {
        n: args.n,
        scenario: args.scenario,
        target_t: args.target_t,
        dt: args.dt,
        tolerance: args.tolerance,
        samples: opts.samples,
        bridge_correction: args.calibration.bridge_correction,
        seed: args.seed,
    };
    let sink = Sink::new("calibrate", args.out.out.clone());
    sink.rows(std::slice::from_ref(&row))?;
    sink.manifest(&config, &row)
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[command(flatten)]
    pub numerics: NumericsArgs,
    #[command(flatten)]
    pub calibration: CalibrationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

/// `(n, global period)` of the four table rows.
pub const TABLE1_ROWS: [(usize, f64); 4] = [(3, 0.25), (3, 0.5), (10, 0.5), (50, 0.5)];

#[derive(Serialize)]
struct Table1Row {
    n: usize,
    #[serde(rename = "target_global_T")]
    target_global_t: f64,
    scheme: &'static str,
    scenario: &'static str,
    delta: Option<f64>,
    period: Option<f64>,
    j_sim: Option<f64>,
    j_analytic: Option<f64>,
    #[serde(rename = "mean_global_T")]
    mean_global_t: Option<f64>,
    ci: Option<f64>,
    status: String,
}

#[derive(Serialize)]
struct Table1Summary {
    cells: usize,
    failed_cells: usize,
}

struct Cell {
    name: &'static str,
    scenario: InfoScenario,
    scheme: Result<Scheme, String>,
    analytic: Option<f64>,
}

fn scenario_for(n: usize, scenario: InfoScenario, scheme: Scheme, numerics: &NumericsArgs) -> Scenario {
    let mut c = Scenario::new(n, scenario, scheme);
    c.dt = numerics.dt;
    c.horizon = numerics.horizon;
    c.trials = numerics.trials;
    c.seed = numerics.seed;
    c
}

pub fn table1(args: &Table1Args) -> anyhow::Result<usize> {
    let opts = args.calibration.options(args.numerics.seed);
    let mut rows = Vec::new();
    for (n, t) in TABLE1_ROWS {
        let nf = n as f64;
        let delta_b = (nf * t).sqrt();
        let delta_bl = calibrate_delta_bl(n, t, &opts);
        let cells = [
            Cell {
                name: "TT",
                scenario: InfoScenario::BroadcastOnly,
                scheme: Ok(Scheme::periodic_async_even(nf * t, n)),
                analytic: Some(j_tt_b(n, nf * t)),
            },
            Cell {
                name: "ET",
                scenario: InfoScenario::BroadcastOnly,
                scheme: Ok(Scheme::LevelBroadcast { threshold: delta_b }),
                analytic: Some(j_et_b(n, delta_b)),
            },
            Cell {
                name: "TT",
                scenario: InfoScenario::BroadcastPlusLocal,
                scheme: Ok(Scheme::PeriodicSync { period: t }),
                analytic: Some(j_tt_bl(n, t)),
            },
            Cell {
                name: "ET",
                scenario: InfoScenario::BroadcastPlusLocal,
                scheme: delta_bl
                    .map(|c| Scheme::LevelGlobal { threshold: c.delta_star })
                    .map_err(|e| e.to_string()),
                analytic: None,
            },
        ];
        for Cell {
            name,
            scenario,
            scheme,
            analytic,
        } in cells
        {
            let mut row = Table1Row {
                n,
                target_global_t: t,
                scheme: name,
                scenario: scenario.short_name(),
                delta: scheme.as_ref().ok().and_then(|s| s.threshold()),
                period: scheme.as_ref().ok().and_then(|s| s.period()),
                j_sim: None,
                j_analytic: analytic,
                mean_global_t: None,
                ci: None,
                status: "ok".into(),
            };
            match scheme {
                Ok(scheme) => {
                    let r = run_batch(&scenario_for(n, scenario, scheme, &args.numerics))?;
                    row.j_sim = Some(r.j_time_avg);
                    row.mean_global_t = Some(r.mean_global_interevent);
                    row.ci = Some(r.ci_halfwidth);
                    log::info!(
                        "n = {n}, {t} s, {name}^{}: J = {:.4} ({:.3} s)",
                        row.scenario,
                        r.j_time_avg,
                        r.mean_global_interevent
                    );
                }
                Err(error) => {
                    log::error!("n = {n}, {t} s: {error}");
                    row.status = error;
                }
            }
            rows.push(row);
        }
    }
    let failed = rows.iter().filter(|r| r.status != "ok").count();
    let sink = Sink::new("table1", args.out.out.clone());
    sink.rows(&rows)?;
    #[derive(Serialize)]
    struct Config<'a> {
        #[serde(flatten)]
        numerics: NumericsView<'a>,
        calibration_samples: usize,
        bridge_correction: OnOff,
    }
    sink.manifest(
        &Config {
            numerics: NumericsView(&args.numerics),
            calibration_samples: args.calibration.calibration_samples,
            bridge_correction: args.calibration.bridge_correction,
        },
        &Table1Summary {
            cells: rows.len(),
            failed_cells: failed,
        },
    )?;
    Ok(failed)
}

/// Serialises the shared numerics flags.
struct NumericsView<'a>(&'a NumericsArgs);

impl Serialize for NumericsView<'_> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("numerics", 4)?;
        st.serialize_field("dt", &self.0.dt)?;
        st.serialize_field("horizon", &self.0.horizon)?;
        st.serialize_field("trials", &self.0.trials)?;
        st.serialize_field("seed", &self.0.seed)?;
        st.end()
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Fleet sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "3,10,50")]
    pub n_list: Vec<usize>,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    scenario: ScenarioArg,
    trigger: TriggerArg,
    delta: Option<f64>,
    period: Option<f64>,
    j: f64,
    ci: f64,
    j_renewal: f64,
    j_analytic: Option<f64>,
    mean_global_t: f64,
    mean_local_t: f64,
}

fn analytic_cost(config: &Scenario) -> Option<f64> {
    let n = config.n;
    match (&config.scheme, config.scenario) {
        (Scheme::PeriodicSync { period } | Scheme::PeriodicAsync { period, .. }, InfoScenario::BroadcastOnly) => {
            Some(j_tt_b(n, *period))
        }
        (Scheme::PeriodicSync { period }, InfoScenario::BroadcastPlusLocal) => Some(j_tt_bl(n, *period)),
        (Scheme::LevelBroadcast { threshold }, _) => Some(j_et_b(n, *threshold)),
        _ => None,
    }
}

pub fn sweep_n(args: &SweepArgs) -> anyhow::Result<()> {
    check_n_list(&args.n_list)?;
    let mut rows = Vec::new();
    let mut configs: Vec<ResolvedScenario> = Vec::new();
    for &n in &args.n_list {
        let (config, resolved) = args.scheme.resolve(n)?;
        let r = run_batch(&config)?;
        log::info!("n = {n}: J = {:.5} ± {:.5}", r.j_time_avg, r.ci_halfwidth);
        rows.push(SweepRow {
            n,
            scenario: args.scheme.scenario,
            trigger: args.scheme.trigger,
            delta: config.scheme.threshold(),
            period: config.scheme.period(),
            j: r.j_time_avg,
            ci: r.ci_halfwidth,
            j_renewal: r.j_renewal,
            j_analytic: analytic_cost(&config),
            mean_global_t: r.mean_global_interevent,
            mean_local_t: r.mean_local_interevent,
        });
        configs.push(resolved);
    }
    #[derive(Serialize)]
    struct Config {
        runs: Vec<ResolvedScenario>,
    }
    #[derive(Serialize)]
    struct Summary {
        rows: usize,
    }
    let sink = Sink::new("sweep-n", args.out.out.clone());
    sink.rows(&rows)?;
    sink.manifest(&Config { runs: configs }, &Summary { rows: rows.len() })
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    #[arg(long, value_delimiter = ',', default_value = "3,10,50")]
    pub n_list: Vec<usize>,
    /// Global mean inter-event time both schemes are matched to.
    #[arg(long, default_value_t = 0.5)]
    pub target_t: f64,
    #[command(flatten)]
    pub numerics: NumericsArgs,
    #[command(flatten)]
    pub calibration: CalibrationArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct RatioRow {
    n: usize,
    target_global_t: f64,
    ratio_b_analytic: f64,
    delta_bl: f64,
    j_et_bl: f64,
    j_tt_bl: f64,
    ratio_bl: f64,
    ratio_bl_ci: f64,
    mean_global_t: f64,
    ratio_bl_rate_matched: f64,
}

/// Fleet size where the ratio first crosses 1, by linear interpolation.
fn crossing(rows: &[RatioRow]) -> Option<f64> {
    rows.windows(2).find_map(|w| {
        let (a, b) = (&w[0], &w[1]);
        ((a.ratio_bl - 1.0) * (b.ratio_bl - 1.0) <= 0.0 && a.ratio_bl != b.ratio_bl).then(|| {
            let s = (1.0 - a.ratio_bl) / (b.ratio_bl - a.ratio_bl);
            a.n as f64 + s * (b.n as f64 - a.n as f64)
        })
    })
}

pub fn ratio_curve(args: &RatioArgs) -> anyhow::Result<()> {
    check_n_list(&args.n_list)?;
    let opts = args.calibration.options(args.numerics.seed);
    let mut n_sorted = args.n_list.clone();
    n_sorted.sort_unstable();
    n_sorted.dedup();
    let mut rows = Vec::new();
    for n in n_sorted {
        let t = args.target_t;
        let delta = calibrate_delta_bl(n, t, &opts)?.delta_star;
        let et = run_batch(&scenario_for(
            n,
            InfoScenario::BroadcastPlusLocal,
            Scheme::LevelGlobal { threshold: delta },
            &args.numerics,
        ))?;
        let tt = run_batch(&scenario_for(
            n,
            InfoScenario::BroadcastPlusLocal,
            Scheme::PeriodicSync { period: t },
            &args.numerics,
        ))?;
        let ratio = et.j_time_avg / tt.j_time_avg;
        let rel_se = (et.std_error / et.j_time_avg).hypot(tt.std_error / tt.j_time_avg);
        let df = (et.trials + tt.trials).saturating_sub(2);
        let ci = if df == 0 { 0.0 } else { ratio * rel_se * t_quantile_975(df) };
        log::info!("n = {n}: J_ET/J_TT = {ratio:.4} ± {ci:.4}");
        rows.push(RatioRow {
            n,
            target_global_t: t,
            ratio_b_analytic: n as f64 / 3.0,
            delta_bl: delta,
            j_et_bl: et.j_time_avg,
            j_tt_bl: tt.j_time_avg,
            ratio_bl: ratio,
            ratio_bl_ci: ci,
            mean_global_t: et.mean_global_interevent,
            ratio_bl_rate_matched: et.j_time_avg / j_tt_bl(n, et.mean_global_interevent),
        });
    }
    let n0 = crossing(&rows);
    match n0 {
        Some(v) => log::info!("ratio crosses 1 near n = {v:.1}"),
        None => log::info!("ratio does not cross 1 over the given fleet sizes"),
    }
    #[derive(Serialize)]
    struct Config<'a> {
        n_list: &'a [usize],
        target_t: f64,
        #[serde(flatten)]
        numerics: NumericsView<'a>,
        calibration_samples: usize,
        bridge_correction: OnOff,
    }
    #[derive(Serialize)]
    struct Summary {
        #[serde(skip_serializing_if = "Option::is_none")]
        crossover_n_estimate: Option<f64>,
    }
    let sink = Sink::new("ratio-curve", args.out.out.clone());
    sink.rows(&rows)?;
    sink.manifest(
        &Config {
            n_list: &args.n_list,
            target_t: args.target_t,
            numerics: NumericsView(&args.numerics),
            calibration_samples: args.calibration.calibration_samples,
            bridge_correction: args.calibration.bridge_correction,
        },
        &Summary {
            crossover_n_estimate: n0,
        },
    )
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Simulated seconds; overrides `--horizon`.
    #[arg(long, default_value_t = 2.5)]
    pub duration: f64,
    /// Record every k-th step in addition to every event.
    #[arg(long, default_value_t = etc_consensus::sim::DEFAULT_TRAJECTORY_STRIDE)]
    pub stride: usize,
    /// Noise substream to use.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

pub fn trajectory(args: &TrajectoryArgs) -> anyhow::Result<()> {
    let mut scheme = args.scheme.clone();
    scheme.numerics.horizon = args.duration;
    scheme.numerics.trials = 1;
    let (mut config, resolved) = scheme.resolve(args.n)?;
    if args.stride == 0 {
        return Err(UsageError("--stride must be positive".into()).into());
    }
    config.trajectory_stride = Some(args.stride);
    let result = run_trial(&config, args.trial)?;
    let records = result.trajectory.expect("trajectory requested");
    let n = args.n;
    let threshold = config.scheme.threshold();

    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x_{i}")));
    header.extend((1..=n).map(|i| format!("xhat_{i}")));
    header.extend(["cost", "event", "initiators"].map(String::from));
    if threshold.is_some() {
        header.extend((1..=n).map(|i| format!("lower_{i}")));
        header.extend((1..=n).map(|i| format!("upper_{i}")));
    }
    let rows: Vec<Vec<String>> = records
        .iter()
        .map(|r| {
            let mut row = vec![r.t.to_string()];
            row.extend(r.x.iter().map(f64::to_string));
            row.extend(r.xhat.iter().map(f64::to_string));
            row.push(r.cost.to_string());
            row.push(u8::from(r.is_event()).to_string());
            row.push(
                r.initiators
                    .iter()
                    .map(|i| (i + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(";"),
            );
            if let Some(d) = threshold {
                // in both scenarios the reference point after an event is x̂
                row.extend(r.xhat.iter().map(|&c| cell(Some(c - d))));
                row.extend(r.xhat.iter().map(|&c| cell(Some(c + d))));
            }
            row
        })
        .collect();
    let events = records.iter().filter(|r| r.is_event()).count();
    log::info!("{} records, {events} events over {} s", records.len(), args.duration);

    #[derive(Serialize)]
    struct Config {
        #[serde(flatten)]
        scenario: ResolvedScenario,
        stride: usize,
        trial: u64,
    }
    #[derive(Serialize)]
    struct Summary {
        records: usize,
        events: usize,
    }
    let sink = Sink::new("trajectory", args.out.out.clone());
    sink.records(&header, &rows)?;
    sink.manifest(
        &Config {
            scenario: resolved,
            stride: args.stride,
            trial: args.trial,
        },
        &Summary {
            records: records.len(),
            events,
        },
    )
}

/// Maps engine errors onto exit codes: 2 usage, 3 calibration, 1 otherwise.
pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::CalibrationFailed { .. }) => 3,
        Some(Error::InvalidArgument(_)) => 2,
        _ => 1,
    }
}

#[derive(Debug, Args)]
pub struct SelfTestArgs {
    #[arg(long, default_value_t = etc_consensus::sim::DEFAULT_SEED)]
    pub seed: u64,
}

/// Fast reduced-budget smoke checks; returns the number of failures.
pub fn self_test(args: &SelfTestArgs) -> anyhow::Result<usize> {
    use etc_consensus::oracle::tt_information_gap_checked;
    use etc_consensus::{estimate_passage, PassageParams, Rule};

    let mut checks: Vec<(&str, bool, String)> = Vec::new();

    let gaps_exact = [3usize, 10, 50]
        .iter()
        .all(|&n| (tt_information_gap_checked(n, 0.5) / n as f64 - 1.0).abs() < 1e-14);
    checks.push(("information gap identity", gaps_exact, String::new()));

    let p = PassageParams {
        n: 1,
        delta: 1.0,
        dt: 1e-3,
        bridge_correction: true,
    };
    let e = estimate_passage(&p, args.seed, 0, 20_000)?;
    checks.push((
        "exit time at delta 1",
        (e.time.mean - 1.0).abs() < 0.03,
        format!("{:.4}", e.time.mean),
    ));
    checks.push((
        "occupation integral at delta 1",
        (e.occupation.mean * 6.0 - 1.0).abs() < 0.06,
        format!("{:.5}", e.occupation.mean),
    ));

    let short = |scenario, scheme| {
        let mut c = Scenario::new(3, scenario, scheme);
        c.horizon = 400.0;
        c.seed = args.seed;
        c
    };
    let tt = run_batch(&short(InfoScenario::BroadcastOnly, Scheme::PeriodicSync { period: 0.75 }))?;
    checks.push((
        "periodic broadcast cost",
        (tt.j_time_avg / 2.25 - 1.0).abs() < 0.06,
        format!("{:.4}", tt.j_time_avg),
    ));
    let et = run_batch(&short(
        InfoScenario::BroadcastOnly,
        Scheme::LevelBroadcast { threshold: 1.5f64.sqrt() },
    ))?;
    checks.push((
        "level broadcast cost",
        (0.95..1.10).contains(&(et.j_time_avg / 1.5)),
        format!("{:.4}", et.j_time_avg),
    ));

    let mut avg = short(InfoScenario::BroadcastPlusLocal, Scheme::LevelGlobal { threshold: 1.04 });
    avg.horizon = 50.0;
    avg.record_events = true;
    let mut leader = avg.clone();
    leader.rule = Rule::Leader;
    let a = run_trial(&avg, 0)?;
    let b = run_trial(&leader, 0)?;
    let exact = a
        .events
        .unwrap_or_default()
        .iter()
        .all(|e| e.post.as_ref().is_some_and(|p| p.iter().all(|&x| x == e.consensus_point)));
    checks.push(("exact reset with local information", exact, String::new()));
    let gap = (a.accumulator.integral_sum() - b.accumulator.integral_sum()).abs();
    checks.push(("rule independence", gap <= 1e-9, format!("{gap:e}")));

    let mut failed = 0;
    for (name, ok, detail) in checks {
        failed += usize::from(!ok);
        println!("{} {name} {detail}", if ok { "PASS" } else { "FAIL" });
    }
    Ok(failed)
}

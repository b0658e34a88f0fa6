use std::path::PathBuf;

use clap::{Args, ValueEnum};
use etc_consensus::sim::{DEFAULT_DT, DEFAULT_HORIZON, DEFAULT_SEED, DEFAULT_TRIALS};
use etc_consensus::{calibrate_delta_bl, CalibrationOptions, InfoScenario, Rule, Scenario, Scheme};
use serde::Serialize;

use crate::UsageError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioArg {
    /// broadcast information only
    B,
    /// broadcast plus own state at triggering instants
    Bl,
}

impl From<ScenarioArg> for InfoScenario {
    fn from(s: ScenarioArg) -> Self {
        match s {
            ScenarioArg::B => InfoScenario::BroadcastOnly,
            ScenarioArg::Bl => InfoScenario::BroadcastPlusLocal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TriggerArg {
    PeriodicSync,
    PeriodicAsync,
    Level,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Average,
    Leader,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OnOff {
    On,
    Off,
}

impl OnOff {
    pub fn is_on(self) -> bool {
        self == OnOff::On
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// CSV destination; a `.manifest.toml` sidecar is written next to it.
    /// `-` prints the CSV to stdout without a manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct NumericsArgs {
    /// Euler-Maruyama step in seconds.
    #[arg(long, default_value_t = DEFAULT_DT)]
    pub dt: f64,
    /// Simulated time per trial in seconds.
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: f64,
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct CalibrationArgs {
    /// Passages per calibration estimate.
    #[arg(long, default_value_t = 100_000)]
    pub calibration_samples: usize,
    /// Brownian-bridge correction when sampling exit times.
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    pub bridge_correction: OnOff,
}

impl CalibrationArgs {
    pub fn options(&self, seed: u64) -> CalibrationOptions {
        CalibrationOptions {
            samples: self.calibration_samples,
            bisection_samples: (self.calibration_samples / 5).max(2),
            bridge_correction: self.bridge_correction.is_on(),
            seed,
            ..CalibrationOptions::default()
        }
    }
}

/// Everything that fixes a scenario except the fleet size.
#[derive(Debug, Clone, Args)]
pub struct SchemeArgs {
    #[arg(long, value_enum, default_value_t = ScenarioArg::B)]
    pub scenario: ScenarioArg,
    #[arg(long, value_enum, default_value_t = TriggerArg::Level)]
    pub trigger: TriggerArg,
    #[arg(long, value_enum, default_value_t = RuleArg::Average)]
    pub rule: RuleArg,
    /// Consensus point used by `--rule fixed`.
    #[arg(long, default_value_t = 0.0)]
    pub fixed_point: f64,
    /// Level-trigger threshold.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Per-agent period of the periodic triggers.
    #[arg(long)]
    pub period: Option<f64>,
    /// Per-agent phase offsets for `periodic-async` (default i·T/n).
    #[arg(long, value_delimiter = ',')]
    pub offsets: Option<Vec<f64>>,
    /// Target global mean inter-event time; picks `--delta` or `--period`
    /// when they are not given.
    #[arg(long)]
    pub target_t: Option<f64>,
    #[command(flatten)]
    pub numerics: NumericsArgs,
    #[command(flatten)]
    pub calibration: CalibrationArgs,
}

/// Fully resolved scenario as recorded in manifests.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedScenario {
    pub n: usize,
    pub scenario: ScenarioArg,
    pub trigger: TriggerArg,
    pub rule: RuleArg,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub period: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offsets: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_t: Option<f64>,
    pub dt: f64,
    pub horizon: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SchemeArgs {
    /// Builds the scenario for `n` agents, calibrating a threshold from
    /// `--target-t` if needed.
    pub fn resolve(&self, n: usize) -> anyhow::Result<(Scenario, ResolvedScenario)> {
        let scenario: InfoScenario = self.scenario.into();
        let nf = n as f64;
        let scheme = match self.trigger {
            TriggerArg::Level => {
                let delta = match (self.delta, self.target_t) {
                    (Some(d), _) => d,
                    (None, Some(t)) => match scenario {
                        // each agent fires n times less often than the fleet
                        InfoScenario::BroadcastOnly => (nf * t).sqrt(),
                        InfoScenario::BroadcastPlusLocal => {
                            let opts = self.calibration.options(self.numerics.seed);
                            calibrate_delta_bl(n, t, &opts)?.delta_star
                        }
                    },
                    (None, None) => {
                        return Err(UsageError("level trigger needs --delta or --target-t".into()).into())
                    }
                };
                match scenario {
                    InfoScenario::BroadcastOnly => Scheme::LevelBroadcast { threshold: delta },
                    InfoScenario::BroadcastPlusLocal => Scheme::LevelGlobal { threshold: delta },
                }
            }
            TriggerArg::PeriodicSync => Scheme::PeriodicSync {
                period: self.period_or_target(1.0)?,
            },
            TriggerArg::PeriodicAsync => {
                let period = self.period_or_target(nf)?;
                match &self.offsets {
                    Some(offsets) => Scheme::PeriodicAsync {
                        period,
                        offsets: offsets.clone(),
                    },
                    None => Scheme::periodic_async_even(period, n),
                }
            }
        };
        let rule = match self.rule {
            RuleArg::Average => Rule::Average,
            RuleArg::Leader => Rule::Leader,
            RuleArg::Fixed => Rule::Fixed(self.fixed_point),
        };
        let mut config = Scenario::new(n, scenario, scheme);
        config.rule = rule;
        config.dt = self.numerics.dt;
        config.horizon = self.numerics.horizon;
        config.trials = self.numerics.trials;
        config.seed = self.numerics.seed;
        if let Err(e) = config.validate() {
            return Err(UsageError(e.to_string()).into());
        }
        let resolved = ResolvedScenario {
            n,
            scenario: self.scenario,
            trigger: self.trigger,
            rule: self.rule,
            fixed_point: (self.rule == RuleArg::Fixed).then_some(self.fixed_point),
            delta: config.scheme.threshold(),
            period: config.scheme.period(),
            offsets: match &config.scheme {
                Scheme::PeriodicAsync { offsets, .. } => Some(offsets.clone()),
                _ => None,
            },
            target_t: self.target_t,
            dt: config.dt,
            horizon: config.horizon,
            trials: config.trials,
            seed: config.seed,
        };
        Ok((config, resolved))
    }

    /// `--period`, or the period whose merged events are `--target-t` apart
    /// when `agents_per_period` agents fire once per period.
    fn period_or_target(&self, agents_per_period: f64) -> anyhow::Result<f64> {
        match (self.period, self.target_t) {
            (Some(p), _) => Ok(p),
            (None, Some(t)) => Ok(t * agents_per_period),
            (None, None) => Err(UsageError("periodic trigger needs --period or --target-t".into()).into()),
        }
    }
}

/// Parses a comma-separated, nonempty list of fleet sizes.
pub fn check_n_list(list: &[usize]) -> anyhow::Result<()> {
    if list.is_empty() || list.contains(&0) {
        return Err(UsageError("--n-list needs positive fleet sizes".into()).into());
    }
    Ok(())
}

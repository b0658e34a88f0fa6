//! Closed-loop trial driver.
//!
//! One step of length `dt`:
//!
//! 1. accumulate cost on the current (post-jump) state (left endpoint);
//! 2. add Wiener increments;
//! 3. evaluate the triggering rule on the new state;
//! 4. on a trigger, close renewal cycles, apply the controller's jumps and
//!    update estimates and bookkeeping.
//!
//! A trial is a pure function of `(config, trial_index)`.

use rayon::prelude::*;

use crate::control::{apply_event, ConsensusRule, InfoScenario};
use crate::cost::{CostAccumulator, CostReport};
use crate::error::{invalid_arg, Result};
use crate::graph::quadratic_deviation;
use crate::noise::NoiseStream;
use crate::scalar::Scalar;
use crate::sde::SimState;
use crate::trigger::{level_crossers, PeriodicClock, TriggerEvent, TriggerScheme};

pub const DEFAULT_DT: f64 = 2e-3;
pub const DEFAULT_HORIZON: f64 = 2000.0;
pub const DEFAULT_TRIALS: usize = 8;
pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_TRAJECTORY_STRIDE: usize = 50;

/// Full description of a batch of closed-loop trials.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig<T> {
    pub n: usize,
    pub scenario: InfoScenario,
    pub scheme: TriggerScheme<T>,
    pub rule: ConsensusRule<T>,
    pub dt: T,
    pub horizon: T,
    pub trials: usize,
    pub seed: u64,
    pub record_events: bool,
    /// Record every `k`-th step plus every event step.
    pub trajectory_stride: Option<usize>,
}

impl<T: Scalar> ScenarioConfig<T> {
    /// Average rule, default numerics and seed, no recording.
    pub fn new(n: usize, scenario: InfoScenario, scheme: TriggerScheme<T>) -> Self {
        Self {
            n,
            scenario,
            scheme,
            rule: ConsensusRule::Average,
            dt: T::lit(DEFAULT_DT),
            horizon: T::lit(DEFAULT_HORIZON),
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            record_events: false,
            trajectory_stride: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid_arg("need at least one agent");
        }
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return invalid_arg(format!("time step must be positive, got {}", self.dt));
        }
        if !(self.horizon >= self.dt) || !self.horizon.is_finite() {
            return invalid_arg(format!("horizon {} shorter than one step", self.horizon));
        }
        if self.trials == 0 {
            return invalid_arg("need at least one trial");
        }
        if self.trajectory_stride == Some(0) {
            return invalid_arg("trajectory stride must be positive");
        }
        self.scheme.validate(self.n, self.scenario)
    }

    pub fn steps(&self) -> u64 {
        (self.horizon / self.dt)
            .round()
            .to_u64()
            .expect("step count fits in u64")
    }

    /// Nominal global inter-event time where it is known a priori.
    pub fn nominal_global_interevent(&self) -> Option<T> {
        let nf = T::from_usize_lossy(self.n);
        match &self.scheme {
            TriggerScheme::PeriodicSync { period } => Some(*period),
            TriggerScheme::PeriodicAsync { period, .. } => Some(*period / nf),
            TriggerScheme::LevelBroadcast { threshold } => Some(*threshold * *threshold / nf),
            TriggerScheme::LevelGlobal { .. } => None,
        }
    }

    fn warn_short_horizon(&self) {
        if let Some(t) = self.nominal_global_interevent() {
            if self.horizon < T::lit(100.0) * t {
                log::warn!(
                    "horizon {} s covers fewer than 100 nominal inter-event times ({} s)",
                    self.horizon,
                    t
                );
            }
        }
    }
}

/// One recorded trajectory sample (post-jump state at an event step).
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord<T> {
    pub t: T,
    pub x: Vec<T>,
    pub xhat: Vec<T>,
    pub cost: T,
    pub initiators: Vec<usize>,
}

impl<T> TrajectoryRecord<T> {
    pub fn is_event(&self) -> bool {
        !self.initiators.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult<T> {
    pub accumulator: CostAccumulator<T>,
    pub events: Option<Vec<TriggerEvent<T>>>,
    pub trajectory: Option<Vec<TrajectoryRecord<T>>>,
}

/// Runs trial `trial_index` on its own noise substream.
pub fn run_trial<T: Scalar>(config: &ScenarioConfig<T>, trial_index: u64) -> Result<TrialResult<T>> {
    simulate(config, NoiseStream::new(config.seed, trial_index, config.n))
}

/// Runs one trial driven by an explicit noise stream.
pub fn simulate<T: Scalar>(config: &ScenarioConfig<T>, mut noise: NoiseStream) -> Result<TrialResult<T>> {
    config.validate()?;
    let n = config.n;
    if noise.n() != n {
        return invalid_arg(format!("noise stream has {} agents, config {n}", noise.n()));
    }
    let dt = config.dt;
    let steps = config.steps();
    let mut state = SimState::<T>::new(n);
    let mut acc = CostAccumulator::<T>::new(n);
    let mut clock = PeriodicClock::new(&config.scheme, n);
    let mut dw = vec![T::zero(); n];
    let mut initiators = Vec::with_capacity(n);
    let mut events = config.record_events.then(Vec::new);
    let mut trajectory = config.trajectory_stride.map(|_| {
        vec![TrajectoryRecord {
            t: T::zero(),
            x: state.x.clone(),
            xhat: state.xhat.clone(),
            cost: T::zero(),
            initiators: Vec::new(),
        }]
    });

    for k in 1..=steps {
        acc.accumulate_unchecked(quadratic_deviation(&state.x), dt);
        for i in 0..n {
            acc.accumulate_deviation(i, state.x[i] - state.xhat[i], dt);
        }

        noise.fill_increments(dt, &mut dw)?;
        state.drift_step(&dw, dt)?;
        state.t = T::from_u64(k).expect("step fits") * dt;

        match &config.scheme {
            TriggerScheme::PeriodicSync { .. } | TriggerScheme::PeriodicAsync { .. } => clock
                .as_mut()
                .expect("periodic schemes own a clock")
                .poll(state.t, dt, &mut initiators),
            TriggerScheme::LevelBroadcast { threshold } => {
                level_crossers(&state.x, &state.xhat, *threshold, &mut initiators)
            }
            TriggerScheme::LevelGlobal { threshold } => {
                level_crossers(&state.x, &state.x_at_last_global, *threshold, &mut initiators)
            }
        }

        if !initiators.is_empty() {
            let pre = events.as_ref().map(|_| state.x.clone());
            match config.scenario {
                InfoScenario::BroadcastOnly => {
                    for &i in &initiators {
                        acc.close_renewal(i, state.t);
                    }
                }
                InfoScenario::BroadcastPlusLocal => {
                    for i in 0..n {
                        acc.close_renewal(i, state.t);
                    }
                }
            }
            let c = apply_event(&mut state, &initiators, config.rule, config.scenario)?;
            acc.record_event(&initiators);
            if let Some(log) = events.as_mut() {
                log.push(TriggerEvent {
                    time: state.t,
                    initiators: initiators.clone(),
                    consensus_point: c,
                    is_global: true,
                    pre,
                    post: Some(state.x.clone()),
                });
            }
        }

        if let (Some(traj), Some(stride)) = (trajectory.as_mut(), config.trajectory_stride) {
            if !initiators.is_empty() || k % stride as u64 == 0 {
                traj.push(TrajectoryRecord {
                    t: state.t,
                    x: state.x.clone(),
                    xhat: state.xhat.clone(),
                    cost: quadratic_deviation(&state.x),
                    initiators: initiators.clone(),
                });
            }
        }
    }

    Ok(TrialResult {
        accumulator: acc,
        events,
        trajectory,
    })
}

/// All trials of a config, in trial-index order.
pub fn run_trials<T: Scalar>(config: &ScenarioConfig<T>) -> Result<Vec<TrialResult<T>>> {
    config.validate()?;
    config.warn_short_horizon();
    (0..config.trials as u64)
        .into_par_iter()
        .map(|k| run_trial(config, k))
        .collect()
}

/// Runs every trial and summarises them.
pub fn run_batch<T: Scalar>(config: &ScenarioConfig<T>) -> Result<CostReport<T>> {
    let trials = run_trials(config)?;
    let accs: Vec<CostAccumulator<T>> = trials.into_iter().map(|t| t.accumulator).collect();
    CostReport::from_trials(&accs)
}

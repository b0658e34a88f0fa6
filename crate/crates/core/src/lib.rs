//! Event-triggered consensus of single-integrator agents driven by
//! independent Brownian motions on a complete graph.
//!
//! Each agent follows `dx_i = u_i dt + dv_i`, where `u_i` is a train of
//! impulses fired by a periodic or level-crossing trigger. The crate simulates
//! the closed loop, estimates the long-run disagreement cost
//! `lim (1/M)·E∫xᵀLx dt` and compares it with closed-form predictions.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom fix `f64`.

// `!(x > 0)` is used on purpose so that NaN fails positivity checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod control;
pub mod cost;
pub mod error;
pub mod graph;
pub mod noise;
pub mod oracle;
pub mod passage;
pub mod scalar;
pub mod sde;
pub mod sim;
pub mod trigger;

pub use calibration::{
    bisect_delta_bl, calibrate_delta_b, calibrate_delta_bl, unit_cube_exit_time, CalibrationMethod,
    CalibrationOptions, CalibrationResult,
};
pub use control::{apply_event, consensus_point, impulse_broadcast, impulse_local, ConsensusRule, InfoScenario};
pub use cost::{difference_ci, t_quantile_975, CostAccumulator, CostReport};
pub use error::{Error, Result};
pub use graph::CompleteGraph;
pub use noise::NoiseStream;
pub use passage::{
    estimate_passage, sample_first_passage_min, sample_first_passage_single, sample_passage, MeanEstimate,
    Passage, PassageEstimate, PassageParams,
};
pub use scalar::Scalar;
pub use sde::SimState;
pub use sim::{run_batch, run_trial, run_trials, simulate, ScenarioConfig, TrajectoryRecord, TrialResult};
pub use trigger::{check_level_broadcast, check_level_global, PeriodicClock, TriggerEvent, TriggerScheme};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub type State = SimState<f64>;
pub type Scheme = TriggerScheme<f64>;
pub type Rule = ConsensusRule<f64>;
pub type Event = TriggerEvent<f64>;
pub type Scenario = ScenarioConfig<f64>;
pub type Trial = TrialResult<f64>;
pub type Accumulator = CostAccumulator<f64>;
pub type Report = CostReport<f64>;
pub type Calibration = CalibrationResult<f64>;

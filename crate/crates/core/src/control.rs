//! Optimal impulsive controllers for the two information scenarios.
//!
//! At a global triggering instant every agent jumps to a common consensus
//! point `c`. With broadcast-only information an agent corrects its
//! *estimate* (`c − x̂ᵢ`), so non-initiators keep their private error; with
//! local state at triggering instants it corrects its *state* (`c − xᵢ`) and
//! the fleet is reset to exact consensus.

use crate::error::{invalid_arg, Result};
use crate::scalar::Scalar;
use crate::sde::SimState;

/// How the common consensus point is chosen at an event.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConsensusRule<T> {
    /// Mean of the estimates available at the event.
    Average,
    /// State of the lowest-index initiator.
    Leader,
    /// Constant point that needs no communication. Test baseline only.
    Fixed(T),
}

/// Information available to the local controllers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfoScenario {
    /// Broadcast states only (`I^b`).
    BroadcastOnly,
    /// Broadcast states plus own state at every global instant (`I^bl`).
    BroadcastPlusLocal,
}

impl InfoScenario {
    pub fn short_name(self) -> &'static str {
        match self {
            InfoScenario::BroadcastOnly => "b",
            InfoScenario::BroadcastPlusLocal => "bl",
        }
    }
}

fn validate_initiators(n: usize, initiators: &[usize]) -> Result<()> {
    if initiators.is_empty() {
        return invalid_arg("event without initiators");
    }
    if let Some(&bad) = initiators.iter().find(|&&i| i >= n) {
        return invalid_arg(format!("initiator {bad} out of range for {n} agents"));
    }
    Ok(())
}

/// Consensus point for an event initiated by `initiators` at `state.t`.
///
/// Under [`InfoScenario::BroadcastOnly`] the estimate of an initiator is its
/// broadcast state and every other estimate is still the previous consensus
/// point, so the average rule with a single initiator `i` reduces to
/// `((n − 1)·c_prev + xᵢ)/n`.
pub fn consensus_point<T: Scalar>(
    state: &SimState<T>,
    initiators: &[usize],
    rule: ConsensusRule<T>,
    scenario: InfoScenario,
) -> Result<T> {
    let n = state.n();
    validate_initiators(n, initiators)?;
    let c = match rule {
        ConsensusRule::Fixed(c0) => c0,
        ConsensusRule::Leader => {
            let leader = *initiators.iter().min().expect("nonempty");
            state.x[leader]
        }
        ConsensusRule::Average => {
            let nf = T::from_usize_lossy(n);
            match scenario {
                InfoScenario::BroadcastOnly => {
                    let sum = (0..n)
                        .map(|i| {
                            if initiators.contains(&i) {
                                state.x[i]
                            } else {
                                state.xhat[i]
                            }
                        })
                        .sum::<T>();
                    sum / nf
                }
                InfoScenario::BroadcastPlusLocal => state.x.iter().copied().sum::<T>() / nf,
            }
        }
    };
    Ok(c)
}

/// Jumps `c − x̂ᵢ(t)` of the broadcast-only controller, where initiators
/// estimate themselves exactly and everyone else holds the stored estimate.
pub fn impulse_broadcast<T: Scalar>(state: &SimState<T>, initiators: &[usize], c: T) -> Vec<T> {
    (0..state.n())
        .map(|i| {
            let est = if initiators.contains(&i) {
                state.x[i]
            } else {
                state.xhat[i]
            };
            c - est
        })
        .collect()
}

/// Jumps `c − xᵢ(t)` of the broadcast-plus-local controller.
pub fn impulse_local<T: Scalar>(state: &SimState<T>, c: T) -> Vec<T> {
    state.x.iter().map(|&xi| c - xi).collect()
}

/// Runs one global event end to end: consensus point, jumps, estimate and
/// bookkeeping updates. Returns the consensus point.
pub fn apply_event<T: Scalar>(
    state: &mut SimState<T>,
    initiators: &[usize],
    rule: ConsensusRule<T>,
    scenario: InfoScenario,
) -> Result<T> {
    let c = consensus_point(state, initiators, rule, scenario)?;
    match scenario {
        InfoScenario::BroadcastOnly => {
            let jumps = impulse_broadcast(state, initiators, c);
            state.apply_impulse(&jumps)?;
            // x + (c − x) can round away from c; an initiator's error is zero by construction
            for &i in initiators {
                state.x[i] = c;
            }
        }
        InfoScenario::BroadcastPlusLocal => {
            let jumps = impulse_local(state, c);
            state.apply_impulse(&jumps)?;
            state.x.iter_mut().for_each(|xi| *xi = c);
            state.x_at_last_global.copy_from_slice(&state.x);
        }
    }
    state.xhat.iter_mut().for_each(|e| *e = c);
    state.last_consensus_point = c;
    for &i in initiators {
        state.last_local_trigger[i] = state.t;
    }
    state.last_global_trigger = state.t;
    Ok(c)
}

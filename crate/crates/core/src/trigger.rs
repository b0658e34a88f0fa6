//! Triggering rules: periodic schedules and the two level rules.
//!
//! All predicates are evaluated once per integration step on the post-drift,
//! pre-jump state. Every agent satisfying its predicate in that step is an
//! initiator of one merged global event; the boundary is inclusive (`≥`).

use crate::control::InfoScenario;
use crate::error::{invalid_arg, Result};
use crate::scalar::Scalar;
use crate::sde::SimState;

#[derive(Debug, Clone, PartialEq)]
pub enum TriggerScheme<T> {
    /// Every agent triggers at each multiple of `period`.
    PeriodicSync { period: T },
    /// Agent `i` triggers at `offsets[i] + k·period`.
    PeriodicAsync { period: T, offsets: Vec<T> },
    /// Broadcast-only level rule: `|xᵢ − x̂ᵢ| ≥ threshold`.
    LevelBroadcast { threshold: T },
    /// Broadcast-plus-local level rule: some `|xᵢ − xᵢ(t_k)| ≥ threshold`.
    LevelGlobal { threshold: T },
}

impl<T: Scalar> TriggerScheme<T> {
    /// Asynchronous schedule with phases spread evenly over one period.
    pub fn periodic_async_even(period: T, n: usize) -> Self {
        let nf = T::from_usize_lossy(n);
        let offsets = (0..n)
            .map(|i| period * T::from_usize_lossy(i) / nf)
            .collect();
        TriggerScheme::PeriodicAsync { period, offsets }
    }

    pub fn is_level(&self) -> bool {
        matches!(
            self,
            TriggerScheme::LevelBroadcast { .. } | TriggerScheme::LevelGlobal { .. }
        )
    }

    pub fn threshold(&self) -> Option<T> {
        match self {
            TriggerScheme::LevelBroadcast { threshold } | TriggerScheme::LevelGlobal { threshold } => {
                Some(*threshold)
            }
            _ => None,
        }
    }

    pub fn period(&self) -> Option<T> {
        match self {
            TriggerScheme::PeriodicSync { period } | TriggerScheme::PeriodicAsync { period, .. } => {
                Some(*period)
            }
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TriggerScheme::PeriodicSync { .. } => "periodic-sync",
            TriggerScheme::PeriodicAsync { .. } => "periodic-async",
            TriggerScheme::LevelBroadcast { .. } => "level-broadcast",
            TriggerScheme::LevelGlobal { .. } => "level-global",
        }
    }

    /// Parameter checks plus scenario compatibility.
    pub fn validate(&self, n: usize, scenario: InfoScenario) -> Result<()> {
        let positive = |v: T, what: &str| -> Result<()> {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                invalid_arg(format!("{what} must be positive and finite, got {v}"))
            }
        };
        match self {
            TriggerScheme::PeriodicSync { period } => positive(*period, "period")?,
            TriggerScheme::PeriodicAsync { period, offsets } => {
                positive(*period, "period")?;
                if offsets.len() != n {
                    return invalid_arg(format!(
                        "{} offsets given for {n} agents",
                        offsets.len()
                    ));
                }
                if let Some(o) = offsets.iter().find(|&&o| !(o >= T::zero() && o < *period)) {
                    return invalid_arg(format!("offset {o} outside [0, period)"));
                }
                if scenario != InfoScenario::BroadcastOnly {
                    return invalid_arg("asynchronous periodic triggering needs the broadcast-only scenario");
                }
            }
            TriggerScheme::LevelBroadcast { threshold } => {
                positive(*threshold, "threshold")?;
                if scenario != InfoScenario::BroadcastOnly {
                    return invalid_arg("level-broadcast rule needs the broadcast-only scenario");
                }
            }
            TriggerScheme::LevelGlobal { threshold } => {
                positive(*threshold, "threshold")?;
                if scenario != InfoScenario::BroadcastPlusLocal {
                    return invalid_arg("level-global rule needs the broadcast-plus-local scenario");
                }
            }
        }
        Ok(())
    }
}

/// One global triggering instant.
#[derive(Debug, Clone, PartialEq)]
pub struct TriggerEvent<T> {
    pub time: T,
    /// Agents whose own rule fired, ascending.
    pub initiators: Vec<usize>,
    pub consensus_point: T,
    pub is_global: bool,
    pub pre: Option<Vec<T>>,
    pub post: Option<Vec<T>>,
}

/// Agents with `|xᵢ − x̂ᵢ| ≥ threshold`.
pub fn check_level_broadcast<T: Scalar>(state: &SimState<T>, threshold: T) -> Vec<usize> {
    let mut out = Vec::new();
    level_crossers(&state.x, &state.xhat, threshold, &mut out);
    out
}

/// Agents with `|xᵢ − xᵢ(t_k)| ≥ threshold`, measured from the latest global reset.
pub fn check_level_global<T: Scalar>(state: &SimState<T>, threshold: T) -> Vec<usize> {
    let mut out = Vec::new();
    level_crossers(&state.x, &state.x_at_last_global, threshold, &mut out);
    out
}

#[inline]
pub(crate) fn level_crossers<T: Scalar>(x: &[T], reference: &[T], threshold: T, out: &mut Vec<usize>) {
    out.clear();
    for (i, (&a, &b)) in x.iter().zip(reference).enumerate() {
        if (a - b).abs() >= threshold {
            out.push(i);
        }
    }
}

/// Deadline tracker for periodic schedules.
///
/// Agent `i`'s `k`-th deadline is `offset_i + k·period`, recomputed from an
/// integer counter so nothing drifts over millions of steps. A zero offset
/// coincides with the initial instant `t = 0`, so its first deadline is one
/// full period later.
#[derive(Debug, Clone)]
pub struct PeriodicClock<T> {
    period: T,
    offsets: Vec<T>,
    counters: Vec<u64>,
}

impl<T: Scalar> PeriodicClock<T> {
    /// Clock for a periodic scheme; `None` for level rules.
    pub fn new(scheme: &TriggerScheme<T>, n: usize) -> Option<Self> {
        let (period, offsets) = match scheme {
            TriggerScheme::PeriodicSync { period } => (*period, vec![T::zero(); n]),
            TriggerScheme::PeriodicAsync { period, offsets } => (*period, offsets.clone()),
            _ => return None,
        };
        let counters = offsets
            .iter()
            .map(|&o| if o > T::zero() { 0 } else { 1 })
            .collect();
        Some(Self {
            period,
            offsets,
            counters,
        })
    }

    fn deadline(&self, i: usize) -> T {
        self.offsets[i] + T::from_u64(self.counters[i]).expect("counter fits") * self.period
    }

    /// Agents with a deadline in `(t − dt, t]`, advancing their counters.
    /// Deadlines are matched with a tolerance of `1e-6·dt` to absorb rounding
    /// in `t`.
    pub fn poll(&mut self, t: T, dt: T, out: &mut Vec<usize>) {
        out.clear();
        let eps = dt * T::lit(1e-6);
        for i in 0..self.counters.len() {
            if t + eps >= self.deadline(i) {
                out.push(i);
                while t + eps >= self.deadline(i) {
                    self.counters[i] += 1;
                }
            }
        }
    }

    pub fn next_deadline(&self, i: usize) -> T {
        self.deadline(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use InfoScenario::*;

    fn state(x: &[f64], reference: &[f64]) -> SimState<f64> {
        let mut s = SimState::new(x.len());
        s.x = x.to_vec();
        s.xhat = reference.to_vec();
        s.x_at_last_global = reference.to_vec();
        s
    }

    #[test]
    fn broadcast_level_rule() {
        let d = 0.8;
        assert!(check_level_broadcast(&state(&[0.3, -0.1], &[0.3, -0.1]), d).is_empty());
        assert_eq!(check_level_broadcast(&state(&[d, 0.5 * d], &[0.0, 0.0]), d), vec![0]);
        assert_eq!(check_level_broadcast(&state(&[d, -d], &[0.0, 0.0]), d), vec![0, 1]);
        // measured relative to the estimate, not the origin
        assert_eq!(check_level_broadcast(&state(&[1.0, 1.0], &[1.0, 0.1]), d), vec![1]);
    }

    #[test]
    fn global_level_rule() {
        let d = 1.04;
        let reset = state(&[0.5, 0.5, 0.5], &[0.5, 0.5, 0.5]);
        assert!(check_level_global(&reset, d).is_empty());
        assert_eq!(check_level_global(&state(&[0.2, -d, 0.1], &[0.0; 3]), d), vec![1]);
        assert!(check_level_global(&state(&[0.2, -1.0, 1.03], &[0.0; 3]), d).is_empty());
    }

    fn run_clock(scheme: TriggerScheme<f64>, n: usize, dt: f64, until: f64) -> Vec<(f64, Vec<usize>)> {
        let mut clock = PeriodicClock::new(&scheme, n).unwrap();
        let mut fired = Vec::new();
        let mut out = Vec::new();
        let steps = (until / dt).round() as u64;
        for k in 1..=steps {
            let t = k as f64 * dt;
            clock.poll(t, dt, &mut out);
            if !out.is_empty() {
                fired.push((t, out.clone()));
            }
        }
        fired
    }

    #[test]
    fn sync_schedule_fires_all_on_multiples() {
        let fired = run_clock(TriggerScheme::PeriodicSync { period: 0.5 }, 3, 0.002, 1.0);
        assert_eq!(fired.len(), 2);
        assert!((fired[1].0 - 1.0).abs() < 1e-12);
        assert_eq!(fired[1].1, vec![0, 1, 2]);
    }

    #[test]
    fn async_schedule_fires_by_phase() {
        let scheme = TriggerScheme::PeriodicAsync {
            period: 0.75,
            offsets: vec![0.0, 0.25, 0.5],
        };
        let fired = run_clock(scheme, 3, 0.002, 1.6);
        let times: Vec<f64> = fired.iter().map(|f| f.0).collect();
        let who: Vec<Vec<usize>> = fired.iter().map(|f| f.1.clone()).collect();
        assert_eq!(who, vec![vec![1], vec![2], vec![0], vec![1], vec![2], vec![0]]);
        for (t, e) in times.iter().zip([0.25, 0.5, 0.75, 1.0, 1.25, 1.5]) {
            assert!((t - e).abs() < 1e-12);
        }
    }

    #[test]
    fn quiet_between_grid_points() {
        let mut clock = PeriodicClock::new(&TriggerScheme::PeriodicSync { period: 0.5 }, 2).unwrap();
        let mut out = Vec::new();
        clock.poll(0.3, 0.002, &mut out);
        assert!(out.is_empty());
        clock.poll(0.498, 0.002, &mut out);
        assert!(out.is_empty());
        clock.poll(0.5, 0.002, &mut out);
        assert_eq!(out, vec![0, 1]);
    }

    #[test]
    fn no_drift_over_a_million_steps() {
        let dt = 0.002;
        let mut clock = PeriodicClock::new(&TriggerScheme::PeriodicSync { period: 0.5 }, 1).unwrap();
        let mut out = Vec::new();
        let mut count = 0;
        for k in 1..=1_000_000u64 {
            clock.poll(k as f64 * dt, dt, &mut out);
            if !out.is_empty() {
                assert_eq!(k % 250, 0, "fired off-grid at step {k}");
                count += 1;
            }
        }
        assert_eq!(count, 4000);
    }

    #[test]
    fn evenly_spread_offsets() {
        match TriggerScheme::periodic_async_even(0.75, 3) {
            TriggerScheme::PeriodicAsync { offsets, .. } => {
                assert_eq!(offsets, vec![0.0, 0.25, 0.5]);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn scenario_compatibility() {
        let lb = TriggerScheme::LevelBroadcast { threshold: 1.0 };
        let lg = TriggerScheme::LevelGlobal { threshold: 1.0 };
        let ps = TriggerScheme::PeriodicSync { period: 0.5 };
        let pa = TriggerScheme::periodic_async_even(0.5, 3);
        assert!(lb.validate(3, BroadcastOnly).is_ok());
        assert!(lb.validate(3, BroadcastPlusLocal).is_err());
        assert!(lg.validate(3, BroadcastPlusLocal).is_ok());
        assert!(lg.validate(3, BroadcastOnly).is_err());
        assert!(ps.validate(3, BroadcastOnly).is_ok());
        assert!(ps.validate(3, BroadcastPlusLocal).is_ok());
        assert!(pa.validate(3, BroadcastOnly).is_ok());
        assert!(pa.validate(3, BroadcastPlusLocal).is_err());
        assert!(pa.validate(4, BroadcastOnly).is_err());
        assert!(TriggerScheme::LevelBroadcast { threshold: 0.0 }
            .validate(3, BroadcastOnly)
            .is_err());
        assert!(TriggerScheme::PeriodicAsync { period: 1.0, offsets: vec![0.0, 1.0] }
            .validate(2, BroadcastOnly)
            .is_err());
    }
}

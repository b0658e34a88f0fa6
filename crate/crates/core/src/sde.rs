//! Fleet state and the Euler–Maruyama primitives.
//!
//! All admissible controllers are impulsive, so between triggering instants
//! the drift is zero and a step is just `x ← x + ΔW`. Impulses are resolved
//! as instantaneous jumps at step boundaries.

use crate::error::{check_len, Result};
use crate::scalar::Scalar;

/// Time, true states, estimates and triggering bookkeeping of one fleet.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T> {
    pub t: T,
    pub x: Vec<T>,
    /// Current estimates `x̂ᵢ`. In both information scenarios every entry
    /// equals the latest consensus point between events; it is also the
    /// reference the level rules measure deviations against.
    pub xhat: Vec<T>,
    pub last_local_trigger: Vec<T>,
    pub last_global_trigger: T,
    pub last_consensus_point: T,
    /// `x` right after the latest global event (broadcast-plus-local scenario).
    pub x_at_last_global: Vec<T>,
}

impl<T: Scalar> SimState<T> {
    /// Fleet of `n` agents initialised in consensus at the origin, `t = 0`.
    pub fn new(n: usize) -> Self {
        Self {
            t: T::zero(),
            x: vec![T::zero(); n],
            xhat: vec![T::zero(); n],
            last_local_trigger: vec![T::zero(); n],
            last_global_trigger: T::zero(),
            last_consensus_point: T::zero(),
            x_at_last_global: vec![T::zero(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `x ← x + dw`, `t ← t + dt`. Estimates are untouched.
    pub fn drift_step(&mut self, dw: &[T], dt: T) -> Result<()> {
        check_len("increment vector", dw.len(), self.n())?;
        for (xi, &d) in self.x.iter_mut().zip(dw) {
            *xi = *xi + d;
        }
        self.t = self.t + dt;
        Ok(())
    }

    /// `x ← x + jumps` at fixed `t`. Bookkeeping is the caller's job.
    pub fn apply_impulse(&mut self, jumps: &[T]) -> Result<()> {
        check_len("jump vector", jumps.len(), self.n())?;
        for (xi, &j) in self.x.iter_mut().zip(jumps) {
            *xi = *xi + j;
        }
        Ok(())
    }

    /// `xᵢ − x̂ᵢ` for every agent.
    pub fn errors(&self) -> Vec<T> {
        self.x.iter().zip(&self.xhat).map(|(&a, &b)| a - b).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseStream;

    #[test]
    fn zero_increment_only_advances_time() {
        let mut s = SimState::<f64>::new(3);
        s.x = vec![0.5, -1.0, 2.0];
        let before = s.clone();
        s.drift_step(&[0.0; 3], 0.002).unwrap();
        assert_eq!(s.x, before.x);
        assert_eq!(s.xhat, before.xhat);
        assert_eq!(s.t, 0.002);
    }

    #[test]
    fn additive_update() {
        let mut s = SimState::<f64>::new(2);
        s.drift_step(&[0.1, -0.2], 0.01).unwrap();
        assert_eq!(s.x, vec![0.1, -0.2]);
    }

    #[test]
    fn telescoping_sum_of_increments() {
        let mut s = SimState::<f64>::new(4);
        let mut noise = NoiseStream::new(2, 0, 4);
        let mut total = vec![0.0; 4];
        for _ in 0..10_000 {
            let dw = noise.wiener_increments(0.002).unwrap();
            for (t, d) in total.iter_mut().zip(&dw) {
                *t += d;
            }
            s.drift_step(&dw, 0.002).unwrap();
        }
        // x starts at 0 and adds increments in the same order, so equality is exact
        assert_eq!(s.x, total);
    }

    #[test]
    fn impulses() {
        let mut s = SimState::<f64>::new(2);
        s.x = vec![1.0, 2.0];
        s.apply_impulse(&[0.0, 0.0]).unwrap();
        assert_eq!(s.x, vec![1.0, 2.0]);
        s.apply_impulse(&[-1.0, -2.0]).unwrap();
        assert_eq!(s.x, vec![0.0, 0.0]);
        let t = s.t;
        assert_eq!(s.t, t);
    }

    #[test]
    fn reset_to_mean() {
        let mut s = SimState::<f64>::new(3);
        s.x = vec![1.0, 0.0, -1.0];
        let mean = s.x.iter().sum::<f64>() / 3.0;
        let jumps: Vec<f64> = s.x.iter().map(|v| mean - v).collect();
        s.apply_impulse(&jumps).unwrap();
        assert_eq!(s.x, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn dimension_checks() {
        let mut s = SimState::<f64>::new(2);
        assert!(s.drift_step(&[0.0], 0.1).is_err());
        assert!(s.apply_impulse(&[0.0, 0.0, 0.0]).is_err());
    }
}

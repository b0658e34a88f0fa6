//! Threshold tuning for the level-triggered schemes.
//!
//! A single agent leaves `[−Δ, Δ]` after `Δ²` seconds on average, so the
//! broadcast-only threshold has a closed form. For the cube `[−Δ, Δ]ⁿ`
//! Brownian scaling gives `E[T(Δ)] = Δ²·m_n` with `m_n` the mean exit time from
//! the unit cube; one Monte-Carlo estimate of `m_n` serves every target.
//!
//! Trial indices of the noise streams are split into disjoint blocks so the
//! estimate, the verification run and the bisection fallback never share
//! paths.

use crate::error::{invalid_arg, Error, Result};
use crate::passage::{estimate_passage, MeanEstimate, PassageParams};
use crate::scalar::Scalar;

const VERIFY_BLOCK: u64 = 1 << 32;
const BISECT_BLOCK: u64 = 1 << 33;
const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMethod {
    ScalingLaw,
    Bisection,
}

impl CalibrationMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::ScalingLaw => "scaling-law",
            Self::Bisection => "bisection",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult<T> {
    pub delta_star: T,
    pub target_t: T,
    /// Verified mean exit time at `delta_star`.
    pub achieved_t: T,
    pub ci_halfwidth: T,
    pub samples_used: usize,
    pub method: CalibrationMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    /// Passages for the unit-cube estimate and for the verification run.
    pub samples: usize,
    /// Passages per bisection iterate (shared across iterates).
    pub bisection_samples: usize,
    pub max_bisection_iters: usize,
    pub dt: f64,
    pub bridge_correction: bool,
    /// Relative tolerance on the verified mean.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self {
            samples: 100_000,
            bisection_samples: 20_000,
            max_bisection_iters: 40,
            dt: 1e-3,
            bridge_correction: true,
            tolerance: 0.03,
            seed: 0x00ca_11b7,
        }
    }
}

impl CalibrationOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance <= 0.2) {
            return invalid_arg(format!("tolerance must lie in (0, 0.2], got {}", self.tolerance));
        }
        if self.samples < 2 || self.bisection_samples < 2 {
            return invalid_arg("calibration needs at least two samples per estimate");
        }
        if !(self.dt > 0.0) {
            return invalid_arg(format!("time step must be positive, got {}", self.dt));
        }
        Ok(())
    }

    fn params<T: Scalar>(&self, n: usize, delta: T) -> PassageParams<T> {
        PassageParams {
            n,
            delta,
            dt: T::lit(self.dt),
            bridge_correction: self.bridge_correction,
        }
    }
}

fn check_target<T: Scalar>(target: T) -> Result<()> {
    if !(target > T::zero()) || !target.is_finite() {
        return invalid_arg(format!("target inter-event time must be positive, got {target}"));
    }
    Ok(())
}

/// Mean exit time `m_n` of `n` Brownian motions from the unit cube.
pub fn unit_cube_exit_time(n: usize, opts: &CalibrationOptions) -> Result<MeanEstimate> {
    opts.validate()?;
    Ok(estimate_passage(&opts.params(n, 1.0f64), opts.seed, 0, opts.samples)?.time)
}

fn verify<T: Scalar>(n: usize, delta: T, opts: &CalibrationOptions) -> Result<MeanEstimate> {
    Ok(estimate_passage(&opts.params(n, delta), opts.seed, VERIFY_BLOCK, opts.samples)?.time)
}

fn within(achieved: f64, target: f64, tol: f64) -> bool {
    (achieved - target).abs() <= tol * target
}

/// Broadcast-only threshold for a per-agent mean inter-event time:
/// `Δ_b = √target`, with the exit time checked by simulation.
pub fn calibrate_delta_b<T: Scalar>(target_t_local: T, opts: &CalibrationOptions) -> Result<CalibrationResult<T>> {
    check_target(target_t_local)?;
    opts.validate()?;
    let delta = target_t_local.sqrt();
    let check = verify(1, delta, opts)?;
    if !within(check.mean, target_t_local.to_f64_lossy(), opts.tolerance) {
        log::warn!(
            "single-agent exit time {:.4} s at delta {delta} is off target {target_t_local} s",
            check.mean
        );
    }
    Ok(CalibrationResult {
        delta_star: delta,
        target_t: target_t_local,
        achieved_t: T::lit(check.mean),
        ci_halfwidth: T::lit(Z_95 * check.std_error),
        samples_used: check.samples,
        method: CalibrationMethod::ScalingLaw,
    })
}

/// Bisection on `Δ ↦ E[T(Δ)]` with one fixed set of paths for every iterate,
/// which makes the estimated map monotone. Returns the threshold and the
/// number of passages simulated.
pub fn bisect_delta_bl<T: Scalar>(n: usize, target_t_global: T, guess: T, opts: &CalibrationOptions) -> Result<(T, usize)> {
    check_target(target_t_global)?;
    opts.validate()?;
    if n == 0 {
        return invalid_arg("need at least one agent");
    }
    let target = target_t_global.to_f64_lossy();
    let mut used = 0usize;
    let mut mean_at = |d: f64| -> Result<f64> {
        used += opts.bisection_samples;
        Ok(estimate_passage(&opts.params(n, d), opts.seed, BISECT_BLOCK, opts.bisection_samples)?
            .time
            .mean)
    };
    let g = guess.to_f64_lossy();
    let mut g = if g > 0.0 && g.is_finite() { g } else { target.sqrt() };
    let (mut lo, mut hi) = (g, g);
    let mut f_lo = mean_at(lo)?;
    while f_lo > target {
        lo *= 0.5;
        f_lo = mean_at(lo)?;
    }
    let mut f_hi = f_lo;
    while f_hi < target {
        hi *= 2.0;
        f_hi = mean_at(hi)?;
    }
    if lo == hi {
        lo = hi * 0.5;
    }
    for _ in 0..opts.max_bisection_iters {
        g = 0.5 * (lo + hi);
        let f = mean_at(g)?;
        if (f - target).abs() <= 0.1 * opts.tolerance * target || hi / lo < 1.0 + 1e-6 {
            break;
        }
        if f < target {
            lo = g;
        } else {
            hi = g;
        }
    }
    Ok((T::lit(g), used))
}

/// Threshold on `|x_i(t) − x_i(t_k)|` whose merged event sequence has mean
/// inter-event time `target_t_global` for `n` agents.
///
/// Tries the scaling law first, falls back to bisection, and fails if neither
/// passes verification within `opts.tolerance`.
pub fn calibrate_delta_bl<T: Scalar>(n: usize, target_t_global: T, opts: &CalibrationOptions) -> Result<CalibrationResult<T>> {
    check_target(target_t_global)?;
    opts.validate()?;
    if n == 0 {
        return invalid_arg("need at least one agent");
    }
    let target = target_t_global.to_f64_lossy();
    let m = unit_cube_exit_time(n, opts)?;
    let mut used = m.samples;
    let scaled = T::lit((target / m.mean).sqrt());
    log::debug!("n = {n}: unit-cube exit time {:.5} ± {:.5}", m.mean, m.std_error);

    let check = verify(n, scaled, opts)?;
    used += check.samples;
    if within(check.mean, target, opts.tolerance) {
        return Ok(CalibrationResult {
            delta_star: scaled,
            target_t: target_t_global,
            achieved_t: T::lit(check.mean),
            ci_halfwidth: T::lit(Z_95 * check.std_error),
            samples_used: used,
            method: CalibrationMethod::ScalingLaw,
        });
    }
    log::warn!(
        "scaling-law threshold {scaled} gives {:.4} s against {target} s, bisecting",
        check.mean
    );

    let (bisected, spent) = bisect_delta_bl(n, target_t_global, scaled, opts)?;
    used += spent;
    let check = verify(n, bisected, opts)?;
    used += check.samples;
    if within(check.mean, target, opts.tolerance) {
        return Ok(CalibrationResult {
            delta_star: bisected,
            target_t: target_t_global,
            achieved_t: T::lit(check.mean),
            ci_halfwidth: T::lit(Z_95 * check.std_error),
            samples_used: used,
            method: CalibrationMethod::Bisection,
        });
    }
    Err(Error::CalibrationFailed {
        reason: "verified mean exit time outside tolerance".into(),
        target_t: target,
        achieved_t: check.mean,
        delta: bisected.to_f64_lossy(),
        samples_used: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(samples: usize) -> CalibrationOptions {
        CalibrationOptions {
            samples,
            bisection_samples: samples,
            dt: 2e-3,
            ..CalibrationOptions::default()
        }
    }

    #[test]
    fn broadcast_threshold_is_the_square_root() {
        let opts = quick(4_000);
        let r = calibrate_delta_b(1.5f64, &opts).unwrap();
        assert!((r.delta_star - 1.224_744_871).abs() < 1e-8);
        let r = calibrate_delta_b(0.75f64, &opts).unwrap();
        assert!((r.delta_star - 0.866_025_404).abs() < 1e-8);
        let r = calibrate_delta_b(1.0f64, &opts).unwrap();
        assert_eq!(r.delta_star, 1.0);
        assert!((r.achieved_t - 1.0).abs() < 4.0 * r.ci_halfwidth / Z_95 + 0.01);
        assert!(calibrate_delta_b(0.0f64, &opts).is_err());
        assert!(calibrate_delta_b(-1.0f64, &opts).is_err());
    }

    #[test]
    fn single_agent_cube_time_is_one() {
        let m = unit_cube_exit_time(1, &quick(20_000)).unwrap();
        assert!((m.mean - 1.0).abs() < 0.02, "m_1 = {}", m.mean);
    }

    #[test]
    fn cube_time_decreases_with_agents() {
        let opts = quick(5_000);
        let ms: Vec<f64> = [1, 2, 3, 5, 10, 20]
            .iter()
            .map(|&n| unit_cube_exit_time(n, &opts).unwrap().mean)
            .collect();
        assert!(ms.windows(2).all(|w| w[1] < w[0]), "{ms:?}");
    }

    #[test]
    fn one_agent_reduces_to_the_square_root() {
        let r = calibrate_delta_bl(1, 1.0f64, &quick(20_000)).unwrap();
        assert!((r.delta_star - 1.0).abs() < 0.02);
        assert_eq!(r.method, CalibrationMethod::ScalingLaw);
        assert!((r.achieved_t - 1.0).abs() <= 0.03);
    }

    #[test]
    fn reproducible_bit_for_bit() {
        let opts = quick(3_000);
        let a = calibrate_delta_bl(4, 0.5f64, &opts).unwrap();
        let b = calibrate_delta_bl(4, 0.5f64, &opts).unwrap();
        assert_eq!(a.delta_star.to_bits(), b.delta_star.to_bits());
        assert_eq!(a, b);
    }

    #[test]
    fn scaling_law_agrees_with_bisection() {
        let opts = quick(10_000);
        for n in [2, 5, 10] {
            let r = calibrate_delta_bl(n, 0.5f64, &opts).unwrap();
            let (b, _) = bisect_delta_bl(n, 0.5f64, 1.0, &opts).unwrap();
            // each side carries ~1% relative error on the mean time, half that on Δ
            let rel = (r.delta_star / b - 1.0).abs();
            assert!(rel < 0.02, "n = {n}: scaling {} vs bisection {b}", r.delta_star);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut opts = quick(100);
        assert!(calibrate_delta_bl(0, 0.5f64, &opts).is_err());
        assert!(calibrate_delta_bl(3, 0.0f64, &opts).is_err());
        opts.tolerance = 0.5;
        assert!(calibrate_delta_bl(3, 0.5f64, &opts).is_err());
        opts.tolerance = 0.0;
        assert!(calibrate_delta_bl(3, 0.5f64, &opts).is_err());
    }

    #[test]
    fn impossible_tolerance_reports_diagnostics() {
        // a tiny budget at a coarse step cannot hit a 0.01 % band
        let opts = CalibrationOptions {
            samples: 50,
            bisection_samples: 50,
            max_bisection_iters: 3,
            dt: 2e-2,
            bridge_correction: false,
            tolerance: 1e-4,
            seed: 9,
        };
        match calibrate_delta_bl(3, 0.5f64, &opts) {
            Err(Error::CalibrationFailed {
                target_t, samples_used, ..
            }) => {
                assert_eq!(target_t, 0.5);
                assert!(samples_used > 100);
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }
}

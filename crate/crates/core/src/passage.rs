//! First-exit times of Brownian motions from `[−Δ, Δ]` and from the cube
//! `[−Δ, Δ]ⁿ`, simulated on a fixed grid.
//!
//! Plain grid monitoring only sees the path at step ends and so reports
//! exits late. With `bridge_correction` each step is also tested against the
//! Brownian-bridge probability of having touched either level in between,
//! `exp(−2(Δ − a)(Δ − b)/dt)` for the upper level and its mirror for the
//! lower one; a detected exit is then placed at the middle of its step.

use rayon::prelude::*;

use crate::error::{invalid_arg, Result};
use crate::noise::NoiseStream;
use crate::scalar::Scalar;

/// Exit time and the occupation integral `∫₀^τ B₁(t)² dt` of agent 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Passage<T> {
    pub time: T,
    pub occupation: T,
}

/// Grid and accuracy settings for the samplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageParams<T> {
    pub n: usize,
    pub delta: T,
    pub dt: T,
    pub bridge_correction: bool,
}

impl<T: Scalar> PassageParams<T> {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return invalid_arg("passage sampler needs at least one agent");
        }
        if !(self.delta > T::zero()) || !self.delta.is_finite() {
            return invalid_arg(format!("threshold must be positive, got {}", self.delta));
        }
        if !(self.dt > T::zero()) {
            return invalid_arg(format!("time step must be positive, got {}", self.dt));
        }
        Ok(())
    }
}

/// Probability that a Brownian bridge from `a` to `b` over `dt` leaves
/// `(−delta, delta)`; both endpoints are assumed inside.
#[inline]
fn bridge_exit_probability<T: Scalar>(a: T, b: T, delta: T, dt: T) -> f64 {
    // exp(−36) ≈ 2e−16, below the resolution of the uniforms
    let cutoff = T::lit(36.0);
    let two = T::lit(2.0);
    let q_up = two * (delta - a) * (delta - b) / dt;
    let q_lo = two * (delta + a) * (delta + b) / dt;
    let p_up = if q_up < cutoff { (-q_up).exp().to_f64_lossy() } else { 0.0 };
    let p_lo = if q_lo < cutoff { (-q_lo).exp().to_f64_lossy() } else { 0.0 };
    1.0 - (1.0 - p_up) * (1.0 - p_lo)
}

/// One joint exit of the first `params.n` agents of `stream`.
pub fn sample_passage<T: Scalar>(stream: &mut NoiseStream, params: &PassageParams<T>) -> Result<Passage<T>> {
    params.validate()?;
    let n = params.n;
    if stream.n() < n {
        return invalid_arg(format!("stream has {} agents, {n} requested", stream.n()));
    }
    let PassageParams {
        delta,
        dt,
        bridge_correction,
        ..
    } = *params;
    let sd = dt.sqrt();
    let mut x = vec![T::zero(); n];
    let mut occupation = T::zero();
    let mut step: u64 = 0;
    loop {
        step += 1;
        let x0_prev = x[0];
        let mut exited = false;
        for (i, xi) in x.iter_mut().enumerate() {
            let a = *xi;
            let b = a + sd * stream.standard_normal::<T>(i);
            *xi = b;
            if b.abs() >= delta {
                exited = true;
            } else if bridge_correction && !exited {
                let p = bridge_exit_probability(a, b, delta, dt);
                if p > 0.0 && stream.bridge_uniform(i, step) < p {
                    exited = true;
                }
            }
        }
        occupation = occupation + x0_prev * x0_prev * dt;
        if exited {
            let steps = T::from_u64(step).expect("step count fits");
            let time = if bridge_correction {
                occupation = occupation - x0_prev * x0_prev * dt * T::lit(0.5);
                (steps - T::lit(0.5)) * dt
            } else {
                steps * dt
            };
            return Ok(Passage { time, occupation });
        }
    }
}

/// Exit time of a single standard Brownian motion from `[−delta, delta]`.
pub fn sample_first_passage_single<T: Scalar>(
    stream: &mut NoiseStream,
    delta: T,
    dt: T,
    bridge_correction: bool,
) -> Result<T> {
    let params = PassageParams {
        n: 1,
        delta,
        dt,
        bridge_correction,
    };
    Ok(sample_passage(stream, &params)?.time)
}

/// Exit time of `n` independent Brownian motions from `[−delta, delta]ⁿ`,
/// i.e. the earliest of their individual exits, sampled jointly.
pub fn sample_first_passage_min<T: Scalar>(
    stream: &mut NoiseStream,
    n: usize,
    delta: T,
    dt: T,
    bridge_correction: bool,
) -> Result<T> {
    let params = PassageParams {
        n,
        delta,
        dt,
        bridge_correction,
    };
    Ok(sample_passage(stream, &params)?.time)
}

/// Sample mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MeanEstimate {
    pub fn from_samples(values: &[f64]) -> Self {
        let k = values.len();
        let mean = values.iter().sum::<f64>() / k as f64;
        let var = if k > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64
        } else {
            0.0
        };
        Self {
            mean,
            std_error: (var / k as f64).sqrt(),
            samples: k,
        }
    }
}

/// Monte-Carlo summary of many independent passages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassageEstimate {
    pub time: MeanEstimate,
    pub occupation: MeanEstimate,
}

/// Averages `samples` passages whose streams use trial indices
/// `first_index..first_index + samples`. Results are independent of the
/// worker count.
pub fn estimate_passage<T: Scalar>(
    params: &PassageParams<T>,
    seed: u64,
    first_index: u64,
    samples: usize,
) -> Result<PassageEstimate> {
    params.validate()?;
    if samples == 0 {
        return invalid_arg("need at least one passage sample");
    }
    let draws: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut stream = NoiseStream::new(seed, first_index + k, params.n);
            sample_passage(&mut stream, params)
                .map(|p| (p.time.to_f64_lossy(), p.occupation.to_f64_lossy()))
        })
        .collect::<Result<_>>()?;
    let times: Vec<f64> = draws.iter().map(|d| d.0).collect();
    let occ: Vec<f64> = draws.iter().map(|d| d.1).collect();
    Ok(PassageEstimate {
        time: MeanEstimate::from_samples(&times),
        occupation: MeanEstimate::from_samples(&occ),
    })
}

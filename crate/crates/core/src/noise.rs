//! Seeded, splittable Wiener-increment source.
//!
//! Each `(seed, trial_index, agent)` triple owns its own ChaCha8 stream, so
//! trials can run on any worker in any order and adding agents never perturbs
//! the paths of existing ones (common random numbers across fleet sizes).
//! Auxiliary uniforms for bridge-crossing tests come from a stateless hash of
//! `(seed, trial, agent, step)`, which keeps the Gaussian streams aligned no
//! matter how many uniforms a caller consumes.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{check_len, invalid_arg, Result};
use crate::scalar::Scalar;

const AGENT_BITS: u32 = 24;

#[derive(Debug, Clone)]
pub struct NoiseStream {
    seed: u64,
    trial_index: u64,
    gain: f64,
    agents: Vec<ChaCha8Rng>,
}

impl NoiseStream {
    /// Stream for `n` agents. `trial_index` must fit in 40 bits and `n` in 24.
    pub fn new(seed: u64, trial_index: u64, n: usize) -> Self {
        assert!(n < (1 << AGENT_BITS), "too many agents for one stream");
        assert!(trial_index < (1 << (64 - AGENT_BITS)), "trial index out of range");
        let base = ChaCha8Rng::seed_from_u64(seed);
        let agents = (0..n as u64)
            .map(|agent| {
                let mut rng = base.clone();
                rng.set_stream((trial_index << AGENT_BITS) | agent);
                rng
            })
            .collect();
        Self {
            seed,
            trial_index,
            gain: 1.0,
            agents,
        }
    }

    /// Same stream with every Gaussian draw negated (the mirrored path `−W`).
    /// Bridge uniforms are unaffected.
    pub fn sign_flipped(mut self) -> Self {
        self.gain = -self.gain;
        self
    }

    /// Same stream with every Gaussian draw replaced by zero. Draws are still
    /// consumed, so the substreams stay aligned with the noisy version.
    pub fn silenced(mut self) -> Self {
        self.gain = 0.0;
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn trial_index(&self) -> u64 {
        self.trial_index
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    /// One N(0, 1) draw from `agent`'s substream.
    #[inline]
    pub fn standard_normal<T: Scalar>(&mut self, agent: usize) -> T {
        let z = T::standard_normal(&mut self.agents[agent]);
        if self.gain == 1.0 {
            z
        } else {
            z * T::lit(self.gain)
        }
    }

    /// Fresh vector of `n` independent N(0, dt) increments.
    pub fn wiener_increments<T: Scalar>(&mut self, dt: T) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); self.n()];
        self.fill_increments(dt, &mut out)?;
        Ok(out)
    }

    /// In-place variant of [`wiener_increments`](Self::wiener_increments);
    /// `out` must have one slot per agent.
    pub fn fill_increments<T: Scalar>(&mut self, dt: T, out: &mut [T]) -> Result<()> {
        if !(dt > T::zero()) {
            return invalid_arg(format!("time step must be positive, got {dt}"));
        }
        check_len("increment buffer", out.len(), self.n())?;
        let sd = dt.sqrt();
        for (agent, slot) in out.iter_mut().enumerate() {
            *slot = sd * self.standard_normal::<T>(agent);
        }
        Ok(())
    }

    /// Uniform in `[0, 1)` keyed on `(agent, step)`; pure function of the key.
    #[inline]
    pub fn bridge_uniform(&self, agent: usize, step: u64) -> f64 {
        let mut h = splitmix64(self.seed ^ 0x5851_f42d_4c95_7f2d);
        h = splitmix64(h ^ self.trial_index);
        h = splitmix64(h ^ agent as u64);
        h = splitmix64(h ^ step);
        (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

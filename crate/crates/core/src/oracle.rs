//! Closed-form costs and rate conversions.
//!
//! `n` is the fleet size, "local" periods are per-agent inter-event times and
//! "global" periods are inter-event times of the merged event sequence.

use crate::scalar::Scalar;

fn pairs<T: Scalar>(n: usize) -> T {
    T::from_usize_lossy(n) * T::from_usize_lossy(n.saturating_sub(1))
}

/// Periodic cost with broadcast-only information: `n(n−1)·T_local/2`.
/// Holds for synchronous and any asynchronous phase pattern.
pub fn j_tt_b<T: Scalar>(n: usize, t_local: T) -> T {
    pairs::<T>(n) * t_local / T::lit(2.0)
}

/// Level-triggered cost with broadcast-only information:
/// `n(n−1)·Δ²/6`, using `E[T] = Δ²` for the exit time from `[−Δ, Δ]`.
pub fn j_et_b<T: Scalar>(n: usize, delta_b: T) -> T {
    pairs::<T>(n) * expected_exit_time_single(delta_b) / T::lit(6.0)
}

/// Periodic cost with local state at global instants: `n(n−1)·T_global/2`.
pub fn j_tt_bl<T: Scalar>(n: usize, t_global: T) -> T {
    pairs::<T>(n) * t_global / T::lit(2.0)
}

/// `E[T] = Δ²` for one standard Brownian motion leaving `[−Δ, Δ]`.
pub fn expected_exit_time_single<T: Scalar>(delta: T) -> T {
    delta * delta
}

/// `E[∫₀^T B(t)² dt] = Δ⁴/6` up to the exit of `[−Δ, Δ]`.
pub fn expected_occupation_integral<T: Scalar>(delta: T) -> T {
    delta.powi(4) / T::lit(6.0)
}

/// Global period that matches the triggering rate of `n` agents each firing
/// every `t_local`: `T_local/n`.
pub fn rate_match_local_to_global<T: Scalar>(n: usize, t_local: T) -> T {
    t_local / T::from_usize_lossy(n)
}

/// Inverse of [`rate_match_local_to_global`].
pub fn rate_match_global_to_local<T: Scalar>(n: usize, t_global: T) -> T {
    t_global * T::from_usize_lossy(n)
}

/// Cost ratio of the two periodic schemes at equal global rate; equals `n`.
pub fn tt_information_gap(n: usize) -> f64 {
    n as f64
}

/// The same gap evaluated through the cost formulas,
/// `j_tt_b(n, n·T) / j_tt_bl(n, T)`. Undefined (NaN) for `n = 1`.
pub fn tt_information_gap_checked<T: Scalar>(n: usize, t_global: T) -> T {
    j_tt_b(n, rate_match_global_to_local(n, t_global)) / j_tt_bl(n, t_global)
}

/// Level vs periodic cost at equal local rate, broadcast-only: `1/3`.
pub fn broadcast_consistency_ratio<T: Scalar>(n: usize, delta_b: T) -> T {
    j_et_b(n, delta_b) / j_tt_b(n, expected_exit_time_single(delta_b))
}

/// Broadcast-only level cost normalised by the broadcast-plus-local periodic
/// cost at equal global rate: `n/3`.
pub fn broadcast_et_over_local_tt<T: Scalar>(n: usize, delta_b: T) -> T {
    let t_global = rate_match_local_to_global(n, expected_exit_time_single(delta_b));
    j_et_b(n, delta_b) / j_tt_bl(n, t_global)
}

//! Cost estimation from simulated trajectories.
//!
//! Two estimators of the same long-run average are kept side by side:
//!
//! * the time average `(1/M)·∫₀^M xᵀLx dt` (left-endpoint rectangles), and
//! * the renewal-reward estimate `n(n−1)·E[y]/E[τ]`, where each renewal cycle
//!   of one agent contributes `y = ∫ rᵢ(t)² dt` over the cycle and `τ` is its
//!   length. `rᵢ` is the agent's deviation from its own last reset: its
//!   estimation error under broadcast-only information, its displacement since
//!   the last global event otherwise. The trailing incomplete cycle is dropped.

use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::error::{invalid_arg, Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct CostAccumulator<T> {
    n: usize,
    integral_sum: T,
    elapsed: T,
    per_renewal_costs: Vec<T>,
    per_renewal_lengths: Vec<T>,
    local_event_counts: Vec<u64>,
    global_event_count: u64,
    open_cost: Vec<T>,
    open_start: Vec<T>,
}

impl<T: Scalar> CostAccumulator<T> {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            integral_sum: T::zero(),
            elapsed: T::zero(),
            per_renewal_costs: Vec::new(),
            per_renewal_lengths: Vec::new(),
            local_event_counts: vec![0; n],
            global_event_count: 0,
            open_cost: vec![T::zero(); n],
            open_start: vec![T::zero(); n],
        }
    }

    /// Adds `cost_value·dt` to the integral.
    pub fn accumulate(&mut self, cost_value: T, dt: T) -> Result<()> {
        if !(cost_value >= T::zero()) {
            return invalid_arg(format!("cost must be nonnegative, got {cost_value}"));
        }
        if !(dt > T::zero()) {
            return invalid_arg(format!("time step must be positive, got {dt}"));
        }
        self.accumulate_unchecked(cost_value, dt);
        Ok(())
    }

    #[inline]
    pub(crate) fn accumulate_unchecked(&mut self, cost_value: T, dt: T) {
        self.integral_sum = self.integral_sum + cost_value * dt;
        self.elapsed = self.elapsed + dt;
    }

    /// Adds `deviation²·dt` to agent `i`'s open renewal cycle.
    #[inline]
    pub(crate) fn accumulate_deviation(&mut self, i: usize, deviation: T, dt: T) {
        self.open_cost[i] = self.open_cost[i] + deviation * deviation * dt;
    }

    /// Closes agent `i`'s open cycle at time `now` and starts a new one.
    pub(crate) fn close_renewal(&mut self, i: usize, now: T) {
        self.per_renewal_costs.push(self.open_cost[i]);
        self.per_renewal_lengths.push(now - self.open_start[i]);
        self.open_cost[i] = T::zero();
        self.open_start[i] = now;
    }

    pub(crate) fn record_event(&mut self, initiators: &[usize]) {
        self.global_event_count += 1;
        for &i in initiators {
            self.local_event_counts[i] += 1;
        }
    }

    /// Folds `other` into `self`. Open cycles of both sides are discarded.
    pub fn merge(&mut self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return invalid_arg(format!("cannot merge fleets of {} and {} agents", self.n, other.n));
        }
        self.integral_sum = self.integral_sum + other.integral_sum;
        self.elapsed = self.elapsed + other.elapsed;
        self.per_renewal_costs.extend_from_slice(&other.per_renewal_costs);
        self.per_renewal_lengths.extend_from_slice(&other.per_renewal_lengths);
        for (a, b) in self.local_event_counts.iter_mut().zip(&other.local_event_counts) {
            *a += b;
        }
        self.global_event_count += other.global_event_count;
        self.open_cost.iter_mut().for_each(|c| *c = T::zero());
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn integral_sum(&self) -> T {
        self.integral_sum
    }
    pub fn elapsed(&self) -> T {
        self.elapsed
    }
    pub fn per_renewal_costs(&self) -> &[T] {
        &self.per_renewal_costs
    }
    pub fn per_renewal_lengths(&self) -> &[T] {
        &self.per_renewal_lengths
    }
    pub fn local_event_counts(&self) -> &[u64] {
        &self.local_event_counts
    }
    pub fn global_event_count(&self) -> u64 {
        self.global_event_count
    }

    /// `integral_sum / elapsed`.
    pub fn time_average(&self) -> Result<T> {
        if !(self.elapsed > T::zero()) {
            return Err(Error::InvalidState("no time has elapsed".into()));
        }
        Ok(self.integral_sum / self.elapsed)
    }

    /// Renewal-reward estimate from the completed cycles, if any.
    pub fn renewal_estimate(&self) -> Option<T> {
        renewal_ratio(self.n, &self.per_renewal_costs, &self.per_renewal_lengths)
    }
}

fn renewal_ratio<T: Scalar>(n: usize, costs: &[T], lengths: &[T]) -> Option<T> {
    let total_len = lengths.iter().copied().sum::<T>();
    if costs.is_empty() || !(total_len > T::zero()) {
        return None;
    }
    let pairs = T::from_usize_lossy(n) * T::from_usize_lossy(n.saturating_sub(1));
    Some(pairs * costs.iter().copied().sum::<T>() / total_len)
}

/// Two-sided 97.5% Student-t quantile; `df = 0` gives `NaN`.
pub fn t_quantile_975(df: usize) -> f64 {
    if df == 0 {
        return f64::NAN;
    }
    if df > 10_000 {
        // statrs' inverse loses accuracy here; first-order expansion around z
        let z = Normal::standard().inverse_cdf(0.975);
        return z + (z * z * z + z) / (4.0 * df as f64);
    }
    StudentsT::new(0.0, 1.0, df as f64)
        .expect("valid t distribution")
        .inverse_cdf(0.975)
}

/// Mean, standard error and 95% half-width of a set of per-trial values.
fn summarize(values: &[f64]) -> (f64, f64, f64) {
    let k = values.len();
    let mean = values.iter().sum::<f64>() / k as f64;
    if k < 2 {
        return (mean, 0.0, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1) as f64;
    let se = (var / k as f64).sqrt();
    (mean, se, t_quantile_975(k - 1) * se)
}

/// Summary of a batch of independent trials.
#[derive(Debug, Clone, PartialEq)]
pub struct CostReport<T> {
    pub n: usize,
    pub trials: usize,
    /// Mean over trials of each trial's time average.
    pub j_time_avg: T,
    pub std_error: T,
    /// 95% half-width for `j_time_avg` across trials (0 for a single trial).
    pub ci_halfwidth: T,
    /// Pooled renewal-reward estimate (`NaN` if no cycle completed).
    pub j_renewal: T,
    pub renewal_ci_halfwidth: T,
    /// `n·M/(local events)`, per-agent mean inter-event time.
    pub mean_local_interevent: T,
    /// `M/(global events)`.
    pub mean_global_interevent: T,
    pub trial_costs: Vec<T>,
}

impl<T: Scalar> CostReport<T> {
    /// Finalises a batch. Every trial must have nonzero elapsed time.
    pub fn from_trials(trials: &[CostAccumulator<T>]) -> Result<Self> {
        let first = trials
            .first()
            .ok_or_else(|| Error::InvalidArgument("no trials to finalise".into()))?;
        let n = first.n;
        let mut trial_costs = Vec::with_capacity(trials.len());
        let mut renewal_per_trial = Vec::new();
        let mut pooled = CostAccumulator::new(n);
        for acc in trials {
            trial_costs.push(acc.time_average()?);
            if let Some(r) = acc.renewal_estimate() {
                renewal_per_trial.push(r.to_f64_lossy());
            }
            pooled.merge(acc)?;
        }
        let as_f64: Vec<f64> = trial_costs.iter().map(|v| v.to_f64_lossy()).collect();
        let (mean, se, ci) = summarize(&as_f64);
        let renewal_ci = if renewal_per_trial.is_empty() {
            f64::NAN
        } else {
            summarize(&renewal_per_trial).2
        };
        let local_events: u64 = pooled.local_event_counts.iter().sum();
        let per_event = |count: u64, scale: usize| {
            if count == 0 {
                T::infinity()
            } else {
                pooled.elapsed * T::from_usize_lossy(scale) / T::from_u64(count).expect("count fits")
            }
        };
        Ok(Self {
            n,
            trials: trials.len(),
            j_time_avg: T::lit(mean),
            std_error: T::lit(se),
            ci_halfwidth: T::lit(ci),
            j_renewal: pooled.renewal_estimate().unwrap_or_else(T::nan),
            renewal_ci_halfwidth: T::lit(renewal_ci),
            mean_local_interevent: per_event(local_events, n),
            mean_global_interevent: per_event(pooled.global_event_count, 1),
            trial_costs,
        })
    }
}

/// Difference `a − b` of two independent batch means with a Welch 95% half-width.
pub fn difference_ci<T: Scalar>(a: &CostReport<T>, b: &CostReport<T>) -> (f64, f64) {
    let diff = a.j_time_avg.to_f64_lossy() - b.j_time_avg.to_f64_lossy();
    let va = a.std_error.to_f64_lossy().powi(2);
    let vb = b.std_error.to_f64_lossy().powi(2);
    let var = va + vb;
    if var == 0.0 {
        return (diff, 0.0);
    }
    let da = (a.trials.max(2) - 1) as f64;
    let db = (b.trials.max(2) - 1) as f64;
    let df = var * var / (va * va / da + vb * vb / db);
    let df = (df.floor() as usize).max(1);
    (diff, t_quantile_975(df) * var.sqrt())
}

//! Law of the density value `f_p(U)` for greedy strategies.
//!
//! Extreme strategies are characterised by `f_p(U)` having the same law as
//! `f_MAX(U) = D·U^{D-1}`, i.e. `P(f ≤ t) = (t/D)^{1/(D-1)}` on `[0, D]`.

use super::scored::{sigma_scored_mc, ScoredStrategy};
use crate::error::{contract, Result};

/// Empirical law of density values, each value carrying equal mass.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueDistribution {
    values: Vec<f64>,
}

impl ValueDistribution {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return contract("value distribution needs finite values");
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    /// Sorted values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cdf(&self, t: f64) -> f64 {
        self.values.partition_point(|&v| v <= t) as f64 / self.values.len() as f64
    }

    /// Kolmogorov–Smirnov distance to a continuous reference cdf.
    pub fn sup_deviation(&self, reference: impl Fn(f64) -> f64) -> f64 {
        let n = self.values.len() as f64;
        let mut worst: f64 = 0.0;
        for (i, &v) in self.values.iter().enumerate() {
            let f = reference(v);
            worst = worst.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
        }
        worst
    }

    /// Sup deviation from the law of `f_MAX(U)` for `D` samples per trial.
    pub fn deviation_from_extreme_law(&self, d: usize) -> f64 {
        self.sup_deviation(|t| max_density_law(t, d))
    }
}

/// `P(f_MAX(U) ≤ t) = (t/D)^{1/(D-1)}` clamped to `[0,1]`; a unit step for `D = 1`.
pub fn max_density_law(t: f64, d: usize) -> f64 {
    if d <= 1 {
        return if t >= 1.0 { 1.0 } else { 0.0 };
    }
    if t <= 0.0 {
        return 0.0;
    }
    (t / d as f64).powf(1.0 / (d as f64 - 1.0)).min(1.0)
}

/// Estimates the density on `m` bins by Monte Carlo and returns the law of its value at a uniform point.
pub fn density_value_distribution(
    strategy: &ScoredStrategy,
    d: usize,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<ValueDistribution> {
    if n < 10_000 {
        return contract("at least 10^4 trials are needed to estimate a density");
    }
    let sigma = sigma_scored_mc(strategy, d, n, m, seed)?;
    ValueDistribution::new(sigma.weights().iter().map(|w| w * m as f64).collect())
}

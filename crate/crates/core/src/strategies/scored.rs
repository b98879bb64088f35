//! Greedy strategies: keep the value maximising a score, lowest index on ties.

use rayon::prelude::*;

use crate::error::{contract, Error, Result};
use crate::measures::{bin_index, BinnedMeasure};
use crate::rng;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum Score {
    /// `s(u) = u`, the MAX strategy.
    Identity,
    /// `s(u) = |u - ½|`.
    Vee,
    /// Piecewise constant on equal bins of `[0,1]`.
    Bins(Vec<f64>),
}

impl Score {
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Score::Identity => u,
            Score::Vee => (u - 0.5).abs(),
            Score::Bins(v) => v[bin_index(u, v.len())],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredStrategy {
    score: Score,
}

impl ScoredStrategy {
    pub fn new(score: Score) -> Result<Self> {
        if let Score::Bins(v) = &score {
            if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                return contract("score bins must be a nonempty list of finite numbers");
            }
        }
        Ok(Self { score })
    }

    pub fn max() -> Self {
        Self { score: Score::Identity }
    }

    pub fn vee() -> Self {
        Self { score: Score::Vee }
    }

    pub fn score(&self) -> &Score {
        &self.score
    }

    /// Position of the highest score; the lowest index wins ties.
    pub fn choose(&self, row: &[f64]) -> Result<usize> {
        if row.is_empty() {
            return Err(Error::Domain("empty row".into()));
        }
        let mut best = 0;
        let mut best_score = f64::NEG_INFINITY;
        for (j, &u) in row.iter().enumerate() {
            if !(0.0..=1.0).contains(&u) {
                return Err(Error::Domain(format!("value {u} outside [0,1]")));
            }
            let s = self.score.eval(u);
            if s > best_score {
                best = j;
                best_score = s;
            }
        }
        Ok(best)
    }

    /// Closed-form cdf of the kept value when one is known.
    pub fn closed_form_cdf(&self, y: f64, d: usize) -> Option<f64> {
        let y = y.clamp(0.0, 1.0);
        let d = d as i32;
        match &self.score {
            Score::Identity => Some(y.powi(d)),
            // |U - ½| is uniform on [0, ½]; the kept value is the farthest, on either side.
            Score::Vee if y < 0.5 => Some(0.5 * (1.0 - (1.0 - 2.0 * y).powi(d))),
            Score::Vee => Some(0.5 + 0.5 * (2.0 * y - 1.0).powi(d)),
            // Constant score: always position 1, a plain uniform draw.
            Score::Bins(v) if v.iter().all(|&x| x == v[0]) => Some(y),
            Score::Bins(_) => None,
        }
    }
}

/// `P(X <= y) = y^D` for the law of the maximum of `D` uniforms.
pub fn sigma_max_cdf<F: Real>(y: F, d: usize) -> F {
    y.powi(d as i32)
}

const MC_CHUNK: usize = 1 << 16;

/// Monte Carlo estimate of the kept-value law over `n` independent trials, binned.
pub fn sigma_scored_mc(strategy: &ScoredStrategy, d: usize, n: usize, m: usize, seed: u64) -> Result<BinnedMeasure<f64>> {
    use rand::Rng;
    if n == 0 || d == 0 || m == 0 {
        return contract("sample count, D and bin count must be positive");
    }
    let chunks = n.div_ceil(MC_CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, rng::DOMAIN_MONTE_CARLO, c as u64);
            let len = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut counts = vec![0u64; m];
            let mut row = vec![0.0; d];
            for _ in 0..len {
                row.iter_mut().for_each(|u| *u = r.gen());
                let j = strategy.choose(&row).expect("uniform draws lie in [0,1]");
                counts[bin_index(row[j], m)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; m],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    BinnedMeasure::new(counts.into_iter().map(|c| c as f64 / n as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choose_examples() {
        assert_eq!(ScoredStrategy::max().choose(&[0.2, 0.9]).unwrap(), 1);
        assert_eq!(ScoredStrategy::vee().choose(&[0.5, 0.1]).unwrap(), 1);
        let flat = ScoredStrategy::new(Score::Bins(vec![1.0; 4])).unwrap();
        assert_eq!(flat.choose(&[0.7, 0.1, 0.9]).unwrap(), 0);
        assert!(ScoredStrategy::max().choose(&[0.2, 1.5]).is_err());
        assert!(ScoredStrategy::new(Score::Bins(vec![])).is_err());
    }

    #[test]
    fn max_cdf_values() {
        assert_eq!(sigma_max_cdf(0.0f64, 3), 0.0);
        assert_eq!(sigma_max_cdf(1.0f64, 3), 1.0);
        assert_eq!(sigma_max_cdf(0.5f64, 2), 0.25);
        assert_eq!(sigma_max_cdf(0.5f64, 3), 0.125);
        assert_eq!(sigma_max_cdf(0.5f32, 2), 0.25);
    }

    fn within_binomial_stderr(est: &BinnedMeasure<f64>, n: usize, cdf: impl Fn(f64) -> f64) {
        let m = est.m();
        for (b, &w) in est.weights().iter().enumerate() {
            let p = cdf((b + 1) as f64 / m as f64) - cdf(b as f64 / m as f64);
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((w - p).abs() <= 3.0 * se + 1e-12, "bin {b}: {w} vs {p} (se {se})");
        }
    }

    #[test]
    fn mc_max_law() {
        let n = 1_000_000;
        let est = sigma_scored_mc(&ScoredStrategy::max(), 2, n, 20, 7).unwrap();
        within_binomial_stderr(&est, n, |y| y * y);
    }

    #[test]
    fn mc_constant_score_is_uniform() {
        let n = 200_000;
        let s = ScoredStrategy::new(Score::Bins(vec![3.0; 5])).unwrap();
        let est = sigma_scored_mc(&s, 3, n, 10, 8).unwrap();
        within_binomial_stderr(&est, n, |y| y);
    }

    #[test]
    fn mc_vee_law_matches_symmetry_formula() {
        let n = 1_000_000;
        let s = ScoredStrategy::vee();
        let est = sigma_scored_mc(&s, 2, n, 20, 9).unwrap();
        within_binomial_stderr(&est, n, |y| s.closed_form_cdf(y, 2).unwrap());
        // Density 2·(2|y-½|) at bin centers, within sampling error.
        for (b, &w) in est.weights().iter().enumerate() {
            let c = (b as f64 + 0.5) / 20.0;
            let dens = 4.0 * (c - 0.5).abs();
            assert!((w * 20.0 - dens).abs() < 0.05, "bin {b}");
        }
    }

    #[test]
    fn mc_is_deterministic() {
        let a = sigma_scored_mc(&ScoredStrategy::vee(), 3, 100_000, 7, 5).unwrap();
        let b = sigma_scored_mc(&ScoredStrategy::vee(), 3, 100_000, 7, 5).unwrap();
        assert_eq!(a, b);
    }
}

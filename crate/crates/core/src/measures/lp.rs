//! Exact Levy-Prokhorov distance between equal-mass atomic measures.
//!
//! By Strassen's theorem, `ρ(μ,ν) <= ε` iff a coupling moves at least
//! `total - ε` mass along pairs at distance `<= ε`. The transportable mass
//! `M(ε)` is a step function with breakpoints at pairwise distances, so
//!
//! ```text
//! ρ = min_k max(d_k, total - M(d_k))      (d_0 = 0, clamped to [0, total])
//! ```
//!
//! Since `d_k` increases and `total - M(d_k)` decreases, the minimum sits at
//! the crossing and is found by binary search over the sorted breakpoints,
//! or (for large supports, without materialising all `n·m` distances) by
//! bisection on the float line for the least `t` with `t >= total - M(t)`.
//! Both searches return the same float.

use super::flow::window_flow;
use super::{AtomicMeasure, BinnedMeasure};
use crate::error::{contract, Result};
use crate::scalar::Real;

/// Supports larger than this (in product of atom counts) use bisection.
const BREAKPOINT_LIMIT: usize = 1 << 16;

/// Maximum atoms per measure accepted by [`lp_distance`].
pub const LP_MAX_ATOMS: usize = 10_000;

pub fn lp_distance<F: Real>(mu: &AtomicMeasure<F>, nu: &AtomicMeasure<F>) -> Result<F> {
    let total = check_equal_mass(mu, nu)?;
    if mu.len() > LP_MAX_ATOMS || nu.len() > LP_MAX_ATOMS {
        return contract(format!("at most {LP_MAX_ATOMS} atoms per measure"));
    }
    if mu.is_empty() || nu.is_empty() || total <= F::zero() {
        return Ok(F::zero());
    }
    let (a, b) = (mu.atoms(), nu.atoms());
    if a.len() * b.len() <= BREAKPOINT_LIMIT {
        let mut dists: Vec<F> = a.iter().flat_map(|&(x, _)| b.iter().map(move |&(y, _)| (x - y).abs())).collect();
        Ok(solve_breakpoints(a, b, total, sorted_breakpoints(&mut dists)))
    } else {
        Ok(solve_bisect(a, b, total))
    }
}

fn check_equal_mass<F: Real>(mu: &AtomicMeasure<F>, nu: &AtomicMeasure<F>) -> Result<F> {
    let (s, t) = (mu.total_mass(), nu.total_mass());
    if (s - t).abs() > F::tol() {
        return contract(format!("unequal total masses {s:?} and {t:?}"));
    }
    Ok(s)
}

fn sorted_breakpoints<F: Real>(dists: &mut Vec<F>) -> &[F] {
    dists.push(F::zero());
    dists.sort_by(|x, y| x.partial_cmp(y).expect("distances are finite"));
    dists.dedup();
    dists
}

pub(crate) fn solve_breakpoints<F: Real>(a: &[(F, F)], b: &[(F, F)], total: F, dists: &[F]) -> F {
    let deficit = |d: F| (total - window_flow(a, b, d)).max(F::zero());
    // First k with d_k >= deficit(d_k); exists because the last breakpoint admits every pair.
    let (mut lo, mut hi) = (0usize, dists.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if dists[mid] >= deficit(dists[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let mut best = if lo < dists.len() { dists[lo] } else { total };
    if lo > 0 {
        best = best.min(deficit(dists[lo - 1]));
    }
    best.max(F::zero()).min(total)
}

fn solve_bisect<F: Real>(a: &[(F, F)], b: &[(F, F)], total: F) -> F {
    let feasible = |t: F| t >= total - window_flow(a, b, t);
    if feasible(F::zero()) {
        return F::zero();
    }
    let (mut lo, mut hi) = (F::zero(), total);
    loop {
        let mid = lo + (hi - lo) / F::of(2.0);
        if mid <= lo || mid >= hi {
            return hi;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// `ρ` between two binned measures, each read as atoms at its bin centers.
///
/// Resolutions may differ; total masses must agree.
pub fn lp_distance_binned<F: Real>(mu: &BinnedMeasure<F>, nu: &BinnedMeasure<F>) -> Result<F> {
    lp_distance(&mu.center_atoms(), &nu.center_atoms())
}

/// Repeated `ρ` evaluations on one bin grid, with the center-distance
/// breakpoints computed once.
#[derive(Debug, Clone)]
pub struct GridLp<F> {
    m: usize,
    dists: Vec<F>,
}

impl<F: Real> GridLp<F> {
    pub fn new(m: usize) -> Self {
        let mf = F::of_usize(m);
        let center = |b: usize| (F::of_usize(b) + F::of(0.5)) / mf;
        // All center distances |c_a - c_b| as computed in floating point.
        let mut dists = Vec::with_capacity(m * m);
        for a in 0..m {
            for b in 0..m {
                dists.push((center(a) - center(b)).abs());
            }
        }
        sorted_breakpoints(&mut dists);
        Self { m, dists }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `ρ` between center-atom measures given as per-bin masses.
    pub fn distance(&self, mu: &[F], nu: &[F]) -> Result<F> {
        if mu.len() != self.m || nu.len() != self.m {
            return contract(format!("expected {} bins", self.m));
        }
        let mf = F::of_usize(self.m);
        let atoms = |w: &[F]| -> Vec<(F, F)> {
            (0..self.m)
                .filter(|&b| w[b] > F::zero())
                .map(|b| ((F::of_usize(b) + F::of(0.5)) / mf, w[b]))
                .collect()
        };
        let (a, b) = (atoms(mu), atoms(nu));
        let (s, t): (F, F) = (mu.iter().copied().sum(), nu.iter().copied().sum());
        if (s - t).abs() > F::tol() {
            return contract(format!("unequal total masses {s:?} and {t:?}"));
        }
        if a.is_empty() || b.is_empty() {
            return Ok(F::zero());
        }
        Ok(solve_breakpoints(&a, &b, s, &self.dists))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::lp_distance_oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dirac(x: f64) -> AtomicMeasure<f64> {
        AtomicMeasure::dirac(x).unwrap()
    }

    #[test]
    fn examples() {
        let mu = AtomicMeasure::new([(0.1, 0.3), (0.6, 0.7)]).unwrap();
        assert_eq!(lp_distance(&mu, &mu).unwrap(), 0.0);
        assert!((lp_distance(&dirac(0.2), &dirac(0.5)).unwrap() - 0.3).abs() < 1e-12);
        let half = AtomicMeasure::new([(0.0, 0.5), (1.0, 0.5)]).unwrap();
        assert!((lp_distance(&half, &dirac(0.0)).unwrap() - 0.5).abs() < 1e-12);
        assert!((lp_distance(&dirac(0.2), &dirac(0.95)).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn errors_and_empty() {
        let e = AtomicMeasure::<f64>::empty();
        assert_eq!(lp_distance(&e, &e).unwrap(), 0.0);
        let half = AtomicMeasure::new([(0.3, 0.5)]).unwrap();
        assert!(lp_distance(&half, &dirac(0.3)).is_err());
    }

    fn random_measure(rng: &mut ChaCha8Rng, n: usize, total: f64) -> AtomicMeasure<f64> {
        let raw: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>() + 0.01)).collect();
        let s: f64 = raw.iter().map(|a| a.1).sum();
        AtomicMeasure::new(raw.into_iter().map(|(x, w)| (x, w * total / s))).unwrap()
    }

    #[test]
    fn bisection_equals_breakpoint_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let (n, m) = (rng.gen_range(1..30), rng.gen_range(1..30));
            let mu = random_measure(&mut rng, n, 1.0);
            let nu = random_measure(&mut rng, m, mu.total_mass());
            let (a, b) = (mu.atoms(), nu.atoms());
            let mut d: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| (x.0 - y.0).abs())).collect();
            let total = mu.total_mass();
            let x = solve_breakpoints(a, b, total, sorted_breakpoints(&mut d));
            let y = solve_bisect(a, b, total);
            assert_eq!(x, y);
        }
    }

    #[test]
    fn large_supports_use_bisection() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mu = random_measure(&mut rng, 400, 1.0);
        let nu = random_measure(&mut rng, 400, mu.total_mass());
        let r = lp_distance(&mu, &nu).unwrap();
        assert!(r > 0.0 && r < 1.0);
        assert!((r - lp_distance(&nu, &mu).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn grid_lp_matches_generic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [1, 2, 5, 8, 13] {
            let grid = GridLp::<f64>::new(m);
            for _ in 0..50 {
                let w1: Vec<f64> = (0..m).map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen() }).collect();
                let w2: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() + 0.001).collect();
                let (s1, s2) = (w1.iter().sum::<f64>(), w2.iter().sum::<f64>());
                if s1 == 0.0 {
                    continue;
                }
                let w1: Vec<f64> = w1.iter().map(|w| w / s1).collect();
                let w2: Vec<f64> = w2.iter().map(|w| w / s2).collect();
                let a = BinnedMeasure::new(w1.clone()).unwrap();
                let b = BinnedMeasure::new(w2.clone()).unwrap();
                let x = grid.distance(&w1, &w2).unwrap();
                let y = lp_distance_binned(&a, &b).unwrap();
                assert!((x - y).abs() < 1e-12, "m={m}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn binning_error_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let n_atoms = rng.gen_range(1..40);
            let mu = random_measure(&mut rng, n_atoms, 1.0);
            let m = rng.gen_range(1..50);
            let binned = mu.bin(m).unwrap().center_atoms();
            let r = lp_distance(&mu, &binned).unwrap();
            assert!(r <= 0.5 / m as f64 + 1e-12, "m={m} r={r}");
        }
    }

    #[test]
    fn agrees_with_oracle_on_small_supports() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let n_atoms = rng.gen_range(1..=7);
            let mu = random_measure(&mut rng, n_atoms, 1.0);
            let n_atoms = rng.gen_range(1..=7);
            let nu = random_measure(&mut rng, n_atoms, 1.0);
            let fast = lp_distance(&mu, &nu).unwrap();
            let slow = lp_distance_oracle(&mu, &nu).unwrap();
            assert!((fast - slow).abs() <= 1e-12, "{fast} vs {slow}");
        }
    }
}

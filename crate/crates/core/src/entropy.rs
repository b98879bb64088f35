//! Gibbs free energy and the dual estimate of grid entropy.
//!
//! For a potential `τ` that is constant on each of `m` bins,
//! `G^β(τ) = E[log Σ_j exp(β τ(U^j))]` with `U^1..U^D` uniform. The
//! expectation only depends on how many samples land in each bin, so it is
//! a finite sum over bin multisets with multinomial weights. Grid entropy
//! is estimated as `-sup_τ (β⟨τ,ν⟩ - G^β(τ))` over binned `τ`; restricting
//! `τ` can only shrink the supremum, so the estimate is an upper bound.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{contract, size, Result};
use crate::measures::{bin_index, kl_divergence, BinnedMeasure};
use crate::rng;
use crate::scalar::{log_sum_exp, Real};

/// Largest number of bin multisets `C(m+D-1, D)` that exact enumeration visits.
pub const MULTISET_LIMIT: usize = 10_000_000;

/// Piecewise-constant potential on `m` equal bins with inverse temperature `β`.
#[derive(Debug, Clone, PartialEq)]
pub struct TauFunction<F> {
    values: Vec<F>,
    beta: F,
}

impl<F: Real> TauFunction<F> {
    pub fn new(values: Vec<F>, beta: F) -> Result<Self> {
        if values.is_empty() {
            return contract("tau needs at least one bin");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return contract("tau values must be finite");
        }
        if !(beta > F::zero()) || !beta.is_finite() {
            return contract(format!("beta must be positive, got {beta:?}"));
        }
        Ok(Self { values, beta })
    }

    pub fn constant(m: usize, c: F, beta: F) -> Result<Self> {
        Self::new(vec![c; m], beta)
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn beta(&self) -> F {
        self.beta
    }

    /// `τ + c·1`.
    pub fn shifted(&self, c: F) -> Self {
        Self { values: self.values.iter().map(|&v| v + c).collect(), beta: self.beta }
    }

    fn centered(mut self) -> Self {
        let mean = self.values.iter().copied().sum::<F>() / F::of_usize(self.m());
        self.values.iter_mut().for_each(|v| *v = *v - mean);
        self
    }
}

/// `C(n, k)` if it fits in a `usize`.
fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// All multisets of `D` bins, each stored as `(bin, count)` runs with its probability.
struct BinMultisets<F> {
    weights: Vec<F>,
    offsets: Vec<usize>,
    runs: Vec<(usize, F)>,
}

const CHUNK: usize = 4096;

impl<F: Real> BinMultisets<F> {
    fn new(m: usize, d: usize) -> Result<Self> {
        if m == 0 || d == 0 {
            return contract("bin count and D must be positive");
        }
        let count = binomial(m + d - 1, d).filter(|&c| c <= MULTISET_LIMIT);
        let Some(count) = count else {
            return size(format!("C(m+D-1, D) for m = {m}, D = {d} exceeds {MULTISET_LIMIT}"));
        };
        let ln_fact: Vec<f64> = (0..=d).scan(0.0, |acc, i| {
            if i > 0 {
                *acc += (i as f64).ln();
            }
            Some(*acc)
        }).collect();
        let base = ln_fact[d] - d as f64 * (m as f64).ln();

        let mut weights = Vec::with_capacity(count);
        let mut offsets = Vec::with_capacity(count + 1);
        let mut runs = Vec::new();
        offsets.push(0);
        // Nondecreasing bin sequences b_1 ≤ … ≤ b_D.
        let mut seq = vec![0usize; d];
        loop {
            let mut log_w = base;
            let mut i = 0;
            while i < d {
                let j = (i..d).find(|&j| seq[j] != seq[i]).unwrap_or(d);
                runs.push((seq[i], F::of_usize(j - i)));
                log_w -= ln_fact[j - i];
                i = j;
            }
            weights.push(F::of(log_w.exp()));
            offsets.push(runs.len());

            let Some(pos) = (0..d).rev().find(|&p| seq[p] + 1 < m) else {
                break;
            };
            let next = seq[pos] + 1;
            seq[pos..].iter_mut().for_each(|b| *b = next);
        }
        debug_assert_eq!(weights.len(), count);
        Ok(Self { weights, offsets, runs })
    }

    fn len(&self) -> usize {
        self.weights.len()
    }

    fn runs(&self, i: usize) -> &[(usize, F)] {
        &self.runs[self.offsets[i]..self.offsets[i + 1]]
    }

    /// `log Σ_b c_b e^{βτ_b}` for multiset `i`.
    fn log_partition(&self, i: usize, tau: &TauFunction<F>) -> F {
        let beta = tau.beta();
        log_sum_exp(self.runs(i).iter().map(|&(b, c)| beta * tau.values[b] + c.ln()))
    }

    /// Sum of `f(i)` over multisets, reduced in a fixed chunk order.
    fn chunked_sum<T: Send>(
        &self,
        zero: impl Fn() -> T + Sync,
        add: impl Fn(T, usize) -> T + Sync,
        merge: impl Fn(T, T) -> T,
    ) -> T {
        let chunks = self.len().div_ceil(CHUNK);
        let partial: Vec<T> = (0..chunks)
            .into_par_iter()
            .map(|c| (c * CHUNK..self.len().min((c + 1) * CHUNK)).fold(zero(), &add))
            .collect();
        partial.into_iter().fold(zero(), merge)
    }

    fn gibbs(&self, tau: &TauFunction<F>) -> F {
        self.chunked_sum(|| F::zero(), |acc, i| acc + self.weights[i] * self.log_partition(i, tau), |a, b| a + b)
    }

    /// `E[c_b e^{βτ_b} / Σ_a c_a e^{βτ_a}]` per bin.
    fn expected_shares(&self, tau: &TauFunction<F>) -> Vec<F> {
        let m = tau.m();
        let beta = tau.beta();
        self.chunked_sum(
            || vec![F::zero(); m],
            |mut acc, i| {
                let lz = self.log_partition(i, tau);
                for &(b, c) in self.runs(i) {
                    acc[b] = acc[b] + self.weights[i] * (beta * tau.values[b] + c.ln() - lz).exp();
                }
                acc
            },
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x = *x + y);
                a
            },
        )
    }
}

/// Exact `G^β(τ)` by enumeration of bin multisets.
pub fn gibbs_exact<F: Real>(tau: &TauFunction<F>, d: usize) -> Result<F> {
    Ok(BinMultisets::new(tau.m(), d)?.gibbs(tau))
}

/// Monte Carlo estimate of `G^β(τ)`: sample mean and its standard error over `n` draws.
pub fn gibbs_mc<F: Real>(tau: &TauFunction<F>, d: usize, n: usize, seed: u64) -> Result<(F, F)> {
    if n < 100 {
        return contract("gibbs_mc needs at least 100 samples");
    }
    if d == 0 {
        return contract("D must be positive");
    }
    const MC_CHUNK: usize = 1 << 14;
    let beta = tau.beta();
    let m = tau.m();
    // Welford accumulators (count, mean, M2), merged in chunk order.
    let chunks = n.div_ceil(MC_CHUNK);
    let partial: Vec<(f64, F, F)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut r = rng::stream(seed, rng::DOMAIN_MONTE_CARLO, c as u64);
            let len = MC_CHUNK.min(n - c * MC_CHUNK);
            let mut terms = vec![F::zero(); d];
            let (mut k, mut mean, mut m2) = (0.0, F::zero(), F::zero());
            for _ in 0..len {
                for t in terms.iter_mut() {
                    let u: f64 = r.gen();
                    *t = beta * tau.values[bin_index(u, m)];
                }
                let x = log_sum_exp(terms.iter().copied());
                k += 1.0;
                let delta = x - mean;
                mean = mean + delta / F::of(k);
                m2 = m2 + delta * (x - mean);
            }
            (k, mean, m2)
        })
        .collect();
    let (count, mean, m2) = partial.into_iter().fold((0.0, F::zero(), F::zero()), |(na, ma, sa), (nb, mb, sb)| {
        let total = na + nb;
        let delta = mb - ma;
        let mean = ma + delta * F::of(nb / total);
        (total, mean, sa + sb + delta * delta * F::of(na * nb / total))
    });
    let var = m2 / F::of(count - 1.0);
    Ok((mean, (var / F::of(count)).sqrt()))
}

fn check_pair<F: Real>(tau: &TauFunction<F>, nu: &BinnedMeasure<F>) -> Result<()> {
    if tau.m() != nu.m() {
        return contract(format!("tau has {} bins but nu has {}", tau.m(), nu.m()));
    }
    Ok(())
}

fn pairing<F: Real>(tau: &TauFunction<F>, nu: &BinnedMeasure<F>) -> F {
    tau.values.iter().zip(nu.weights()).map(|(&t, &w)| t * w).sum()
}

/// `β⟨τ,ν⟩ - G^β(τ)`.
pub fn dual_objective<F: Real>(tau: &TauFunction<F>, nu: &BinnedMeasure<F>, d: usize) -> Result<F> {
    check_pair(tau, nu)?;
    Ok(tau.beta() * pairing(tau, nu) - gibbs_exact(tau, d)?)
}

/// Gradient of [`dual_objective`] in `τ`.
pub fn dual_gradient<F: Real>(tau: &TauFunction<F>, nu: &BinnedMeasure<F>, d: usize) -> Result<Vec<F>> {
    check_pair(tau, nu)?;
    let sets = BinMultisets::new(tau.m(), d)?;
    Ok(gradient(&sets, tau, nu))
}

fn gradient<F: Real>(sets: &BinMultisets<F>, tau: &TauFunction<F>, nu: &BinnedMeasure<F>) -> Vec<F> {
    let beta = tau.beta();
    sets.expected_shares(tau).into_iter().zip(nu.weights()).map(|(e, &w)| beta * (w - e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualOptions {
    pub max_iter: usize,
    /// Stop once the gradient's Euclidean norm is at most this.
    pub tol: f64,
    /// Armijo sufficient-increase constant.
    pub armijo: f64,
    /// Objective value beyond which the supremum is treated as infinite.
    pub divergence_bound: f64,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self { max_iter: 10_000, tol: 1e-8, armijo: 1e-4, divergence_bound: 1e3 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualReport<F> {
    /// `-(final objective)`, an upper bound on the grid entropy of `ν`.
    pub entropy_estimate: F,
    pub tau_star: TauFunction<F>,
    pub iterations: usize,
    pub grad_norm: F,
    /// Gradient norm reached the tolerance.
    pub converged: bool,
    /// The objective grew past the divergence bound: `ν` is not achievable at this resolution.
    pub diverged: bool,
    /// Objective value at every accepted iterate, starting from `τ = 0`.
    pub objective_trace: Vec<F>,
}

impl<F: Real> DualReport<F> {
    /// Stopped without meeting the gradient tolerance.
    pub fn warning(&self) -> bool {
        !self.converged
    }
}

fn norm<F: Real>(v: &[F]) -> F {
    v.iter().map(|&x| x * x).sum::<F>().sqrt()
}

fn centered_gradient<F: Real>(g: Vec<F>) -> Vec<F> {
    let mean = g.iter().copied().sum::<F>() / F::of_usize(g.len());
    g.into_iter().map(|x| x - mean).collect()
}

/// Gradient ascent on the dual objective from `τ = 0` with Armijo backtracking.
///
/// The trial step grows after every accepted step and is halved until the
/// Armijo condition holds. `τ` is re-centred to mean zero after each step.
pub fn grid_entropy_dual<F: Real>(nu: &BinnedMeasure<F>, d: usize, beta: F, opts: &DualOptions) -> Result<DualReport<F>> {
    if !nu.is_probability() {
        return contract("nu must be a probability measure");
    }
    let sets = BinMultisets::new(nu.m(), d)?;
    let objective = |tau: &TauFunction<F>| beta * pairing(tau, nu) - sets.gibbs(tau);

    let mut tau = TauFunction::constant(nu.m(), F::zero(), beta)?;
    let mut value = objective(&tau);
    let mut grad = centered_gradient(gradient(&sets, &tau, nu));
    let mut trace = vec![value];
    let mut step = F::one() / (beta * beta);
    let mut iterations = 0;
    let mut diverged = false;
    let tol = F::of(opts.tol);
    let c = F::of(opts.armijo);

    while norm(&grad) > tol && iterations < opts.max_iter {
        let g2: F = grad.iter().map(|&x| x * x).sum();
        let mut accepted = None;
        for _ in 0..60 {
            let values = tau.values.iter().zip(&grad).map(|(&t, &g)| t + step * g).collect();
            let trial = TauFunction { values, beta }.centered();
            let v = objective(&trial);
            if v.is_finite() && v >= value + c * step * g2 {
                accepted = Some((trial, v));
                break;
            }
            step = step * F::of(0.5);
        }
        iterations += 1;
        let Some((trial, v)) = accepted else {
            // No ascent possible at machine precision.
            break;
        };
        let stalled = v - value <= F::epsilon() * value.abs().max(F::one());
        tau = trial;
        value = v;
        trace.push(value);
        grad = centered_gradient(gradient(&sets, &tau, nu));
        if value > F::of(opts.divergence_bound) {
            diverged = true;
            break;
        }
        if stalled {
            break;
        }
        step = step * F::of(2.0);
    }

    let grad_norm = norm(&grad);
    Ok(DualReport {
        entropy_estimate: -value,
        tau_star: tau,
        iterations,
        grad_norm,
        converged: grad_norm <= tol,
        diverged,
        objective_trace: trace,
    })
}

/// One row of [`entropy_concavity_probe`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityRow<F> {
    pub t: F,
    /// Estimate at `tν₁ + (1-t)ν₂`.
    pub estimate: F,
    /// `t·estimate(ν₁) + (1-t)·estimate(ν₂)`.
    pub chord: F,
}

impl<F: Real> ConcavityRow<F> {
    /// `estimate - chord`; concavity makes this nonnegative.
    pub fn gap(&self) -> F {
        self.estimate - self.chord
    }
}

/// Dual estimates along the segment between `ν₁` and `ν₂`.
pub fn entropy_concavity_probe<F: Real>(
    nu1: &BinnedMeasure<F>,
    nu2: &BinnedMeasure<F>,
    t_list: &[F],
    d: usize,
    beta: F,
    opts: &DualOptions,
) -> Result<Vec<ConcavityRow<F>>> {
    if nu1.m() != nu2.m() {
        return contract("concavity probe needs measures on the same bins");
    }
    let e1 = grid_entropy_dual(nu1, d, beta, opts)?.entropy_estimate;
    let e2 = grid_entropy_dual(nu2, d, beta, opts)?.entropy_estimate;
    t_list
        .iter()
        .map(|&t| {
            if !(F::zero()..=F::one()).contains(&t) {
                return contract(format!("mixing weight {t:?} outside [0,1]"));
            }
            let mid = nu1.mix(nu2, t)?;
            let estimate = grid_entropy_dual(&mid, d, beta, opts)?.entropy_estimate;
            Ok(ConcavityRow { t, estimate, chord: t * e1 + (F::one() - t) * e2 })
        })
        .collect()
}

/// `KL(ν‖Λ) + estimate(ν)`, bounded by `log D` up to binning error.
pub fn kl_bound_gap<F: Real>(nu: &BinnedMeasure<F>, estimate: F) -> Result<F> {
    let lambda = BinnedMeasure::uniform(nu.m())?;
    Ok(kl_divergence(nu, &lambda)? + estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};

    fn tau(values: &[f64]) -> TauFunction<f64> {
        TauFunction::new(values.to_vec(), 1.0).unwrap()
    }

    fn random_tau<R: Rng>(m: usize, r: &mut R) -> TauFunction<f64> {
        tau(&(0..m).map(|_| r.gen_range(-2.0..2.0)).collect::<Vec<_>>())
    }

    fn random_nu<R: Rng>(m: usize, r: &mut R) -> BinnedMeasure<f64> {
        let raw: Vec<f64> = (0..m).map(|_| r.gen_range(0.05..1.0)).collect();
        let s: f64 = raw.iter().sum();
        BinnedMeasure::new(raw.iter().map(|x| x / s).collect()).unwrap()
    }

    /// Brute-force `G` over all `m^D` ordered bin tuples.
    fn gibbs_tuples(tau: &TauFunction<f64>, d: usize) -> f64 {
        let m = tau.m();
        let n = m.pow(d as u32);
        let mut total = 0.0;
        let mut tuple = vec![0; d];
        for idx in 0..n {
            crate::strategies::decode_into(m, idx, &mut tuple);
            total += log_sum_exp(tuple.iter().map(|&b| tau.beta() * tau.values()[b]));
        }
        total / n as f64
    }

    #[test]
    fn multiset_counts_and_weights() {
        for (m, d) in [(1, 3), (4, 2), (5, 3), (3, 4)] {
            let sets = BinMultisets::<f64>::new(m, d).unwrap();
            assert_eq!(sets.len(), binomial(m + d - 1, d).unwrap());
            assert!((sets.weights.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
        assert_eq!(binomial(10, 3), Some(120));
        assert!(BinMultisets::<f64>::new(10_000, 3).is_err());
    }

    #[test]
    fn gibbs_examples() {
        for d in 1..5 {
            let g = gibbs_exact(&tau(&[0.0; 5]), d).unwrap();
            assert!((g - (d as f64).ln()).abs() < 1e-13);
            let g = gibbs_exact(&tau(&[0.7; 3]), d).unwrap();
            assert!((g - 0.7 - (d as f64).ln()).abs() < 1e-13);
        }
        let g = gibbs_exact(&tau(&[0.0, 2f64.ln()]), 2).unwrap();
        let expected = 0.25 * 2f64.ln() + 0.5 * 3f64.ln() + 0.25 * 4f64.ln();
        assert!((g - expected).abs() < 1e-14);
        assert!((expected - 1.0692).abs() < 1e-4);
    }

    #[test]
    fn gibbs_matches_tuple_enumeration() {
        let mut r = rng::stream(11, rng::DOMAIN_MONTE_CARLO, 0);
        for (m, d) in [(3, 2), (4, 3), (6, 2), (2, 5)] {
            let mut t = random_tau(m, &mut r);
            t.beta = r.gen_range(0.2..3.0);
            let g = gibbs_exact(&t, d).unwrap();
            assert!((g - gibbs_tuples(&t, d)).abs() < 1e-12, "m={m} d={d}");
        }
    }

    #[test]
    fn gibbs_mc_agrees_with_exact() {
        let mut r = rng::stream(12, rng::DOMAIN_MONTE_CARLO, 0);
        for i in 0..5 {
            let t = random_tau(8, &mut r);
            let (est, se) = gibbs_mc(&t, 2, 100_000, i).unwrap();
            let exact = gibbs_exact(&t, 2).unwrap();
            assert!((est - exact).abs() <= 3.0 * se, "{est} vs {exact} (se {se})");
        }
        let (est, se) = gibbs_mc(&tau(&[0.0; 8]), 3, 1000, 1).unwrap();
        assert_eq!(est, 3f64.ln());
        assert_eq!(se, 0.0);
        assert!(gibbs_mc(&tau(&[0.0; 8]), 3, 99, 1).is_err());
    }

    #[test]
    fn objective_at_uniform() {
        let lambda = BinnedMeasure::uniform(6).unwrap();
        for c in [-3.0, 0.0, 2.5] {
            let v = dual_objective(&tau(&[c; 6]), &lambda, 3).unwrap();
            assert!((v + 3f64.ln()).abs() < 1e-12);
            let g = dual_gradient(&tau(&[c; 6]), &lambda, 3).unwrap();
            assert!(g.iter().all(|x| x.abs() < 1e-14));
        }
        assert!(dual_objective(&tau(&[0.0; 5]), &lambda, 2).is_err());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut r = rng::stream(13, rng::DOMAIN_MONTE_CARLO, 0);
        let h = 1e-5;
        for _ in 0..10 {
            let t = random_tau(6, &mut r);
            let nu = random_nu(6, &mut r);
            let g = dual_gradient(&t, &nu, 2).unwrap();
            assert!(g.iter().sum::<f64>().abs() < 1e-14);
            for b in 0..6 {
                let mut plus = t.clone();
                plus.values[b] += h;
                let mut minus = t.clone();
                minus.values[b] -= h;
                let fd = (dual_objective(&plus, &nu, 2).unwrap() - dual_objective(&minus, &nu, 2).unwrap()) / (2.0 * h);
                assert!((fd - g[b]).abs() <= 1e-5 * g[b].abs().max(1e-3), "bin {b}: {fd} vs {}", g[b]);
            }
        }
    }

    #[test]
    fn dual_at_uniform_is_log_d() {
        for m in [1, 2, 8] {
            for d in [2, 3] {
                let rep = grid_entropy_dual(&BinnedMeasure::uniform(m).unwrap(), d, 1.0, &DualOptions::default()).unwrap();
                assert!((rep.entropy_estimate - (d as f64).ln()).abs() < 1e-12);
                assert!(rep.converged && !rep.diverged);
                assert_eq!(rep.iterations, 0);
            }
        }
    }

    #[test]
    fn dual_at_sigma_max_is_small() {
        let opts = DualOptions::default();
        let mut previous = f64::INFINITY;
        for m in [4, 8, 16] {
            let nu = BinnedMeasure::sigma_max(m, 2).unwrap();
            let rep = grid_entropy_dual(&nu, 2, 1.0, &opts).unwrap();
            assert!(rep.entropy_estimate >= -1e-9);
            assert!(rep.entropy_estimate <= previous + 1e-6);
            assert!(rep.objective_trace.windows(2).all(|w| w[1] >= w[0]));
            previous = rep.entropy_estimate;
        }
        assert!(previous < 0.2);
    }

    #[test]
    fn unachievable_measure_diverges() {
        // All mass in the top bin beats even MAX.
        let mut w = vec![0.0; 4];
        w[3] = 1.0;
        let rep = grid_entropy_dual(&BinnedMeasure::new(w).unwrap(), 2, 1.0, &DualOptions::default()).unwrap();
        assert!(rep.diverged);
        assert!(rep.warning());
    }

    #[test]
    fn concavity_endpoints() {
        let opts = DualOptions::default();
        let l = BinnedMeasure::<f64>::uniform(8).unwrap();
        let s = BinnedMeasure::sigma_max(8, 2).unwrap();
        let rows = entropy_concavity_probe(&l, &s, &[0.0, 0.5, 1.0], 2, 1.0, &opts).unwrap();
        assert!(rows[0].gap().abs() < 1e-9);
        assert!(rows[2].gap().abs() < 1e-9);
        assert!(rows[1].gap() >= -1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn shift_identities(seed in any::<u64>(), c in -5.0f64..5.0, beta in 0.1f64..4.0) {
            let mut r = rng::stream(seed, rng::DOMAIN_MONTE_CARLO, 0);
            let mut t = random_tau(5, &mut r);
            t.beta = beta;
            let nu = random_nu(5, &mut r);
            let g = gibbs_exact(&t, 3).unwrap();
            let gs = gibbs_exact(&t.shifted(c), 3).unwrap();
            prop_assert!((gs - g - beta * c).abs() < 1e-12);
            let v = dual_objective(&t, &nu, 3).unwrap();
            let vs = dual_objective(&t.shifted(c), &nu, 3).unwrap();
            prop_assert!((v - vs).abs() < 1e-12);
        }

        #[test]
        fn objective_is_concave_on_segments(seed in any::<u64>()) {
            let mut r = rng::stream(seed, rng::DOMAIN_MONTE_CARLO, 0);
            let a = random_tau(6, &mut r);
            let b = random_tau(6, &mut r);
            let nu = random_nu(6, &mut r);
            let mid = tau(&a.values().iter().zip(b.values()).map(|(x, y)| 0.5 * (x + y)).collect::<Vec<_>>());
            let fm = dual_objective(&mid, &nu, 2).unwrap();
            let fa = dual_objective(&a, &nu, 2).unwrap();
            let fb = dual_objective(&b, &nu, 2).unwrap();
            prop_assert!(fm >= 0.5 * (fa + fb) - 1e-10);
        }
    }
}

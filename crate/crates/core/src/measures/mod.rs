//! Measures on `[0,1]`, the Levy-Prokhorov metric and divergences.
//!
//! Binning convention: `m` equal bins, right-open except the last, so
//! `x ∈ [b/m, (b+1)/m)` lands in bin `b` and `x = 1` lands in bin `m-1`.
//! Converting back places each bin's mass at the bin center `(b + ½)/m`.

mod flow;
mod lp;
mod oracle;

pub use flow::{max_flow, window_flow, FlowNetwork};
pub use lp::{lp_distance, lp_distance_binned, GridLp};
pub use oracle::{lp_distance_oracle, ORACLE_MAX_ATOMS};

use crate::error::{contract, Result};
use crate::scalar::Real;

/// Finitely many atoms `(value, mass)`, sorted by value with equal values merged.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure<F> {
    atoms: Vec<(F, F)>,
}

impl<F: Real> AtomicMeasure<F> {
    pub fn new(atoms: impl IntoIterator<Item = (F, F)>) -> Result<Self> {
        let mut atoms: Vec<(F, F)> = atoms.into_iter().collect();
        for &(x, w) in &atoms {
            if !(x >= F::zero() && x <= F::one()) {
                return contract(format!("atom value {x:?} outside [0,1]"));
            }
            if !(w >= F::zero()) || !w.is_finite() {
                return contract(format!("atom mass {w:?} is not a finite nonnegative number"));
            }
        }
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("values are finite"));
        let mut merged: Vec<(F, F)> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == x => last.1 = last.1 + w,
                _ => merged.push((x, w)),
            }
        }
        Ok(Self { atoms: merged })
    }

    pub fn empty() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn dirac(x: F) -> Result<Self> {
        Self::new([(x, F::one())])
    }

    /// Equal mass `1/n` on each of `n` values (the empirical measure).
    pub fn empirical(values: &[F]) -> Result<Self> {
        if values.is_empty() {
            return Ok(Self::empty());
        }
        let w = F::one() / F::of_usize(values.len());
        Self::new(values.iter().map(|&x| (x, w)))
    }

    pub fn atoms(&self) -> &[(F, F)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> F {
        self.atoms.iter().map(|a| a.1).sum()
    }

    /// Sum of two measures.
    pub fn plus(&self, other: &Self) -> Self {
        let atoms = self.atoms.iter().chain(other.atoms.iter()).copied();
        Self::new(atoms).expect("sum of valid measures is valid")
    }

    pub fn scaled(&self, c: F) -> Result<Self> {
        Self::new(self.atoms.iter().map(|&(x, w)| (x, w * c)))
    }

    /// Mass of each atom assigned to its containing bin.
    pub fn bin(&self, m: usize) -> Result<BinnedMeasure<F>> {
        if m == 0 {
            return contract("bin count must be positive");
        }
        let mut weights = vec![F::zero(); m];
        for &(x, w) in &self.atoms {
            weights[bin_index(x, m)] = weights[bin_index(x, m)] + w;
        }
        BinnedMeasure::new(weights)
    }
}

/// Bin containing `x` under the right-open, last-bin-closed convention.
pub fn bin_index<F: Real>(x: F, m: usize) -> usize {
    let b = (x * F::of_usize(m)).floor().to_usize().unwrap_or(0);
    b.min(m - 1)
}

/// Nonnegative weights on `m` equal bins of `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMeasure<F> {
    weights: Vec<F>,
}

impl<F: Real> BinnedMeasure<F> {
    pub fn new(weights: Vec<F>) -> Result<Self> {
        if weights.is_empty() {
            return contract("binned measure needs at least one bin");
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= F::zero()) || !w.is_finite()) {
            return contract(format!("bin weight {w:?} is not a finite nonnegative number"));
        }
        Ok(Self { weights })
    }

    /// Lebesgue measure `Λ_m`.
    pub fn uniform(m: usize) -> Result<Self> {
        if m == 0 {
            return contract("bin count must be positive");
        }
        Self::new(vec![F::one() / F::of_usize(m); m])
    }

    /// Bin masses `cdf((b+1)/m) - cdf(b/m)` of a distribution on `[0,1]`.
    pub fn from_cdf(m: usize, cdf: impl Fn(F) -> F) -> Result<Self> {
        if m == 0 {
            return contract("bin count must be positive");
        }
        let mf = F::of_usize(m);
        let edges: Vec<F> = (0..=m).map(|b| cdf(F::of_usize(b) / mf)).collect();
        Self::new(edges.windows(2).map(|e| (e[1] - e[0]).max(F::zero())).collect())
    }

    /// The law of the maximum of `d` uniforms, binned: masses `(b/m)^d - ((b-1)/m)^d`.
    pub fn sigma_max(m: usize, d: usize) -> Result<Self> {
        Self::from_cdf(m, |y| y.powi(d as i32))
    }

    pub fn m(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn total_mass(&self) -> F {
        self.weights.iter().copied().sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.total_mass() - F::one()).abs() <= F::tol()
    }

    pub fn center(&self, b: usize) -> F {
        (F::of_usize(b) + F::of(0.5)) / F::of_usize(self.m())
    }

    /// Atoms at bin centers; empty bins are dropped.
    pub fn center_atoms(&self) -> AtomicMeasure<F> {
        let atoms = (0..self.m())
            .filter(|&b| self.weights[b] > F::zero())
            .map(|b| (self.center(b), self.weights[b]));
        AtomicMeasure::new(atoms).expect("centers lie in [0,1]")
    }

    /// `t·self + (1-t)·other`.
    pub fn mix(&self, other: &Self, t: F) -> Result<Self> {
        if self.m() != other.m() {
            return contract("mixture of binned measures with different resolutions");
        }
        Self::new(
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(&a, &b)| t * a + (F::one() - t) * b)
                .collect(),
        )
    }
}

/// `½ Σ |μ_i - ν_i|` over the merged support of two atomic measures.
pub fn total_variation<F: Real>(mu: &AtomicMeasure<F>, nu: &AtomicMeasure<F>) -> F {
    let (a, b) = (mu.atoms(), nu.atoms());
    let (mut i, mut j) = (0, 0);
    let mut sum = F::zero();
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            sum = sum + a[i].1;
            i += 1;
        } else if take_b {
            sum = sum + b[j].1;
            j += 1;
        } else {
            sum = sum + (a[i].1 - b[j].1).abs();
            i += 1;
            j += 1;
        }
    }
    sum / F::of(2.0)
}

/// Total variation between binned measures of equal resolution.
pub fn total_variation_binned<F: Real>(mu: &BinnedMeasure<F>, nu: &BinnedMeasure<F>) -> Result<F> {
    if mu.m() != nu.m() {
        return contract(format!("resolution mismatch: {} vs {} bins", mu.m(), nu.m()));
    }
    let s: F = mu.weights.iter().zip(&nu.weights).map(|(&a, &b)| (a - b).abs()).sum();
    Ok(s / F::of(2.0))
}

/// `Σ ν_b ln(ν_b / base_b)` with `0·ln 0 = 0`; `+∞` when `ν` charges a bin `base` does not.
pub fn kl_divergence<F: Real>(nu: &BinnedMeasure<F>, base: &BinnedMeasure<F>) -> Result<F> {
    if nu.m() != base.m() {
        return contract(format!("resolution mismatch: {} vs {} bins", nu.m(), base.m()));
    }
    let mut sum = F::zero();
    for (&p, &q) in nu.weights.iter().zip(&base.weights) {
        if p == F::zero() {
            continue;
        }
        if q == F::zero() {
            return Ok(F::infinity());
        }
        sum = sum + p * (p / q).ln();
    }
    Ok(sum)
}

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{contract, Result};
use crate::measures::BinnedMeasure;
use crate::scalar::Scalar;

/// Probability mass function on the labels `{1..K}` (stored 0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct Pmf<T> {
    probs: Vec<T>,
}

impl<T: Scalar> Pmf<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return contract("pmf needs at least one label");
        }
        if probs.iter().any(|p| *p < T::zero() && !p.is_negligible()) {
            return contract("pmf has a negative mass");
        }
        let total = probs.iter().cloned().fold(T::zero(), |a, b| a + b);
        if !total.close(&T::one()) {
            return contract(format!("pmf sums to {:?}, not 1", total));
        }
        Ok(Self { probs })
    }

    pub fn uniform(k: usize) -> Self {
        Self { probs: vec![T::from_ratio(1, k as i64); k] }
    }

    pub(crate) fn from_raw(probs: Vec<T>) -> Self {
        Self { probs }
    }

    pub fn k(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Mass of label `x` (0-based).
    pub fn mass(&self, x: usize) -> &T {
        &self.probs[x]
    }

    /// `E[X]` with labels counted from 1.
    pub fn mean(&self) -> T {
        self.probs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (x, p)| acc + T::from_usize(x + 1) * p.clone())
    }

    /// Cumulative masses `F(1), …, F(K)`.
    pub fn cdf(&self) -> Vec<T> {
        let mut acc = T::zero();
        self.probs
            .iter()
            .map(|p| {
                acc = acc.clone() + p.clone();
                acc.clone()
            })
            .collect()
    }

    /// Masses sorted ascending: the value distribution of the pmf.
    pub fn value_multiset(&self) -> Vec<T> {
        let mut v = self.probs.clone();
        v.sort_by(|a, b| a.partial_cmp(b).expect("comparable masses"));
        v
    }

    pub fn close(&self, other: &Self) -> bool {
        self.k() == other.k() && self.probs.iter().zip(&other.probs).all(|(a, b)| a.close(b))
    }

    /// `Σ w_i · pmf_i`.
    pub fn mixture(pmfs: &[Self], weights: &[T]) -> Result<Self> {
        check_convex(weights)?;
        if pmfs.len() != weights.len() || pmfs.is_empty() {
            return contract("one weight per pmf required");
        }
        let k = pmfs[0].k();
        if pmfs.iter().any(|p| p.k() != k) {
            return contract("pmfs have different supports");
        }
        let probs = (0..k)
            .map(|x| {
                pmfs.iter().zip(weights).fold(T::zero(), |acc, (p, w)| acc + w.clone() * p.probs[x].clone())
            })
            .collect();
        Ok(Self { probs })
    }

    pub fn to_f64(&self) -> Pmf<f64> {
        Pmf { probs: self.probs.iter().map(Scalar::to_f64).collect() }
    }

    /// The pmf as a binned measure with one bin per label.
    pub fn to_binned(&self) -> BinnedMeasure<f64> {
        BinnedMeasure::new(self.probs.iter().map(|p| p.to_f64().max(0.0)).collect())
            .expect("pmf masses are nonnegative")
    }
}

impl Pmf<BigRational> {
    /// Canonical form: integer numerators over the least common denominator.
    pub fn common_denominator(&self) -> (Vec<BigInt>, BigInt) {
        let den = self.probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let nums = self.probs.iter().map(|p| p.numer() * (&den / p.denom())).collect();
        (nums, den)
    }

    pub fn from_integers(nums: &[BigInt], den: &BigInt) -> Result<Self> {
        if !den.is_positive() {
            return contract("pmf denominator must be positive");
        }
        Self::new(nums.iter().map(|n| BigRational::new(n.clone(), den.clone())).collect())
    }
}

pub(crate) fn check_convex<T: Scalar>(weights: &[T]) -> Result<()> {
    if weights.iter().any(|w| *w < T::zero() && !w.is_negligible()) {
        return contract("mixture weights must be nonnegative");
    }
    let total = weights.iter().cloned().fold(T::zero(), |a, b| a + b);
    if !total.close(&T::one()) {
        return contract(format!("mixture weights sum to {total:?}, not 1"));
    }
    Ok(())
}

pub(crate) fn is_zero<T: Scalar>(x: &T) -> bool {
    x.is_zero() || x.is_negligible()
}

//! Scalar abstractions.
//!
//! [`Scalar`] covers everything a probability table needs: floats with a
//! tolerance, or exact rationals compared exactly. [`Real`] is the float
//! family used by measure geometry and the entropy optimizer.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Neg<Output = Self> + Send + Sync {
    /// True when arithmetic is exact and `close` is equality.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Equality up to the type's tolerance (exact for rationals).
    fn close(&self, other: &Self) -> bool;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn is_negligible(&self) -> bool {
        self.close(&Self::zero())
    }

    /// Strictly positive beyond the tolerance.
    fn is_positive(&self) -> bool {
        *self > Self::zero() && !self.is_negligible()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn close(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-12
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        (num as f64 / den as f64) as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    fn close(&self, other: &Self) -> bool {
        (self - other).abs() <= 1e-5
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn close(&self, other: &Self) -> bool {
        self == other
    }
}

/// Floating-point scalar for measure geometry and optimisation.
pub trait Real: Float + FromPrimitive + Debug + Sum + Send + Sync + 'static {
    /// Mass-equality tolerance.
    fn tol() -> Self;

    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 converts to every Real")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize converts to every Real")
    }
}

impl Real for f64 {
    fn tol() -> Self {
        1e-12
    }
}

impl Real for f32 {
    fn tol() -> Self {
        1e-5
    }
}

/// Numerically stable `ln Σ exp(x_i)`.
pub fn log_sum_exp<F: Real>(xs: impl IntoIterator<Item = F> + Clone) -> F {
    let max = xs.clone().into_iter().fold(F::neg_infinity(), F::max);
    if max == F::neg_infinity() {
        return max;
    }
    let s: F = xs.into_iter().map(|x| (x - max).exp()).sum();
    max + s.ln()
}

//! Toolkit for the "draw `D` uniform samples, keep one" selection model.
//!
//! The crate is organised around the objects that appear when a chooser sees
//! `D` i.i.d. labels per trial and keeps one of them:
//!
//! - [`measures`]: atomic and binned measures on `[0,1]`, the Levy-Prokhorov
//!   metric (max-flow algorithm plus a brute-force subset oracle), total
//!   variation and KL divergence.
//! - [`strategies`]: single-trial strategies (discrete tables, greedy scored
//!   rules, mixtures), exact and Monte Carlo chosen-value distributions,
//!   consistentization and scrambling.
//! - [`permutohedron`]: orderings, weight tuples and exact extreme-point
//!   enumeration of the polytope of achievable discrete distributions.
//! - [`simulate`]: seeded environments, strategy runs and empirical
//!   convergence checks.
//! - [`entropy`]: Gibbs free energy and the dual (variational) estimate of
//!   grid entropy over binned potentials.
//! - [`paths`]: exact path counting over empirical-histogram states.
//!
//! Numeric cores are generic over the scalar type. Discrete strategy tables
//! and pmfs accept any [`Scalar`] (floats or exact rationals); measure and
//! entropy code accepts any [`Real`] float. The aliases below pin the common
//! concrete choices.

pub mod entropy;
pub mod error;
pub mod formats;
pub mod measures;
pub mod paths;
pub mod permutohedron;
pub mod rng;
pub mod scalar;
pub mod simulate;
pub mod strategies;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Exact rational scalar used for discrete tables and pmfs.
pub type Exact = num_rational::BigRational;

/// Exact-probability pmf on `{1..K}`.
pub type RationalPmf = strategies::Pmf<Exact>;
/// Strategy table with exact rational entries.
pub type ExactTable = strategies::StrategyTable<Exact>;
/// Strategy table with `f64` entries, used for sampling.
pub type FloatTable = strategies::StrategyTable<f64>;

pub type AtomicMeasure = measures::AtomicMeasure<f64>;
pub type BinnedMeasure = measures::BinnedMeasure<f64>;
pub type TauFunction = entropy::TauFunction<f64>;
pub type DualReport = entropy::DualReport<f64>;

//! Single-trial strategies and the law of the value they keep.
//!
//! A strategy sees one trial's `D` labels and returns the (0-based) position
//! it keeps. Three kinds exist: discrete [`StrategyTable`]s over labels
//! `{0..K-1}`, greedy [`ScoredStrategy`]s over values in `[0,1]`, and
//! [`MixtureStrategy`]s that first draw a component.

mod consistency;
mod pmf;
mod scored;
mod table;
mod value_distribution;

pub use consistency::{is_consistent, make_consistent, scramble};
pub use pmf::Pmf;
pub use scored::{sigma_max_cdf, sigma_scored_mc, Score, ScoredStrategy};
pub use table::{sigma_discrete, StrategyTable, ENUMERATION_LIMIT};
pub use value_distribution::{density_value_distribution, max_density_law, ValueDistribution};

pub(crate) use consistency::permutations;
pub(crate) use table::{decode_into, from_choice_map, tuple_count};

use rand::Rng;

use crate::error::{contract, Error, Result};

/// One trial's observed labels.
#[derive(Debug, Clone, Copy)]
pub enum Row<'a> {
    /// Continuous model: values in `[0,1]`.
    Values(&'a [f64]),
    /// Discrete model: labels in `0..K`.
    Labels(&'a [usize]),
}

impl Row<'_> {
    pub fn len(&self) -> usize {
        match self {
            Row::Values(v) => v.len(),
            Row::Labels(l) => l.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Label space a strategy acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyDomain {
    Continuous,
    Discrete { k: usize, d: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    Table(StrategyTable<f64>),
    Scored(ScoredStrategy),
    Mixture(MixtureStrategy),
}

impl Strategy {
    pub fn domain(&self) -> StrategyDomain {
        match self {
            Strategy::Table(t) => StrategyDomain::Discrete { k: t.k(), d: t.d() },
            Strategy::Scored(_) => StrategyDomain::Continuous,
            Strategy::Mixture(m) => m.domain,
        }
    }

    /// Position (0-based) kept from `row`.
    pub fn choose<R: Rng + ?Sized>(&self, row: Row<'_>, rng: &mut R) -> Result<usize> {
        match (self, row) {
            (Strategy::Table(t), Row::Labels(l)) => t.sample(l, rng),
            (Strategy::Scored(s), Row::Values(v)) => s.choose(v),
            (Strategy::Mixture(m), row) => m.choose(row, rng),
            (Strategy::Table(_), Row::Values(_)) => {
                Err(Error::Domain("discrete table given continuous values".into()))
            }
            (Strategy::Scored(_), Row::Labels(_)) => {
                Err(Error::Domain("scored strategy given discrete labels".into()))
            }
        }
    }
}

impl From<StrategyTable<f64>> for Strategy {
    fn from(t: StrategyTable<f64>) -> Self {
        Strategy::Table(t)
    }
}

impl From<ScoredStrategy> for Strategy {
    fn from(s: ScoredStrategy) -> Self {
        Strategy::Scored(s)
    }
}

impl From<MixtureStrategy> for Strategy {
    fn from(m: MixtureStrategy) -> Self {
        Strategy::Mixture(m)
    }
}

/// Draws component `i` with probability `weights[i]`, then delegates.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureStrategy {
    components: Vec<Strategy>,
    weights: Vec<f64>,
    domain: StrategyDomain,
}

impl MixtureStrategy {
    pub fn components(&self) -> &[Strategy] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn choose<R: Rng + ?Sized>(&self, row: Row<'_>, rng: &mut R) -> Result<usize> {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        for (c, w) in self.components.iter().zip(&self.weights) {
            acc += w;
            if r < acc {
                return c.choose(row, rng);
            }
        }
        let last = self.weights.iter().rposition(|&w| w > 0.0).unwrap_or(0);
        self.components[last].choose(row, rng)
    }
}

/// Convex combination of strategies acting on the same label space.
pub fn mixture(components: Vec<Strategy>, weights: Vec<f64>) -> Result<MixtureStrategy> {
    if components.is_empty() || components.len() != weights.len() {
        return contract("one weight per component required");
    }
    pmf::check_convex(&weights)?;
    let domain = components[0].domain();
    if components.iter().any(|c| c.domain() != domain) {
        return contract("mixture components act on different label spaces");
    }
    Ok(MixtureStrategy { components, weights, domain })
}

//! JSON files for measures, strategies and potentials.
//!
//! ```json
//! {"type": "binned", "weights": [0.25, 0.25, 0.5]}
//! {"type": "atoms", "atoms": [[0.2, 0.5], [0.7, 0.5]]}
//! {"type": "table", "K": 2, "D": 2, "entries": [[1,2],[1,2], [0,1],[1,1], [1,1],[0,1], [1,2],[1,2]]}
//! {"type": "scored", "score": "identity", "D": 3}
//! {"type": "mixture", "weights": [0.5, 0.5], "components": [ ... ]}
//! {"type": "tau", "values": [0.0, 0.69], "beta": 1.0}
//! ```
//!
//! Table entries are `[numerator, denominator]` pairs listed tuple by tuple
//! in lexicographic order, `D` entries per tuple.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::entropy::TauFunction;
use crate::error::{Error, Result};
use crate::measures::{AtomicMeasure, BinnedMeasure};
use crate::strategies::{mixture, Score, ScoredStrategy, Strategy, StrategyTable};
use crate::Exact;

fn format_err(e: impl std::fmt::Display) -> Error {
    Error::Format(e.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureFile {
    Binned { weights: Vec<f64> },
    Atoms { atoms: Vec<[f64; 2]> },
}

impl MeasureFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(format_err)
    }

    pub fn from_binned(mu: &BinnedMeasure<f64>) -> Self {
        MeasureFile::Binned { weights: mu.weights().to_vec() }
    }

    pub fn to_atomic(&self) -> Result<AtomicMeasure<f64>> {
        match self {
            MeasureFile::Binned { weights } => Ok(BinnedMeasure::new(weights.clone())?.center_atoms()),
            MeasureFile::Atoms { atoms } => AtomicMeasure::new(atoms.iter().map(|a| (a[0], a[1]))),
        }
    }

    /// The measure on `m` bins; binned files at another resolution are re-binned through their bin centers.
    pub fn to_binned(&self, m: usize) -> Result<BinnedMeasure<f64>> {
        match self {
            MeasureFile::Binned { weights } if weights.len() == m => BinnedMeasure::new(weights.clone()),
            _ => self.to_atomic()?.bin(m),
        }
    }

    /// Natural resolution of a binned file.
    pub fn resolution(&self) -> Option<usize> {
        match self {
            MeasureFile::Binned { weights } => Some(weights.len()),
            MeasureFile::Atoms { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScoreSpec {
    Named(String),
    Bins { bins: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum StrategyFile {
    Table {
        #[serde(rename = "K")]
        k: usize,
        #[serde(rename = "D")]
        d: usize,
        entries: Vec<[i64; 2]>,
    },
    Scored {
        score: ScoreSpec,
        #[serde(rename = "D")]
        d: usize,
    },
    Mixture {
        weights: Vec<f64>,
        components: Vec<StrategyFile>,
    },
}

impl StrategyFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(format_err)
    }

    /// Samples per trial the strategy is written for.
    pub fn d(&self) -> Result<usize> {
        match self {
            StrategyFile::Table { d, .. } | StrategyFile::Scored { d, .. } => Ok(*d),
            StrategyFile::Mixture { components, .. } => {
                let ds = components.iter().map(StrategyFile::d).collect::<Result<Vec<_>>>()?;
                match ds.split_first() {
                    Some((first, rest)) if rest.iter().all(|d| d == first) => Ok(*first),
                    _ => Err(Error::Format("mixture components disagree on D".into())),
                }
            }
        }
    }

    /// Exact rational table for `type: table` files.
    pub fn to_exact_table(&self) -> Result<StrategyTable<Exact>> {
        let StrategyFile::Table { k, d, entries } = self else {
            return Err(Error::Format("not a table strategy".into()));
        };
        let entries = entries
            .iter()
            .map(|&[n, den]| {
                if den <= 0 {
                    return Err(Error::Format(format!("denominator {den} is not positive")));
                }
                Ok(Exact::new(BigInt::from(n), BigInt::from(den)))
            })
            .collect::<Result<Vec<_>>>()?;
        StrategyTable::new(*k, *d, entries)
    }

    pub fn to_strategy(&self) -> Result<Strategy> {
        match self {
            StrategyFile::Table { .. } => Ok(Strategy::Table(self.to_exact_table()?.to_f64())),
            StrategyFile::Scored { score, .. } => {
                let score = match score {
                    ScoreSpec::Named(name) => match name.as_str() {
                        "identity" | "max" => Score::Identity,
                        "vee" => Score::Vee,
                        other => return Err(Error::Format(format!("unknown score {other:?}"))),
                    },
                    ScoreSpec::Bins { bins } => Score::Bins(bins.clone()),
                };
                Ok(Strategy::Scored(ScoredStrategy::new(score)?))
            }
            StrategyFile::Mixture { weights, components } => {
                self.d()?;
                let parts = components.iter().map(StrategyFile::to_strategy).collect::<Result<Vec<_>>>()?;
                Ok(Strategy::Mixture(mixture(parts, weights.clone())?))
            }
        }
    }

    /// File form of an exact table.
    pub fn from_exact_table(table: &StrategyTable<Exact>) -> Result<Self> {
        let entries = table
            .entries()
            .iter()
            .map(|p| {
                let n = i64::try_from(p.numer()).map_err(format_err)?;
                let d = i64::try_from(p.denom()).map_err(format_err)?;
                Ok([n, d])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(StrategyFile::Table { k: table.k(), d: table.d(), entries })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum TauFile {
    Tau {
        values: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        beta: Option<f64>,
    },
}

impl TauFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(format_err)
    }

    /// The potential, with `beta` overriding the file's value (default 1).
    pub fn to_tau(&self, beta: Option<f64>) -> Result<TauFunction<f64>> {
        let TauFile::Tau { values, beta: file_beta } = self;
        TauFunction::new(values.clone(), beta.or(*file_beta).unwrap_or(1.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measures_parse() {
        let b = MeasureFile::parse(r#"{"type":"binned","weights":[0.25,0.75]}"#).unwrap();
        assert_eq!(b.resolution(), Some(2));
        assert_eq!(b.to_binned(2).unwrap().weights(), &[0.25, 0.75]);
        assert_eq!(b.to_binned(4).unwrap().weights(), &[0.0, 0.25, 0.0, 0.75]);
        let a = MeasureFile::parse(r#"{"type":"atoms","atoms":[[0.2,1.0]]}"#).unwrap();
        assert_eq!(a.to_atomic().unwrap(), AtomicMeasure::dirac(0.2).unwrap());
        assert!(MeasureFile::parse(r#"{"type":"atoms","atoms":[[1.2,1.0]]}"#).unwrap().to_atomic().is_err());
        assert!(matches!(MeasureFile::parse(r#"{"type":"cloud"}"#), Err(Error::Format(_))));
        assert!(MeasureFile::parse("not json").is_err());
    }

    #[test]
    fn strategies_parse() {
        let s = StrategyFile::parse(r#"{"type":"scored","score":"vee","D":2}"#).unwrap();
        assert_eq!(s.to_strategy().unwrap(), Strategy::Scored(ScoredStrategy::vee()));
        let s = StrategyFile::parse(r#"{"type":"scored","score":{"bins":[1,2,3]},"D":2}"#).unwrap();
        assert!(matches!(s.to_strategy().unwrap(), Strategy::Scored(_)));
        assert!(StrategyFile::parse(r#"{"type":"scored","score":"cubic","D":2}"#).unwrap().to_strategy().is_err());

        let max = StrategyTable::<Exact>::max(2, 2).unwrap();
        let file = StrategyFile::from_exact_table(&max).unwrap();
        let text = serde_json::to_string(&file).unwrap();
        assert!(text.starts_with(r#"{"type":"table","K":2,"D":2,"entries":[[1,2],[1,2],[0,1],[1,1],"#));
        assert_eq!(StrategyFile::parse(&text).unwrap().to_exact_table().unwrap(), max);

        let mix = format!(r#"{{"type":"mixture","weights":[0.5,0.5],"components":[{text},{text}]}}"#);
        let m = StrategyFile::parse(&mix).unwrap();
        assert_eq!(m.d().unwrap(), 2);
        assert!(matches!(m.to_strategy().unwrap(), Strategy::Mixture(_)));
        let bad = r#"{"type":"mixture","weights":[0.5,0.5],"components":[
            {"type":"scored","score":"vee","D":2},{"type":"scored","score":"vee","D":3}]}"#;
        assert!(StrategyFile::parse(bad).unwrap().to_strategy().is_err());
        let bad_den = r#"{"type":"table","K":1,"D":1,"entries":[[1,0]]}"#;
        assert!(StrategyFile::parse(bad_den).unwrap().to_exact_table().is_err());
    }

    #[test]
    fn tau_parse() {
        let t = TauFile::parse(r#"{"type":"tau","values":[0.0,1.5]}"#).unwrap();
        assert_eq!(t.to_tau(None).unwrap().beta(), 1.0);
        assert_eq!(t.to_tau(Some(2.0)).unwrap().beta(), 2.0);
        let t = TauFile::parse(r#"{"type":"tau","values":[0.0],"beta":0.5}"#).unwrap();
        assert_eq!(t.to_tau(None).unwrap().beta(), 0.5);
        assert!(TauFile::parse(r#"{"type":"tau","values":[0.0],"beta":-1}"#).unwrap().to_tau(None).is_err());
    }
}

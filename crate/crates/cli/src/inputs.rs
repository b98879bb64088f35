//! Builtin names and input files for `--nu`, `--tau`, `--strategy`, `--a` and `--b`.

use std::fs;
use std::path::Path;

use gridlab::formats::{MeasureFile, StrategyFile, TauFile};
use gridlab::measures::{AtomicMeasure, BinnedMeasure};
use gridlab::strategies::{ScoredStrategy, Strategy, StrategyTable};
use gridlab::{Exact, TauFunction};

use crate::CliError;

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: Path::new(path).to_path_buf(), source })
}

fn in_file(path: &str, e: gridlab::Error) -> CliError {
    CliError::File { path: path.into(), source: e }
}

/// `uniform`, `sigma_max`, or a measure file, on `m` bins.
pub fn binned_measure(spec: &str, m: usize, d: usize) -> Result<BinnedMeasure<f64>, CliError> {
    match spec {
        "uniform" => Ok(BinnedMeasure::uniform(m)?),
        "sigma_max" => Ok(BinnedMeasure::sigma_max(m, d)?),
        path => {
            let file = MeasureFile::parse(&read(path)?).map_err(|e| in_file(path, e))?;
            let nu = file.to_binned(m).map_err(|e| in_file(path, e))?;
            if !nu.is_probability() {
                let e = gridlab::Error::Format(format!("total mass {} is not 1", nu.total_mass()));
                return Err(in_file(path, e));
            }
            Ok(nu)
        }
    }
}

/// Resolution of a binned measure file, if `spec` names one.
pub fn natural_resolution(spec: &str) -> Result<Option<usize>, CliError> {
    match spec {
        "uniform" | "sigma_max" => Ok(None),
        path => Ok(MeasureFile::parse(&read(path)?).map_err(|e| in_file(path, e))?.resolution()),
    }
}

/// Builtin measures become their bin-center atoms on `m` bins.
pub fn atomic_measure(spec: &str, m: usize, d: usize) -> Result<AtomicMeasure<f64>, CliError> {
    match spec {
        "uniform" | "sigma_max" => Ok(binned_measure(spec, m, d)?.center_atoms()),
        path => MeasureFile::parse(&read(path)?).and_then(|f| f.to_atomic()).map_err(|e| in_file(path, e)),
    }
}

/// `zero`, or a potential file.
pub fn tau(spec: &str, m: usize, beta: Option<f64>) -> Result<TauFunction, CliError> {
    match spec {
        "zero" => Ok(TauFunction::constant(m, 0.0, beta.unwrap_or(1.0))?),
        path => TauFile::parse(&read(path)?).and_then(|f| f.to_tau(beta)).map_err(|e| in_file(path, e)),
    }
}

/// A resolved strategy and the `D` it plays with.
pub struct LoadedStrategy {
    pub strategy: Strategy,
    pub d: usize,
}

/// Builtins: `max`/`identity` and `vee` (scored, or tables when `K` is given
/// for `max`), `min` and `uniform` (tables, need `K`). Anything else is a file.
pub fn strategy(spec: &str, k: Option<usize>, d: Option<usize>) -> Result<LoadedStrategy, CliError> {
    let d_or_default = d.unwrap_or(2);
    let table = |build: fn(usize, usize) -> gridlab::Result<StrategyTable<Exact>>| -> Result<LoadedStrategy, CliError> {
        let k = k.ok_or_else(|| CliError::Usage(format!("strategy {spec:?} needs --K")))?;
        let t = build(k, d_or_default)?;
        Ok(LoadedStrategy { strategy: Strategy::Table(t.to_f64()), d: d_or_default })
    };
    match (spec, k) {
        ("max" | "identity", None) => Ok(LoadedStrategy { strategy: ScoredStrategy::max().into(), d: d_or_default }),
        ("max" | "identity", Some(_)) => table(StrategyTable::max),
        ("vee", _) => Ok(LoadedStrategy { strategy: ScoredStrategy::vee().into(), d: d_or_default }),
        ("min", _) => table(StrategyTable::min),
        ("uniform", _) => table(StrategyTable::uniform),
        (path, _) => {
            let file = StrategyFile::parse(&read(path)?).map_err(|e| in_file(path, e))?;
            let file_d = file.d().map_err(|e| in_file(path, e))?;
            if let Some(d) = d.filter(|&d| d != file_d) {
                return Err(CliError::Usage(format!("--D {d} disagrees with D = {file_d} in {path}")));
            }
            let strategy = file.to_strategy().map_err(|e| in_file(path, e))?;
            Ok(LoadedStrategy { strategy, d: file_d })
        }
    }
}

//! `gridlab`: command-line front end for the selection-model toolkit.

mod commands;
mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    File { path: String, source: gridlab::Error },
    #[error(transparent)]
    Lib(#[from] gridlab::Error),
    #[error("csv output: {0}")]
    Csv(csv::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(name = "gridlab", version, about = "Draw D uniform samples, keep one: strategies, measures and grid entropy")]
struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, env = "GRIDLAB_SEED", default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a strategy on a fresh environment and compare with its chosen-value law.
    Simulate(SimulateArgs),
    /// Dual estimate of grid entropy, one row per bin count.
    Dual(DualArgs),
    /// Gibbs free energy of a binned potential.
    Gibbs(GibbsArgs),
    /// Exact path counts, slopes and order statistics.
    Paths(PathsArgs),
    /// Extreme points of the discrete strategy polytope.
    Discrete(DiscreteArgs),
    /// Levy-Prokhorov distance between two measures.
    Lp(LpArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// max, identity, vee, min, uniform, or a strategy file.
    #[arg(long, default_value = "max")]
    strategy: String,
    #[arg(long = "K")]
    k: Option<usize>,
    /// Samples per trial (default 2, or the strategy file's D).
    #[arg(long = "D")]
    d: Option<usize>,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    m: usize,
}

#[derive(Debug, Args)]
pub struct DualArgs {
    /// uniform, sigma_max, or a measure file.
    #[arg(long, default_value = "uniform")]
    nu: String,
    /// Bin counts (comma list); defaults to the file's resolution or 8.
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long = "D", default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Debug, Args)]
pub struct GibbsArgs {
    /// zero, or a potential file.
    #[arg(long, default_value = "zero")]
    tau: String,
    /// Bin count for the builtin potential.
    #[arg(long, default_value_t = 8)]
    m: usize,
    #[arg(long = "D", default_value_t = 2)]
    d: usize,
    /// Overrides the file's beta.
    #[arg(long)]
    beta: Option<f64>,
    /// Also estimate by Monte Carlo with this many trials.
    #[arg(long)]
    mc: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PathsArgs {
    #[arg(long, default_value = "uniform")]
    nu: String,
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Path lengths (comma list); the environment has the largest.
    #[arg(long, value_delimiter = ',', default_value = "20")]
    n: Vec<usize>,
    #[arg(long = "D", default_value_t = 2)]
    d: usize,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    eps: Vec<f64>,
    /// Order-statistic ranks (1-based) at the largest n.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    ranks: Vec<u128>,
}

#[derive(Debug, Args)]
pub struct DiscreteArgs {
    #[arg(long = "K")]
    k: usize,
    #[arg(long = "D", default_value_t = 2)]
    d: usize,
}

#[derive(Debug, Args)]
pub struct LpArgs {
    /// uniform, sigma_max, or a measure file.
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    /// Bin count for builtin measures.
    #[arg(long, default_value_t = 8)]
    m: usize,
    #[arg(long = "D", default_value_t = 2)]
    d: usize,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(CliError::Usage("--workers must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(w).build_global().expect("thread pool is built once");
    }
    let report = match &cli.command {
        Command::Simulate(a) => commands::simulate_cmd(a, cli.seed)?,
        Command::Dual(a) => commands::dual_cmd(a, cli.seed)?,
        Command::Gibbs(a) => commands::gibbs_cmd(a, cli.seed)?,
        Command::Paths(a) => commands::paths_cmd(a, cli.seed)?,
        Command::Discrete(a) => commands::discrete_cmd(a, cli.seed)?,
        Command::Lp(a) => commands::lp_cmd(a, cli.seed)?,
    };
    report.emit(cli.format, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

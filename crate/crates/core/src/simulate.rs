//! Seeded environments, strategy runs and empirical convergence checks.
//!
//! Row `i` of an environment is drawn from its own stream
//! `(seed, DOMAIN_ENVIRONMENT, i)` and the strategy's internal randomness on
//! trial `i` from `(seed, DOMAIN_CHOICE, i)`, so results do not depend on
//! worker count or on whether rows are materialised first.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{contract, size, Result};
use crate::measures::{bin_index, lp_distance_binned, total_variation_binned, AtomicMeasure, BinnedMeasure};
use crate::rng;
use crate::strategies::{Pmf, Row, Score, Strategy, StrategyDomain};

/// Largest `n · D` that will be sampled.
pub const ENVIRONMENT_LIMIT: usize = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// Labels uniform on `[0,1]`.
    Continuous,
    /// Labels uniform on `{0..K-1}`.
    Discrete { k: usize },
}

impl Model {
    fn check(&self) -> Result<()> {
        match self {
            Model::Discrete { k: 0 } => contract("discrete model needs K ≥ 1"),
            _ => Ok(()),
        }
    }

    fn accepts(&self, domain: StrategyDomain, d: usize) -> bool {
        match (self, domain) {
            (Model::Continuous, StrategyDomain::Continuous) => true,
            (Model::Discrete { k }, StrategyDomain::Discrete { k: sk, d: sd }) => *k == sk && d == sd,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Labels {
    Continuous(Vec<f64>),
    Discrete(Vec<usize>),
}

/// An `n × D` array of i.i.d. labels, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    n: usize,
    d: usize,
    model: Model,
    seed: u64,
    labels: Labels,
}

fn fill_row(model: Model, seed: u64, i: usize, values: &mut [f64], labels: &mut [usize]) {
    let mut r = rng::stream(seed, rng::DOMAIN_ENVIRONMENT, i as u64);
    match model {
        Model::Continuous => values.iter_mut().for_each(|u| *u = r.gen()),
        Model::Discrete { k } => labels.iter_mut().for_each(|u| *u = r.gen_range(0..k)),
    }
}

fn check_size(n: usize, d: usize) -> Result<()> {
    if d == 0 {
        return contract("D must be positive");
    }
    if n.checked_mul(d).is_none_or(|x| x > ENVIRONMENT_LIMIT) {
        return size(format!("n·D = {n}·{d} exceeds {ENVIRONMENT_LIMIT}"));
    }
    Ok(())
}

pub fn sample_environment(n: usize, d: usize, model: Model, seed: u64) -> Result<Environment> {
    check_size(n, d)?;
    model.check()?;
    let labels = match model {
        Model::Continuous => {
            let mut v = vec![0.0; n * d];
            v.par_chunks_mut(d).enumerate().for_each(|(i, row)| fill_row(model, seed, i, row, &mut []));
            Labels::Continuous(v)
        }
        Model::Discrete { .. } => {
            let mut v = vec![0; n * d];
            v.par_chunks_mut(d).enumerate().for_each(|(i, row)| fill_row(model, seed, i, &mut [], row));
            Labels::Discrete(v)
        }
    };
    Ok(Environment { n, d, model, seed, labels })
}

impl Environment {
    /// Environment with given continuous rows; the seed is recorded as 0.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.first().map_or(1, Vec::len);
        if rows.iter().any(|r| r.len() != d) || d == 0 {
            return contract("rows must share a positive length");
        }
        if rows.iter().flatten().any(|u| !(0.0..=1.0).contains(u)) {
            return contract("labels must lie in [0,1]");
        }
        Ok(Self {
            n: rows.len(),
            d,
            model: Model::Continuous,
            seed: 0,
            labels: Labels::Continuous(rows.concat()),
        })
    }

    /// Environment with given discrete rows of labels in `0..k`; the seed is recorded as 0.
    pub fn from_label_rows(k: usize, rows: &[Vec<usize>]) -> Result<Self> {
        let d = rows.first().map_or(1, Vec::len);
        if rows.iter().any(|r| r.len() != d) || d == 0 {
            return contract("rows must share a positive length");
        }
        if rows.iter().flatten().any(|&u| u >= k) {
            return contract(format!("labels must lie in 0..{k}"));
        }
        Ok(Self {
            n: rows.len(),
            d,
            model: Model::Discrete { k },
            seed: 0,
            labels: Labels::Discrete(rows.concat()),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row(&self, i: usize) -> Row<'_> {
        let span = i * self.d..(i + 1) * self.d;
        match &self.labels {
            Labels::Continuous(v) => Row::Values(&v[span]),
            Labels::Discrete(v) => Row::Labels(&v[span]),
        }
    }

    /// Row `i` as values in `[0,1]`; discrete label `x` maps to `(x + ½)/K`.
    pub fn row_values(&self, i: usize) -> Vec<f64> {
        match (self.row(i), self.model) {
            (Row::Values(v), _) => v.to_vec(),
            (Row::Labels(l), Model::Discrete { k }) => l.iter().map(|&x| label_position(x, k)).collect(),
            (Row::Labels(_), Model::Continuous) => unreachable!("continuous environments store values"),
        }
    }
}

/// Position of discrete label `x` in `[0,1]`: the center of its cell.
pub fn label_position(x: usize, k: usize) -> f64 {
    (x as f64 + 0.5) / k as f64
}

/// Which strategy plays each trial.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    /// The same strategy on every trial.
    Single(Strategy),
    /// Trial `i` plays `pool[schedule[i]]`.
    PerTrial { pool: Vec<Strategy>, schedule: Vec<usize> },
}

impl Plan {
    /// One strategy per trial, in order.
    pub fn per_trial(list: Vec<Strategy>) -> Self {
        let schedule = (0..list.len()).collect();
        Plan::PerTrial { pool: list, schedule }
    }

    /// Cycles through `pool` for `n` trials.
    pub fn alternating(pool: Vec<Strategy>, n: usize) -> Result<Self> {
        if pool.is_empty() {
            return contract("alternating plan needs at least one strategy");
        }
        let schedule = (0..n).map(|i| i % pool.len()).collect();
        Ok(Plan::PerTrial { pool, schedule })
    }

    fn strategy(&self, i: usize) -> &Strategy {
        match self {
            Plan::Single(s) => s,
            Plan::PerTrial { pool, schedule } => &pool[schedule[i]],
        }
    }

    fn check(&self, n: usize, d: usize, model: Model) -> Result<()> {
        let pool: &[Strategy] = match self {
            Plan::Single(s) => std::slice::from_ref(s),
            Plan::PerTrial { pool, schedule } => {
                if schedule.len() != n {
                    return contract(format!("plan covers {} trials, environment has {n}", schedule.len()));
                }
                if schedule.iter().any(|&j| j >= pool.len()) {
                    return contract("schedule refers to a missing strategy");
                }
                pool
            }
        };
        if let Some(s) = pool.iter().find(|s| !model.accepts(s.domain(), d)) {
            return contract(format!("strategy acting on {:?} cannot play {model:?} with D = {d}", s.domain()));
        }
        Ok(())
    }
}

/// Kept values of a run.
#[derive(Debug, Clone, PartialEq)]
pub enum ChosenValues {
    Continuous(Vec<f64>),
    Discrete { k: usize, labels: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Position (0-based) kept on each trial.
    pub choices: Vec<usize>,
    pub values: ChosenValues,
}

impl RunResult {
    pub fn n(&self) -> usize {
        self.choices.len()
    }

    /// Kept values in `[0,1]` (discrete labels at cell centers).
    pub fn positions(&self) -> Vec<f64> {
        match &self.values {
            ChosenValues::Continuous(v) => v.clone(),
            ChosenValues::Discrete { k, labels } => labels.iter().map(|&x| label_position(x, *k)).collect(),
        }
    }

    /// `(1/n) Σ δ_{X_i}`.
    pub fn empirical(&self) -> Result<AtomicMeasure<f64>> {
        AtomicMeasure::empirical(&self.positions())
    }

    /// Empirical measure binned to `m` bins, counted directly.
    pub fn empirical_binned(&self, m: usize) -> Result<BinnedMeasure<f64>> {
        if m == 0 {
            return contract("bin count must be positive");
        }
        if self.n() == 0 {
            return BinnedMeasure::new(vec![0.0; m]);
        }
        let mut counts = vec![0usize; m];
        for x in self.positions() {
            counts[bin_index(x, m)] += 1;
        }
        BinnedMeasure::new(counts.into_iter().map(|c| c as f64 / self.n() as f64).collect())
    }

    /// Label frequencies for discrete runs.
    pub fn empirical_pmf(&self) -> Option<Pmf<f64>> {
        let ChosenValues::Discrete { k, labels } = &self.values else {
            return None;
        };
        let mut counts = vec![0usize; *k];
        labels.iter().for_each(|&x| counts[x] += 1);
        let n = labels.len().max(1) as f64;
        Pmf::new(counts.into_iter().map(|c| c as f64 / n).collect()).ok()
    }
}

fn play(plan: &Plan, row: Row<'_>, seed: u64, i: usize) -> Result<usize> {
    let mut r = rng::stream(seed, rng::DOMAIN_CHOICE, i as u64);
    plan.strategy(i).choose(row, &mut r)
}

fn collect(model: Model, outcomes: Vec<(usize, f64, usize)>) -> RunResult {
    let choices = outcomes.iter().map(|o| o.0).collect();
    let values = match model {
        Model::Continuous => ChosenValues::Continuous(outcomes.iter().map(|o| o.1).collect()),
        Model::Discrete { k } => ChosenValues::Discrete { k, labels: outcomes.iter().map(|o| o.2).collect() },
    };
    RunResult { choices, values }
}

/// Plays `plan` on every row of `env`; `seed` drives strategy-internal randomness.
pub fn run(env: &Environment, plan: &Plan, seed: u64) -> Result<RunResult> {
    plan.check(env.n, env.d, env.model)?;
    let outcomes = (0..env.n)
        .into_par_iter()
        .map(|i| {
            let row = env.row(i);
            let j = play(plan, row, seed, i)?;
            Ok(match row {
                Row::Values(v) => (j, v[j], 0),
                Row::Labels(l) => (j, 0.0, l[j]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(env.model, outcomes))
}

/// Same as sampling the environment with `seed` and running, without storing the rows.
pub fn simulate(n: usize, d: usize, model: Model, plan: &Plan, seed: u64) -> Result<RunResult> {
    check_size(n, d)?;
    model.check()?;
    plan.check(n, d, model)?;
    let outcomes = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0; d], vec![0usize; d]),
            |(values, labels), i| {
                let (values, labels) = match model {
                    Model::Continuous => (&mut values[..], &mut [][..]),
                    Model::Discrete { .. } => (&mut [][..], &mut labels[..]),
                };
                fill_row(model, seed, i, values, labels);
                Ok(match model {
                    Model::Continuous => {
                        let j = play(plan, Row::Values(values), seed, i)?;
                        (j, values[j], 0)
                    }
                    Model::Discrete { .. } => {
                        let j = play(plan, Row::Labels(labels), seed, i)?;
                        (j, 0.0, labels[j])
                    }
                })
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(collect(model, outcomes))
}

fn model_for(strategy: &Strategy) -> Model {
    match strategy.domain() {
        StrategyDomain::Continuous => Model::Continuous,
        StrategyDomain::Discrete { k, .. } => Model::Discrete { k },
    }
}

/// Trials used for Monte Carlo references when no closed form is available.
pub const REFERENCE_TRIALS: usize = 4_000_000;

/// Exact chosen-label pmf of a discrete strategy (tables and their mixtures).
pub fn exact_pmf(strategy: &Strategy) -> Option<Pmf<f64>> {
    match strategy {
        Strategy::Table(t) => Some(t.sigma()),
        Strategy::Scored(_) => None,
        Strategy::Mixture(m) => {
            let parts = m.components().iter().map(exact_pmf).collect::<Option<Vec<_>>>()?;
            Pmf::mixture(&parts, m.weights()).ok()
        }
    }
}

/// Chosen-value law on `m` bins: exact where possible, else Monte Carlo with [`REFERENCE_TRIALS`].
pub fn reference_sigma(strategy: &Strategy, d: usize, m: usize, seed: u64) -> Result<BinnedMeasure<f64>> {
    match strategy {
        Strategy::Table(t) => {
            let sigma = t.sigma();
            let atoms = (0..t.k()).map(|x| (label_position(x, t.k()), *sigma.mass(x)));
            AtomicMeasure::new(atoms)?.bin(m)
        }
        Strategy::Scored(s) => match s.score() {
            Score::Identity | Score::Vee => BinnedMeasure::from_cdf(m, |y| s.closed_form_cdf(y, d).expect("closed form")),
            Score::Bins(_) if s.closed_form_cdf(0.5, d).is_some() => BinnedMeasure::uniform(m),
            Score::Bins(_) => crate::strategies::sigma_scored_mc(s, d, REFERENCE_TRIALS, m, seed),
        },
        Strategy::Mixture(mix) => {
            let mut acc = vec![0.0; m];
            for (c, w) in mix.components().iter().zip(mix.weights()) {
                let part = reference_sigma(c, d, m, seed)?;
                acc.iter_mut().zip(part.weights()).for_each(|(a, p)| *a += w * p);
            }
            BinnedMeasure::new(acc)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlivenkoPoint {
    pub n: usize,
    /// `ρ(bin(empirical, m), target)`.
    pub rho: f64,
    /// Total variation between the binned empirical measure and the target.
    pub tv: f64,
    /// Total variation between label frequencies and the exact pmf (discrete strategies).
    pub tv_pmf: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlivenkoReport {
    pub points: Vec<GlivenkoPoint>,
    /// Least-squares slope of `log ρ` against `log n`; about `-½` when sampling error dominates.
    pub log_log_slope: Option<f64>,
}

/// Least-squares slope of `ys` against `xs`.
pub fn regression_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn pmf_tv(a: &Pmf<f64>, b: &Pmf<f64>) -> f64 {
    0.5 * a.probs().iter().zip(b.probs()).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Distances from the empirical measure of `n` i.i.d. trials to the strategy's own chosen-value law.
pub fn glivenko_check(strategy: &Strategy, d: usize, n_list: &[usize], m: usize, seed: u64) -> Result<GlivenkoReport> {
    let model = model_for(strategy);
    let target = reference_sigma(strategy, d, m, seed)?;
    let exact = exact_pmf(strategy);
    let plan = Plan::Single(strategy.clone());
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        if n == 0 {
            return contract("sample sizes must be positive");
        }
        let result = simulate(n, d, model, &plan, seed)?;
        let binned = result.empirical_binned(m)?;
        let tv_pmf = match (&exact, result.empirical_pmf()) {
            (Some(e), Some(p)) => Some(pmf_tv(&p, e)),
            _ => None,
        };
        points.push(GlivenkoPoint {
            n,
            rho: lp_distance_binned(&binned, &target)?,
            tv: total_variation_binned(&binned, &target)?,
            tv_pmf,
        });
    }
    let usable: Vec<_> = points.iter().filter(|p| p.rho > 0.0).collect();
    let xs: Vec<f64> = usable.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|p| p.rho.ln()).collect();
    Ok(GlivenkoReport { log_log_slope: regression_slope(&xs, &ys), points })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AveragedReport {
    /// Exact `σ̄_n = (1/n) Σ σ_{ψ_i}`.
    pub averaged: Pmf<f64>,
    /// `ρ` between the binned empirical measure and binned `σ̄_n`.
    pub rho: f64,
    /// Total variation between label frequencies and `σ̄_n`.
    pub tv: f64,
}

/// Runs independent, non-identical discrete strategies and compares with the averaged law.
pub fn averaged_strategy_check(plan: &Plan, d: usize, n: usize, m: usize, seed: u64) -> Result<AveragedReport> {
    let (pool, uses): (Vec<&Strategy>, Vec<usize>) = match plan {
        Plan::Single(s) => (vec![s], vec![n]),
        Plan::PerTrial { pool, schedule } => {
            let mut uses = vec![0; pool.len()];
            schedule.iter().filter(|&&j| j < pool.len()).for_each(|&j| uses[j] += 1);
            (pool.iter().collect(), uses)
        }
    };
    let pmfs = pool.iter().map(|s| exact_pmf(s)).collect::<Option<Vec<_>>>();
    let Some(pmfs) = pmfs else {
        return contract("averaged check needs discrete strategies with exact pmfs");
    };
    if n == 0 {
        return contract("averaged check needs at least one trial");
    }
    let model = model_for(pool[0]);
    let Model::Discrete { k } = model else { unreachable!("exact pmfs are discrete") };
    let result = simulate(n, d, model, plan, seed)?;
    let weights: Vec<f64> = uses.iter().map(|&u| u as f64 / n as f64).collect();
    let averaged = Pmf::mixture(&pmfs, &weights)?;
    let atoms = (0..k).map(|x| (label_position(x, k), *averaged.mass(x)));
    let target = AtomicMeasure::new(atoms)?.bin(m)?;
    let empirical = result.empirical_pmf().expect("discrete run");
    Ok(AveragedReport {
        rho: lp_distance_binned(&result.empirical_binned(m)?, &target)?,
        tv: pmf_tv(&empirical, &averaged),
        averaged,
    })
}

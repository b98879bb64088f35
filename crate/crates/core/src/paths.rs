//! Exact statistics over all `D^n` paths of an environment.
//!
//! A path keeps one label per trial. Its binned empirical measure only
//! depends on the histogram `c ∈ N^m` of kept bins, so paths are grouped by
//! histogram with a dynamic program over trials:
//! `count(c + e_b) += count(c) · d_i[b]` where `d_i[b]` is the number of
//! labels of trial `i` in bin `b`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{contract, size, Result};
use crate::measures::{bin_index, BinnedMeasure, GridLp};
use crate::simulate::Environment;

/// Largest number of histogram states `C(n+m-1, m-1)` the DP will hold.
pub const STATE_LIMIT: usize = 10_000_000;

/// Path counts: exact integers while `D^n < 2^127`, natural logs beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PathCount {
    Exact(u128),
    Log(f64),
}

impl PathCount {
    pub fn ln(&self) -> f64 {
        match *self {
            PathCount::Exact(0) => f64::NEG_INFINITY,
            PathCount::Exact(c) => (c as f64).ln(),
            PathCount::Log(l) => l,
        }
    }

    pub fn exact(&self) -> Option<u128> {
        match *self {
            PathCount::Exact(c) => Some(c),
            PathCount::Log(_) => None,
        }
    }
}

trait Count: Copy + Send + Sync + PartialEq {
    const ZERO: Self;
    fn add(self, other: Self) -> Self;
    fn times(self, k: u32) -> Self;
    fn to_path_count(self) -> PathCount;
}

impl Count for u128 {
    const ZERO: Self = 0;

    fn add(self, other: Self) -> Self {
        self + other
    }

    fn times(self, k: u32) -> Self {
        self * k as u128
    }

    fn to_path_count(self) -> PathCount {
        PathCount::Exact(self)
    }
}

/// A count stored as its natural log.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LogCount(f64);

impl Count for LogCount {
    const ZERO: Self = LogCount(f64::NEG_INFINITY);

    fn add(self, other: Self) -> Self {
        let (hi, lo) = if self.0 >= other.0 { (self.0, other.0) } else { (other.0, self.0) };
        if lo == f64::NEG_INFINITY {
            return LogCount(hi);
        }
        LogCount(hi + (lo - hi).exp().ln_1p())
    }

    fn times(self, k: u32) -> Self {
        LogCount(self.0 + (k as f64).ln())
    }

    fn to_path_count(self) -> PathCount {
        PathCount::Log(self.0)
    }
}

/// Histogram states after some number of trials, sorted by packed key.
#[derive(Debug, Clone, PartialEq)]
pub struct PathHistogram {
    n: usize,
    d: usize,
    m: usize,
    bits: u32,
    keys: Vec<u128>,
    counts: Vec<PathCount>,
}

impl PathHistogram {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// True when counts are exact integers.
    pub fn is_exact(&self) -> bool {
        self.counts.iter().all(|c| matches!(c, PathCount::Exact(_)))
    }

    pub fn histogram(&self, i: usize) -> Vec<usize> {
        unpack(self.keys[i], self.m, self.bits)
    }

    pub fn count(&self, i: usize) -> PathCount {
        self.counts[i]
    }

    /// `(histogram, count)` pairs.
    pub fn states(&self) -> impl Iterator<Item = (Vec<usize>, PathCount)> + '_ {
        (0..self.len()).map(|i| (self.histogram(i), self.counts[i]))
    }

    /// Sum of all counts, `D^n` when every trial has `D` labels.
    pub fn total(&self) -> PathCount {
        if self.is_exact() {
            PathCount::Exact(self.counts.iter().filter_map(PathCount::exact).sum())
        } else {
            let logs: Vec<f64> = self.counts.iter().map(PathCount::ln).collect();
            PathCount::Log(crate::scalar::log_sum_exp(logs))
        }
    }

    /// The binned empirical measure `c/n` of state `i`.
    pub fn measure(&self, i: usize) -> Vec<f64> {
        self.histogram(i).into_iter().map(|c| c as f64 / self.n as f64).collect()
    }
}

fn unpack(key: u128, m: usize, bits: u32) -> Vec<usize> {
    let mask = (1u128 << bits) - 1;
    (0..m).map(|b| ((key >> (b as u32 * bits)) & mask) as usize).collect()
}

fn binomial(n: usize, k: usize) -> Option<usize> {
    let k = k.min(n.saturating_sub(k));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// Per-bin label multiplicities `d_i[b]` of trial `i`.
fn multiplicities(env: &Environment, i: usize, m: usize) -> Vec<(usize, u32)> {
    let mut d = vec![0u32; m];
    for u in env.row_values(i) {
        d[bin_index(u, m)] += 1;
    }
    d.into_iter().enumerate().filter(|&(_, c)| c > 0).collect()
}

fn bits_for(n: usize) -> u32 {
    usize::BITS - n.leading_zeros()
}

fn check_dp(env: &Environment, m: usize, n: usize) -> Result<u32> {
    if m == 0 {
        return contract("bin count must be positive");
    }
    if n > env.n() {
        return contract(format!("prefix of {n} trials requested from {} trials", env.n()));
    }
    let states = binomial(n + m - 1, m - 1).filter(|&s| s <= STATE_LIMIT);
    if states.is_none() {
        return size(format!("C(n+m-1, m-1) for n = {n}, m = {m} exceeds {STATE_LIMIT}"));
    }
    let bits = bits_for(n).max(1);
    if bits as usize * m > 128 {
        return size(format!("histograms with m = {m} bins and n = {n} do not pack into 128 bits"));
    }
    Ok(bits)
}

/// True when `D^n < 2^127`, so every count fits in a `u128` with room for the sum.
fn fits_exact(d: usize, n: usize) -> bool {
    (n as f64) * (d as f64).log2() < 127.0
}

/// Runs the DP over the first `max(n_list)` trials and reports the state table after each `n` in `n_list`.
fn dp_layers<C: Count>(
    env: &Environment,
    m: usize,
    n_list: &[usize],
    one: C,
    mut report: impl FnMut(usize, u32, Vec<u128>, Vec<C>) -> Result<()>,
) -> Result<()> {
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let bits = check_dp(env, m, n_max)?;
    let mut keys = vec![0u128];
    let mut counts = vec![one];
    if n_list.contains(&0) {
        report(0, bits, keys.clone(), counts.clone())?;
    }
    for i in 0..n_max {
        let mult = multiplicities(env, i, m);
        let mut next: Vec<(u128, C)> = keys
            .par_iter()
            .zip(&counts)
            .flat_map_iter(|(&key, &c)| mult.iter().map(move |&(b, k)| (key + (1u128 << (b as u32 * bits)), c.times(k))))
            .collect();
        next.par_sort_unstable_by_key(|e| e.0);
        keys.clear();
        counts.clear();
        for (key, c) in next {
            if keys.last() == Some(&key) {
                let last = counts.last_mut().expect("parallel to keys");
                *last = last.add(c);
            } else {
                keys.push(key);
                counts.push(c);
            }
        }
        if n_list.contains(&(i + 1)) {
            report(i + 1, bits, keys.clone(), counts.clone())?;
        }
    }
    Ok(())
}

/// Histogram states and path counts for each prefix length in `n_list`.
pub fn path_histogram_prefixes(env: &Environment, m: usize, n_list: &[usize]) -> Result<Vec<PathHistogram>> {
    let d = env.d();
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let mut out = Vec::with_capacity(n_list.len());
    let mut push = |n: usize, bits: u32, keys: Vec<u128>, counts: Vec<PathCount>| {
        out.push(PathHistogram { n, d, m, bits, keys, counts });
        Ok(())
    };
    if fits_exact(d, n_max) {
        dp_layers(env, m, n_list, 1u128, |n, bits, keys, counts| {
            push(n, bits, keys, counts.into_iter().map(Count::to_path_count).collect())
        })?;
    } else {
        dp_layers(env, m, n_list, LogCount(0.0), |n, bits, keys, counts| {
            push(n, bits, keys, counts.into_iter().map(Count::to_path_count).collect())
        })?;
    }
    // Reports arrive in increasing n; return them in the order requested.
    Ok(n_list
        .iter()
        .map(|&n| out.iter().find(|h| h.n == n).cloned().expect("every requested prefix is reported"))
        .collect())
}

/// Histogram states and exact (or log-space) path counts over all trials of `env`.
pub fn path_histogram_dp(env: &Environment, m: usize) -> Result<PathHistogram> {
    Ok(path_histogram_prefixes(env, m, &[env.n()])?.remove(0))
}

/// `ρ(c/n, ν)` for every state, with both measures as center atoms.
pub fn state_distances(hist: &PathHistogram, nu: &BinnedMeasure<f64>) -> Result<Vec<f64>> {
    if nu.m() != hist.m {
        return contract(format!("nu has {} bins, histograms have {}", nu.m(), hist.m));
    }
    if hist.n == 0 {
        return contract("distances need at least one trial");
    }
    let grid = GridLp::new(hist.m);
    (0..hist.len()).into_par_iter().map(|i| grid.distance(&hist.measure(i), nu.weights())).collect()
}

/// Rank `j` (1-based) and the `j`-th smallest path distance, `+∞` when `j > D^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderStatistic {
    pub rank: u128,
    pub distance: f64,
}

fn order_from(hist: &PathHistogram, dist: &[f64], ranks: &[u128]) -> Vec<OrderStatistic> {
    let mut order: Vec<usize> = (0..hist.len()).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(a.cmp(&b)));
    let exact = hist.is_exact();
    ranks
        .iter()
        .map(|&rank| {
            let mut cum_exact: u128 = 0;
            let mut cum_log = f64::NEG_INFINITY;
            let target_log = (rank as f64).ln();
            let distance = order
                .iter()
                .find(|&&i| {
                    if exact {
                        cum_exact += hist.counts[i].exact().expect("exact counts");
                        cum_exact >= rank
                    } else {
                        cum_log = LogCount(cum_log).add(LogCount(hist.counts[i].ln())).0;
                        cum_log >= target_log
                    }
                })
                .map_or(f64::INFINITY, |&i| dist[i]);
            OrderStatistic { rank, distance }
        })
        .collect()
}

/// `min^j ρ((1/n)μ_π, ν)` over all paths `π`, for each requested rank `j`.
pub fn order_statistics(env: &Environment, nu: &BinnedMeasure<f64>, m: usize, ranks: &[u128]) -> Result<Vec<OrderStatistic>> {
    if ranks.contains(&0) {
        return contract("ranks are 1-based");
    }
    let hist = path_histogram_dp(env, m)?;
    let dist = state_distances(&hist, nu)?;
    Ok(order_from(&hist, &dist, ranks))
}

/// `N_n(ε)`: the number of paths with `ρ ≤ ε`.
fn count_within(hist: &PathHistogram, dist: &[f64], eps: f64) -> PathCount {
    let inside = (0..hist.len()).filter(|&i| dist[i] <= eps);
    if hist.is_exact() {
        PathCount::Exact(inside.map(|i| hist.counts[i].exact().expect("exact counts")).sum())
    } else {
        PathCount::Log(inside.fold(LogCount::ZERO, |acc, i| acc.add(LogCount(hist.counts[i].ln()))).0)
    }
}

/// One `(n, ε)` cell of a slope table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlopePoint {
    pub n: usize,
    pub eps: f64,
    pub count: PathCount,
    /// `(1/n) ln N_n(ε)`, `-∞` when no path qualifies.
    pub slope: f64,
}

/// `(1/n) ln N_n(ε)` for each prefix length `n` of `env` and each `ε`.
pub fn entropy_slope(env: &Environment, nu: &BinnedMeasure<f64>, eps_list: &[f64], m: usize, n_list: &[usize]) -> Result<Vec<SlopePoint>> {
    if n_list.contains(&0) {
        return contract("slopes need n ≥ 1");
    }
    let mut out = Vec::new();
    for hist in path_histogram_prefixes(env, m, n_list)? {
        let dist = state_distances(&hist, nu)?;
        for &eps in eps_list {
            let count = count_within(&hist, &dist, eps);
            out.push(SlopePoint { n: hist.n, eps, count, slope: count.ln() / hist.n as f64 });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathStatsReport {
    pub n: usize,
    #[serde(rename = "D")]
    pub d: usize,
    pub m: usize,
    pub states: usize,
    /// Counts are exact integers (else natural logs).
    pub exact: bool,
    pub total: PathCount,
    pub eps_list: Vec<f64>,
    pub counts: Vec<PathCount>,
    pub slopes: Vec<f64>,
    pub order_stats: Vec<OrderStatistic>,
}

/// Counts `N_n(ε)`, slopes and order statistics from one DP pass.
pub fn path_stats(env: &Environment, nu: &BinnedMeasure<f64>, m: usize, eps_list: &[f64], ranks: &[u128]) -> Result<PathStatsReport> {
    if ranks.contains(&0) {
        return contract("ranks are 1-based");
    }
    let hist = path_histogram_dp(env, m)?;
    let dist = state_distances(&hist, nu)?;
    let counts: Vec<PathCount> = eps_list.iter().map(|&e| count_within(&hist, &dist, e)).collect();
    Ok(PathStatsReport {
        n: hist.n,
        d: hist.d,
        m,
        states: hist.len(),
        exact: hist.is_exact(),
        total: hist.total(),
        eps_list: eps_list.to_vec(),
        slopes: counts.iter().map(|c| c.ln() / hist.n as f64).collect(),
        counts,
        order_stats: order_from(&hist, &dist, ranks),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::lp_distance;
    use crate::simulate::{sample_environment, Model};
    use crate::AtomicMeasure;
    use std::collections::BTreeMap;

    /// Every path's bin histogram, by brute force over all `D^n` choice sequences.
    fn brute_force(env: &Environment, m: usize) -> BTreeMap<Vec<usize>, u128> {
        let (n, d) = (env.n(), env.d());
        let rows: Vec<Vec<f64>> = (0..n).map(|i| env.row_values(i)).collect();
        let mut out = BTreeMap::new();
        let mut choice = vec![0; n];
        for idx in 0..d.pow(n as u32) {
            crate::strategies::decode_into(d, idx, &mut choice);
            let mut h = vec![0; m];
            for (i, &j) in choice.iter().enumerate() {
                h[bin_index(rows[i][j], m)] += 1;
            }
            *out.entry(h).or_insert(0) += 1;
        }
        out
    }

    #[test]
    fn single_trial_states() {
        let env = Environment::from_rows(&[vec![0.1, 0.9]]).unwrap();
        let h = path_histogram_dp(&env, 4).unwrap();
        assert_eq!(h.len(), 2);
        assert!(h.states().all(|(_, c)| c == PathCount::Exact(1)));
        let env = Environment::from_rows(&[vec![0.1, 0.2]]).unwrap();
        let h = path_histogram_dp(&env, 4).unwrap();
        assert_eq!(h.states().collect::<Vec<_>>(), vec![(vec![1, 0, 0, 0], PathCount::Exact(2))]);
    }

    #[test]
    fn dp_matches_brute_force() {
        for (d, n, m, seed) in [(2, 12, 6, 1), (2, 10, 8, 2), (3, 7, 4, 3)] {
            let env = sample_environment(n, d, Model::Continuous, seed).unwrap();
            let h = path_histogram_dp(&env, m).unwrap();
            let dp: BTreeMap<Vec<usize>, u128> = h.states().map(|(s, c)| (s, c.exact().unwrap())).collect();
            assert_eq!(dp, brute_force(&env, m));
            assert_eq!(h.total(), PathCount::Exact((d as u128).pow(n as u32)));
        }
    }

    #[test]
    fn totals_are_exact_powers() {
        for (d, n) in [(2, 20), (3, 12)] {
            let env = sample_environment(n, d, Model::Continuous, 5).unwrap();
            let h = path_histogram_dp(&env, 8).unwrap();
            assert_eq!(h.total(), PathCount::Exact((d as u128).pow(n as u32)));
        }
    }

    #[test]
    fn log_counts_beyond_u128() {
        let env = sample_environment(130, 2, Model::Continuous, 6).unwrap();
        let h = path_histogram_dp(&env, 3).unwrap();
        assert!(!h.is_exact());
        let expected = 130.0 * 2f64.ln();
        assert!((h.total().ln() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn order_statistics_match_brute_force() {
        let (n, m) = (12, 6);
        let env = sample_environment(n, 2, Model::Continuous, 9).unwrap();
        let nu = BinnedMeasure::uniform(m).unwrap();
        // Every path's distance, computed independently with the generic LP.
        let mut all = Vec::new();
        for (h, c) in brute_force(&env, m) {
            let atoms = (0..m).filter(|&b| h[b] > 0).map(|b| ((b as f64 + 0.5) / m as f64, h[b] as f64 / n as f64));
            let rho = lp_distance(&AtomicMeasure::new(atoms).unwrap(), &nu.center_atoms()).unwrap();
            all.extend(std::iter::repeat_n(rho, c as usize));
        }
        all.sort_by(f64::total_cmp);
        let ranks: Vec<u128> = (1..=4096).collect();
        let stats = order_statistics(&env, &nu, m, &ranks).unwrap();
        for s in &stats {
            assert!((s.distance - all[s.rank as usize - 1]).abs() < 1e-12);
        }
        assert!(stats.windows(2).all(|w| w[0].distance <= w[1].distance));
        assert!(stats[4095].distance <= 1.0);
        let beyond = order_statistics(&env, &nu, m, &[4097]).unwrap();
        assert_eq!(beyond[0].distance, f64::INFINITY);
        assert!(order_statistics(&env, &nu, m, &[0]).is_err());
    }

    #[test]
    fn best_path_matches_greedy_histogram() {
        let (n, m) = (14, 10);
        let env = sample_environment(n, 2, Model::Continuous, 10).unwrap();
        let maxima: Vec<f64> = (0..n).map(|i| env.row_values(i).into_iter().fold(0.0, f64::max)).collect();
        let nu = AtomicMeasure::empirical(&maxima).unwrap().bin(m).unwrap();
        let best = order_statistics(&env, &nu, m, &[1]).unwrap()[0];
        assert!(best.distance <= 1.0 / (2.0 * m as f64));
    }

    #[test]
    fn slopes_and_counts() {
        let env = sample_environment(12, 2, Model::Continuous, 11).unwrap();
        let nu = BinnedMeasure::uniform(8).unwrap();
        let pts = entropy_slope(&env, &nu, &[0.05, 0.1, 0.2, 1.0], 8, &[6, 12]).unwrap();
        assert_eq!(pts.len(), 8);
        for w in pts.chunks(4) {
            let counts: Vec<u128> = w.iter().map(|p| p.count.exact().unwrap()).collect();
            assert!(counts.windows(2).all(|c| c[0] <= c[1]));
            assert_eq!(counts[3], 1 << w[0].n);
            assert!((w[3].slope - 2f64.ln()).abs() < 1e-12);
        }
        let report = path_stats(&env, &nu, 8, &[0.1, 1.0], &[1, 4096]).unwrap();
        assert_eq!(report.total, PathCount::Exact(4096));
        assert_eq!(report.counts[1], PathCount::Exact(4096));
        assert_eq!(report.counts[0], pts[5].count);
    }

    #[test]
    fn limits() {
        let env = sample_environment(200, 2, Model::Continuous, 1).unwrap();
        assert!(path_histogram_dp(&env, 40).is_err());
        assert!(path_histogram_prefixes(&env, 4, &[201]).is_err());
    }
}

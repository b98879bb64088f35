//! Exact combinatorics of the discrete selection model.
//!
//! Achievable chosen-value pmfs on `{0..K-1}` form a polytope. Its vertices
//! are the pmfs of greedy strategies that rank labels by a total ordering,
//! so they are in bijection with the `K!` orderings, i.e. the vertices of a
//! permutohedron. This module builds those strategies, computes weight
//! tuples, and certifies extreme points with exact rational hull tests.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{contract, size, Result};
use crate::scalar::Scalar;
use crate::strategies::{
    from_choice_map, is_consistent, permutations, scramble, tuple_count, Pmf, StrategyTable, ENUMERATION_LIMIT,
};

/// Largest number of deterministic consistent tables that will be enumerated.
pub const CONFIGURATION_LIMIT: usize = 1_000_000;

/// Total order on labels: `alpha[0] < alpha[1] < … < alpha[K-1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ordering {
    alpha: Vec<usize>,
}

impl Ordering {
    /// `alpha` lists the 0-based labels from lowest to highest.
    pub fn new(alpha: Vec<usize>) -> Result<Self> {
        let k = alpha.len();
        let mut seen = vec![false; k];
        for &a in &alpha {
            if a >= k || std::mem::replace(&mut seen[a], true) {
                return contract(format!("{alpha:?} is not a permutation of 0..{k}"));
            }
        }
        if k == 0 {
            return contract("an ordering needs at least one label");
        }
        Ok(Self { alpha })
    }

    /// From 1-based labels, e.g. `[1, 3, 4, 2]` for `1 < 3 < 4 < 2`.
    pub fn from_one_based(alpha: &[usize]) -> Result<Self> {
        if alpha.contains(&0) {
            return contract("1-based ordering contains 0");
        }
        Self::new(alpha.iter().map(|a| a - 1).collect())
    }

    pub fn identity(k: usize) -> Self {
        Self { alpha: (0..k).collect() }
    }

    /// All `K!` orderings in lexicographic order.
    pub fn all(k: usize) -> Vec<Self> {
        permutations(k).into_iter().map(|alpha| Self { alpha }).collect()
    }

    pub fn k(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self) -> &[usize] {
        &self.alpha
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.alpha.iter().map(|a| a + 1).collect()
    }

    /// `rank[label]`, the position of each label in the order.
    pub fn rank(&self) -> Vec<usize> {
        let mut rank = vec![0; self.k()];
        for (r, &a) in self.alpha.iter().enumerate() {
            rank[a] = r;
        }
        rank
    }

    /// The strategy keeping the highest-ranked label.
    pub fn greedy_table<T: Scalar>(&self, d: usize) -> Result<StrategyTable<T>> {
        StrategyTable::greedy(self.k(), d, &self.rank())
    }
}

fn int_pow<T: Scalar>(base: usize, exp: usize) -> T {
    (0..exp).fold(T::one(), |acc, _| acc * T::from_usize(base))
}

/// Mass `(k^D - (k-1)^D) / K^D` on the label of rank `k` (1-based).
pub fn extreme_sigma<T: Scalar>(alpha: &Ordering, d: usize) -> Pmf<T> {
    let k = alpha.k();
    let total = int_pow::<T>(k, d);
    let mut probs = vec![T::zero(); k];
    for (r, &label) in alpha.alpha().iter().enumerate() {
        probs[label] = (int_pow::<T>(r + 1, d) - int_pow::<T>(r, d)) / total.clone();
    }
    Pmf::new(probs).expect("masses telescope to one")
}

/// How often each entry of a `(D+1)`-tuple is chosen among its `D+1` subtuples of size `D`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightTuple {
    w: Vec<usize>,
}

impl WeightTuple {
    pub fn weights(&self) -> &[usize] {
        &self.w
    }

    /// A permutation of `(D, 1, 0, …, 0)`.
    pub fn is_perm_of_d10(&self) -> bool {
        let d = self.w.len() - 1;
        let mut sorted = self.w.clone();
        sorted.sort_unstable_by(|a, b| b.cmp(a));
        sorted[0] == d && sorted[1] == 1 && sorted[2..].iter().all(|&x| x == 0)
    }
}

fn check_deterministic<T: Scalar>(table: &StrategyTable<T>) -> Result<()> {
    if !table.is_deterministic() {
        return contract("weight tuples need a deterministic table");
    }
    Ok(())
}

/// `w_j = Σ_{k≠j} p_1(u_j, ū without u_j and u_k)`.
fn weights_unchecked<T: Scalar>(table: &StrategyTable<T>, tuple: &[usize], sub: &mut Vec<usize>) -> Result<WeightTuple> {
    let mut w = vec![0; tuple.len()];
    for (j, wj) in w.iter_mut().enumerate() {
        for k in (0..tuple.len()).filter(|&k| k != j) {
            sub.clear();
            sub.push(tuple[j]);
            sub.extend(tuple.iter().enumerate().filter(|&(i, _)| i != j && i != k).map(|(_, &u)| u));
            let p = &table.probs(sub)[0];
            if p.close(&T::one()) {
                *wj += 1;
            } else if !p.is_negligible() {
                return contract(format!("table is not deterministic on {sub:?}"));
            }
        }
    }
    Ok(WeightTuple { w })
}

/// Weight tuple of `D+1` distinct labels under a deterministic consistent table.
pub fn weight_tuple<T: Scalar>(table: &StrategyTable<T>, tuple: &[usize]) -> Result<WeightTuple> {
    check_deterministic(table)?;
    check_distinct(table, tuple)?;
    weights_unchecked(table, tuple, &mut Vec::with_capacity(table.d()))
}

fn check_distinct<T: Scalar>(table: &StrategyTable<T>, tuple: &[usize]) -> Result<()> {
    if tuple.len() != table.d() + 1 {
        return contract(format!("weight tuples need D+1 = {} labels", table.d() + 1));
    }
    let mut seen = vec![false; table.k()];
    for &u in tuple {
        if u >= table.k() {
            return contract(format!("label {u} outside 0..{}", table.k()));
        }
        if std::mem::replace(&mut seen[u], true) {
            return contract(format!("label {u} repeats in {tuple:?}"));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightTupleReport {
    pub tuples_checked: usize,
    pub all_perm_of_d10: bool,
    /// First few tuples (0-based labels) whose weights are not a permutation of `(D,1,0,…,0)`.
    pub counterexamples: Vec<(Vec<usize>, WeightTuple)>,
}

const MAX_COUNTEREXAMPLES: usize = 16;

/// Scans every ordered `(D+1)`-tuple of distinct labels.
pub fn verify_weight_tuples<T: Scalar>(table: &StrategyTable<T>) -> Result<WeightTupleReport> {
    check_deterministic(table)?;
    let (k, d) = (table.k(), table.d());
    let n = tuple_count(k, d + 1).filter(|&n| n <= ENUMERATION_LIMIT);
    let Some(n) = n else {
        return size(format!("K^(D+1) = {k}^{} exceeds {ENUMERATION_LIMIT}", d + 1));
    };
    let mut tuple = vec![0; d + 1];
    let mut sub = Vec::with_capacity(d);
    let mut seen = vec![false; k];
    let mut report = WeightTupleReport { tuples_checked: 0, all_perm_of_d10: true, counterexamples: Vec::new() };
    for idx in 0..n {
        crate::strategies::decode_into(k, idx, &mut tuple);
        seen.iter_mut().for_each(|s| *s = false);
        if tuple.iter().any(|&u| std::mem::replace(&mut seen[u], true)) {
            continue;
        }
        report.tuples_checked += 1;
        let w = weights_unchecked(table, &tuple, &mut sub)?;
        if !w.is_perm_of_d10() {
            report.all_perm_of_d10 = false;
            if report.counterexamples.len() < MAX_COUNTEREXAMPLES {
                report.counterexamples.push((tuple.clone(), w));
            }
        }
    }
    Ok(report)
}

/// Density of the chosen value computed from weights.
///
/// `f(t)` is the average over all `D`-tuples `ō` of the (possibly
/// fractional) number of size-`D` subtuples of `(t, ō)` that choose `t`.
/// For consistent tables this equals `K · σ(t)`.
pub fn density_from_weights<T: Scalar>(table: &StrategyTable<T>) -> Result<Vec<T>> {
    if !is_consistent(table) {
        return contract("density from weights needs a consistent table");
    }
    let (k, d) = (table.k(), table.d());
    let n = table.tuple_count();
    let mut others = vec![0; d];
    let mut sub = vec![0; d];
    let mut f = vec![T::zero(); k];
    for (t, ft) in f.iter_mut().enumerate() {
        sub[0] = t;
        for idx in 0..n {
            table.decode(idx, &mut others);
            for skip in 0..d {
                let rest = others.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &u)| u);
                for (slot, u) in sub[1..].iter_mut().zip(rest) {
                    *slot = u;
                }
                *ft = ft.clone() + table.probs(&sub)[0].clone();
            }
        }
        *ft = ft.clone() / T::from_usize(n);
    }
    Ok(f)
}

/// Sorted multisets of `d` labels from `0..k` with at least two distinct values.
fn mixed_multisets(k: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut seq = vec![0usize; d];
    loop {
        if seq[0] != seq[d - 1] {
            out.push(seq.clone());
        }
        let Some(pos) = (0..d).rev().find(|&p| seq[p] + 1 < k) else {
            return out;
        };
        let next = seq[pos] + 1;
        seq[pos..].iter_mut().for_each(|b| *b = next);
    }
}

fn distinct_values(sorted: &[usize]) -> Vec<usize> {
    let mut v = sorted.to_vec();
    v.dedup();
    v
}

/// Every deterministic consistent table: one chosen value per multiset of labels.
///
/// Tables are listed in mixed-radix order over multisets (lexicographic),
/// with the choices for each multiset in increasing label order.
pub fn enumerate_deterministic_consistent<T: Scalar>(k: usize, d: usize) -> Result<Vec<StrategyTable<T>>> {
    if k == 0 || d == 0 {
        return contract("K and D must be positive");
    }
    if tuple_count(k, d).is_none_or(|n| n > ENUMERATION_LIMIT) {
        return size(format!("K^D = {k}^{d} exceeds {ENUMERATION_LIMIT}"));
    }
    let sets = mixed_multisets(k, d);
    let options: Vec<Vec<usize>> = sets.iter().map(|s| distinct_values(s)).collect();
    let mut count: usize = 1;
    for o in &options {
        count = count.checked_mul(o.len()).filter(|&c| c <= CONFIGURATION_LIMIT).ok_or_else(|| {
            crate::Error::Size(format!("more than {CONFIGURATION_LIMIT} deterministic consistent tables for K = {k}, D = {d}"))
        })?;
    }
    (0..count)
        .into_par_iter()
        .map(|mut idx| {
            let mut choices = HashMap::with_capacity(sets.len());
            for (set, opts) in sets.iter().zip(&options).rev() {
                choices.insert(set.clone(), opts[idx % opts.len()]);
                idx /= opts.len();
            }
            from_choice_map(k, d, &choices)
        })
        .collect()
}

/// Exact (for rationals) test whether `point` is a convex combination of `others`.
///
/// Phase one of the simplex method with Bland's rule on
/// `Σ λ_i q_i = p, Σ λ_i = 1, λ ≥ 0`.
pub fn in_convex_hull<T: Scalar>(point: &[T], others: &[Vec<T>]) -> bool {
    let n = others.len();
    if n == 0 {
        return false;
    }
    let rows = point.len() + 1;
    let cols = n + rows;
    // Tableau rows: [A | I | b], with b ≥ 0 so artificials start basic.
    let mut tab: Vec<Vec<T>> = (0..rows)
        .map(|r| {
            let mut row = Vec::with_capacity(cols + 1);
            let (rhs, neg) = if r < point.len() {
                (point[r].clone(), point[r] < T::zero())
            } else {
                (T::one(), false)
            };
            for q in others {
                let a = if r < point.len() { q[r].clone() } else { T::one() };
                row.push(if neg { -a } else { a });
            }
            row.extend((0..rows).map(|i| if i == r { T::one() } else { T::zero() }));
            row.push(if neg { -rhs } else { rhs });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..cols).collect();
    // Reduced costs of `min Σ artificials`; the last entry is minus the objective.
    let mut cost: Vec<T> = (0..=cols)
        .map(|j| {
            if (n..cols).contains(&j) {
                T::zero()
            } else {
                -tab.iter().fold(T::zero(), |acc, row| acc + row[j].clone())
            }
        })
        .collect();

    loop {
        let Some(enter) = (0..cols).find(|&j| cost[j] < T::zero() && !cost[j].is_negligible()) else {
            break;
        };
        let mut leave: Option<(usize, T)> = None;
        for (r, row) in tab.iter().enumerate() {
            if !row[enter].is_positive() {
                continue;
            }
            let ratio = row[cols].clone() / row[enter].clone();
            let better = match &leave {
                None => true,
                Some((lr, best)) => ratio < *best || (ratio.close(best) && basis[r] < basis[*lr]),
            };
            if better {
                leave = Some((r, ratio));
            }
        }
        let Some((pr, _)) = leave else {
            // Unbounded direction cannot occur for a bounded-below objective.
            break;
        };
        let pivot = tab[pr][enter].clone();
        tab[pr].iter_mut().for_each(|x| *x = x.clone() / pivot.clone());
        let pivot_row = tab[pr].clone();
        for (r, row) in tab.iter_mut().enumerate() {
            if r != pr && !row[enter].is_zero() {
                let f = row[enter].clone();
                row.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x = x.clone() - f.clone() * p.clone());
            }
        }
        let f = cost[enter].clone();
        cost.iter_mut().zip(&pivot_row).for_each(|(x, p)| *x = x.clone() - f.clone() * p.clone());
        basis[pr] = enter;
    }
    cost[cols].is_negligible()
}

/// Chosen-value pmfs of all deterministic consistent tables that are vertices of their convex hull.
///
/// Duplicates are removed first; the result is sorted by probability vector.
pub fn extreme_points_of_sigma_polytope<T: Scalar>(k: usize, d: usize) -> Result<Vec<Pmf<T>>> {
    if k > 5 || d > 3 {
        return size(format!("exact hull tests are limited to K ≤ 5, D ≤ 3 (got K = {k}, D = {d})"));
    }
    let tables = enumerate_deterministic_consistent::<T>(k, d)?;
    let mut points: Vec<Vec<T>> = tables.par_iter().map(|t| t.sigma().probs().to_vec()).collect();
    points.sort_by(|a, b| a.partial_cmp(b).expect("probabilities are comparable"));
    points.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| x.close(y)));
    let extreme: Vec<bool> = (0..points.len())
        .into_par_iter()
        .map(|i| {
            let others: Vec<Vec<T>> =
                points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, p)| p.clone()).collect();
            !in_convex_hull(&points[i], &others)
        })
        .collect();
    points
        .into_iter()
        .zip(extreme)
        .filter(|(_, e)| *e)
        .map(|(p, _)| Pmf::new(p))
        .collect()
}

/// A relabeling `β` with `scramble(table, β)` equal to the MAX table, if one exists.
pub fn scramble_to_max<T: Scalar>(table: &StrategyTable<T>) -> Result<Option<Vec<usize>>> {
    let max = StrategyTable::<T>::max(table.k(), table.d())?;
    for phi in permutations(table.k()) {
        if scramble(table, &phi)?.close(&max) {
            return Ok(Some(phi));
        }
    }
    Ok(None)
}

/// Largest mean (1-based labels) of the chosen value over all `K!` scrambles, with a maximiser.
pub fn max_scramble_mean<T: Scalar>(table: &StrategyTable<T>) -> Result<(T, Vec<usize>)> {
    let mut best: Option<(T, Vec<usize>)> = None;
    for phi in permutations(table.k()) {
        let mean = scramble(table, &phi)?.sigma().mean();
        if best.as_ref().is_none_or(|(b, _)| mean > *b && !mean.close(b)) {
            best = Some((mean, phi));
        }
    }
    Ok(best.expect("at least one permutation"))
}

/// The rock-paper-scissors table for odd `K`, `D = 2`: label `a` beats `b` when `(b - a) mod K > (K-1)/2`.
///
/// Every label wins half of its pairs, so the chosen value is uniform.
pub fn cyclic_table<T: Scalar>(k: usize) -> Result<StrategyTable<T>> {
    if k.is_multiple_of(2) {
        return contract("the cyclic table needs an odd number of labels");
    }
    StrategyTable::from_value_choice(k, 2, |s| {
        let (a, b) = (s[0], s[1]);
        if (b + k - a) % k > (k - 1) / 2 {
            a
        } else {
            b
        }
    })
}

//! Discrete single-trial strategies on labels `{0..K-1}`.
//!
//! A table stores, for every ordered tuple `ū ∈ {0..K-1}^D`, the vector of
//! choice probabilities `p_1(ū), …, p_D(ū)`. Tuples are indexed in mixed
//! radix with the first position most significant, i.e. lexicographic order.

use std::collections::HashMap;

use rand::Rng;

use super::pmf::{check_convex, is_zero, Pmf};
use crate::error::{contract, size, Error, Result};
use crate::scalar::Scalar;

/// Largest `K^D` that exact enumeration will visit.
pub const ENUMERATION_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyTable<T> {
    k: usize,
    d: usize,
    entries: Vec<T>,
}

pub(crate) fn tuple_count(k: usize, d: usize) -> Option<usize> {
    k.checked_pow(d as u32)
}

impl<T: Scalar> StrategyTable<T> {
    /// Builds a table from `K^D · D` entries in lexicographic tuple order.
    pub fn new(k: usize, d: usize, entries: Vec<T>) -> Result<Self> {
        if k == 0 || d == 0 {
            return contract("K and D must be positive");
        }
        let n = tuple_count(k, d).filter(|&n| n <= ENUMERATION_LIMIT);
        let Some(n) = n else {
            return size(format!("K^D = {k}^{d} exceeds {ENUMERATION_LIMIT}"));
        };
        if entries.len() != n * d {
            return contract(format!("expected {} entries, got {}", n * d, entries.len()));
        }
        for (t, row) in entries.chunks(d).enumerate() {
            if row.iter().any(|p| *p < T::zero() && !p.is_negligible()) {
                return contract(format!("negative probability in tuple #{t}"));
            }
            let s = row.iter().cloned().fold(T::zero(), |a, b| a + b);
            if !s.close(&T::one()) {
                return contract(format!("probabilities of tuple #{t} sum to {s:?}"));
            }
        }
        Ok(Self { k, d, entries })
    }

    pub fn from_fn(k: usize, d: usize, mut f: impl FnMut(&[usize]) -> Vec<T>) -> Result<Self> {
        let n = tuple_count(k, d).filter(|&n| n <= ENUMERATION_LIMIT && k > 0 && d > 0);
        let Some(n) = n else {
            return size(format!("K^D = {k}^{d} outside (0, {ENUMERATION_LIMIT}]"));
        };
        let mut entries = Vec::with_capacity(n * d);
        let mut tuple = vec![0; d];
        for idx in 0..n {
            decode_into(k, idx, &mut tuple);
            let row = f(&tuple);
            if row.len() != d {
                return contract("probability vector must have length D");
            }
            entries.extend(row);
        }
        Self::new(k, d, entries)
    }

    /// Deterministic consistent table from a choice of value per multiset.
    ///
    /// `choice` receives the tuple sorted ascending and returns the chosen
    /// label, which must occur in it. Probability is split evenly over the
    /// positions holding that label.
    pub fn from_value_choice(k: usize, d: usize, mut choice: impl FnMut(&[usize]) -> usize) -> Result<Self> {
        let mut sorted = vec![0; d];
        Self::from_fn(k, d, |tuple| {
            sorted.copy_from_slice(tuple);
            sorted.sort_unstable();
            let c = choice(&sorted);
            split_on_value(tuple, c)
        })
    }

    /// Chooses the label of highest `rank`; `rank` must be injective on labels.
    pub fn greedy(k: usize, d: usize, rank: &[usize]) -> Result<Self> {
        if rank.len() != k {
            return contract("rank needs one entry per label");
        }
        Self::from_value_choice(k, d, |s| *s.iter().max_by_key(|&&x| rank[x]).expect("D > 0"))
    }

    /// Always keeps the largest label.
    pub fn max(k: usize, d: usize) -> Result<Self> {
        Self::from_value_choice(k, d, |s| s[s.len() - 1])
    }

    /// Always keeps the smallest label.
    pub fn min(k: usize, d: usize) -> Result<Self> {
        Self::from_value_choice(k, d, |s| s[0])
    }

    /// Picks each position with probability `1/D`.
    pub fn uniform(k: usize, d: usize) -> Result<Self> {
        Self::from_fn(k, d, |_| vec![T::from_ratio(1, d as i64); d])
    }

    /// Always picks position 1 regardless of labels.
    pub fn first_position(k: usize, d: usize) -> Result<Self> {
        Self::from_fn(k, d, |_| {
            let mut v = vec![T::zero(); d];
            v[0] = T::one();
            v
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn tuple_count(&self) -> usize {
        self.entries.len() / self.d
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        tuple.iter().fold(0, |acc, &u| acc * self.k + u)
    }

    pub fn decode(&self, idx: usize, tuple: &mut [usize]) {
        decode_into(self.k, idx, tuple)
    }

    /// Choice probabilities for a tuple.
    pub fn probs(&self, tuple: &[usize]) -> &[T] {
        self.probs_at(self.encode(tuple))
    }

    pub fn probs_at(&self, idx: usize) -> &[T] {
        &self.entries[idx * self.d..(idx + 1) * self.d]
    }

    /// True when every tuple's choice is a single label with certainty.
    ///
    /// Mass may be spread over several positions holding that same label;
    /// such splits never change the chosen value.
    pub fn is_deterministic(&self) -> bool {
        let mut tuple = vec![0; self.d];
        (0..self.tuple_count()).all(|idx| {
            self.decode(idx, &mut tuple);
            chosen_value(&tuple, self.probs_at(idx)).is_some()
        })
    }

    /// The label chosen for `tuple` if the choice is deterministic.
    pub fn chosen_label(&self, tuple: &[usize]) -> Option<usize> {
        chosen_value(tuple, self.probs(tuple))
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> StrategyTable<U> {
        StrategyTable { k: self.k, d: self.d, entries: self.entries.iter().map(f).collect() }
    }

    pub fn to_f64(&self) -> StrategyTable<f64> {
        self.map(Scalar::to_f64)
    }

    pub fn close(&self, other: &Self) -> bool {
        self.k == other.k
            && self.d == other.d
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a.close(b))
    }

    /// Samples a position (0-based) for a tuple of labels.
    pub fn sample<R: Rng + ?Sized>(&self, tuple: &[usize], rng: &mut R) -> Result<usize> {
        if tuple.len() != self.d {
            return Err(Error::Domain(format!("row of length {} for D = {}", tuple.len(), self.d)));
        }
        if let Some(&u) = tuple.iter().find(|&&u| u >= self.k) {
            return Err(Error::Domain(format!("label {u} outside 0..{}", self.k)));
        }
        let probs = self.probs(tuple);
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut last = 0;
        for (j, p) in probs.iter().enumerate() {
            let p = p.to_f64();
            if p > 0.0 {
                last = j;
            }
            acc += p;
            if r < acc {
                return Ok(j);
            }
        }
        Ok(last)
    }

    /// Exact chosen-value pmf: `σ(x) = K^{-D} Σ_ū Σ_k p_k(ū) 1{u_k = x}`.
    pub fn sigma(&self) -> Pmf<T> {
        let mut mass = vec![T::zero(); self.k];
        let mut tuple = vec![0; self.d];
        for idx in 0..self.tuple_count() {
            self.decode(idx, &mut tuple);
            for (pos, p) in self.probs_at(idx).iter().enumerate() {
                if !p.is_zero() {
                    mass[tuple[pos]] = mass[tuple[pos]].clone() + p.clone();
                }
            }
        }
        let scale = T::from_usize(self.tuple_count());
        Pmf::from_raw(mass.into_iter().map(|m| m / scale.clone()).collect())
    }

    /// Convex combination of tables with equal `K` and `D`.
    pub fn mix(tables: &[Self], weights: &[T]) -> Result<Self> {
        check_convex(weights)?;
        if tables.is_empty() || tables.len() != weights.len() {
            return contract("one weight per table required");
        }
        let (k, d) = (tables[0].k, tables[0].d);
        if tables.iter().any(|t| t.k != k || t.d != d) {
            return contract("mixed tables must share K and D");
        }
        let entries = (0..tables[0].entries.len())
            .map(|i| {
                tables.iter().zip(weights).fold(T::zero(), |acc, (t, w)| acc + w.clone() * t.entries[i].clone())
            })
            .collect();
        Ok(Self { k, d, entries })
    }
}

/// Exact pmf of the chosen label for a discrete table.
pub fn sigma_discrete<T: Scalar>(table: &StrategyTable<T>) -> Result<Pmf<T>> {
    if table.tuple_count() > ENUMERATION_LIMIT {
        return size(format!("K^D exceeds {ENUMERATION_LIMIT}"));
    }
    Ok(table.sigma())
}

pub(crate) fn decode_into(k: usize, mut idx: usize, tuple: &mut [usize]) {
    for slot in tuple.iter_mut().rev() {
        *slot = idx % k;
        idx /= k;
    }
}

fn split_on_value<T: Scalar>(tuple: &[usize], value: usize) -> Vec<T> {
    let hits = tuple.iter().filter(|&&u| u == value).count();
    assert!(hits > 0, "chosen label {value} does not occur in {tuple:?}");
    tuple
        .iter()
        .map(|&u| if u == value { T::from_ratio(1, hits as i64) } else { T::zero() })
        .collect()
}

fn chosen_value<T: Scalar>(tuple: &[usize], probs: &[T]) -> Option<usize> {
    let mut value = None;
    for (pos, p) in probs.iter().enumerate() {
        if !is_zero(p) {
            match value {
                None => value = Some(tuple[pos]),
                Some(v) if v != tuple[pos] => return None,
                _ => {}
            }
        }
    }
    value
}

/// Deterministic consistent table from an explicit multiset → label map.
///
/// Multisets absent from `choices` must contain a single distinct label.
pub(crate) fn from_choice_map<T: Scalar>(
    k: usize,
    d: usize,
    choices: &HashMap<Vec<usize>, usize>,
) -> Result<StrategyTable<T>> {
    StrategyTable::from_value_choice(k, d, |sorted| match choices.get(sorted) {
        Some(&c) => c,
        None => sorted[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Exact;

    fn q(n: i64, d: i64) -> Exact {
        Exact::from_ratio(n, d)
    }

    #[test]
    fn max_table_k4_d2() {
        let t = StrategyTable::<Exact>::max(4, 2).unwrap();
        let s = sigma_discrete(&t).unwrap();
        assert_eq!(s.probs(), &[q(1, 16), q(3, 16), q(5, 16), q(7, 16)]);
        assert!(t.is_deterministic());
    }

    #[test]
    fn uniform_table_gives_uniform_pmf() {
        for (k, d) in [(3, 2), (4, 3), (5, 1)] {
            let s = sigma_discrete(&StrategyTable::<Exact>::uniform(k, d).unwrap()).unwrap();
            assert!(s.probs().iter().all(|p| *p == q(1, k as i64)));
        }
        assert!(!StrategyTable::<Exact>::uniform(3, 2).unwrap().is_deterministic());
    }

    #[test]
    fn cyclic_table_is_uniform() {
        // 2 beats 1, 3 beats 2, 1 beats 3 (labels 0-based here).
        let t = StrategyTable::<Exact>::from_value_choice(3, 2, |s| match (s[0], s[1]) {
            (0, 1) => 1,
            (1, 2) => 2,
            (0, 2) => 0,
            (a, _) => a,
        })
        .unwrap();
        let s = sigma_discrete(&t).unwrap();
        assert_eq!(s.probs(), &[q(3, 9), q(3, 9), q(3, 9)]);
    }

    #[test]
    fn validation() {
        assert!(StrategyTable::<f64>::new(2, 1, vec![1.0, 0.5]).is_err());
        assert!(StrategyTable::<f64>::new(2, 1, vec![1.0]).is_err());
        assert!(StrategyTable::<f64>::new(2, 1, vec![1.0, 1.0]).is_ok());
        assert!(StrategyTable::<f64>::uniform(10, 8).is_err());
    }

    #[test]
    fn encoding_is_lexicographic() {
        let t = StrategyTable::<f64>::uniform(3, 3).unwrap();
        assert_eq!(t.encode(&[0, 0, 1]), 1);
        assert_eq!(t.encode(&[1, 0, 0]), 9);
        let mut buf = [0; 3];
        t.decode(14, &mut buf);
        assert_eq!(buf, [1, 1, 2]);
    }

    #[test]
    fn mixtures_are_linear() {
        let max = StrategyTable::<Exact>::max(2, 2).unwrap();
        let min = StrategyTable::<Exact>::min(2, 2).unwrap();
        let half = StrategyTable::mix(&[max.clone(), min.clone()], &[q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(half.sigma().probs(), &[q(1, 2), q(1, 2)]);
        let w = [q(3, 10), q(7, 10)];
        let a = StrategyTable::<Exact>::max(4, 2).unwrap();
        let b = StrategyTable::<Exact>::first_position(4, 2).unwrap();
        let mixed = StrategyTable::mix(&[a.clone(), b.clone()], &w).unwrap().sigma();
        let expect = Pmf::mixture(&[a.sigma(), b.sigma()], &w).unwrap();
        assert_eq!(mixed, expect);
        assert!(StrategyTable::mix(&[a, b], &[q(1, 2), q(1, 3)]).is_err());
        let single = StrategyTable::mix(std::slice::from_ref(&max), &[q(1, 1)]).unwrap();
        assert_eq!(single, max);
    }

    #[test]
    fn float_tables_work_too() {
        let t = StrategyTable::<f64>::max(4, 2).unwrap();
        let s = t.sigma();
        for (a, b) in s.probs().iter().zip([1.0, 3.0, 5.0, 7.0]) {
            assert!((a - b / 16.0).abs() < 1e-15);
        }
    }

    #[test]
    fn common_denominator_form() {
        let s = StrategyTable::<Exact>::max(4, 2).unwrap().sigma();
        let (nums, den) = s.common_denominator();
        let nums: Vec<i64> = nums.iter().map(|n| n.try_into().unwrap()).collect();
        assert_eq!(nums, vec![1, 3, 5, 7]);
        assert_eq!(den, 16.into());
        assert_eq!(Pmf::from_integers(&[1.into(), 3.into(), 5.into(), 7.into()], &16.into()).unwrap(), s);
    }
}

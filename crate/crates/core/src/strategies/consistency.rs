//! Symmetrisation of discrete tables.
//!
//! A table is consistent when its choice depends only on the multiset of
//! labels: shifting the tuple cyclically moves the choice with it, and
//! permuting the other positions leaves `p_i` unchanged.

use super::table::StrategyTable;
use crate::error::{contract, Result};
use crate::scalar::Scalar;

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        out.push(current.clone());
        // Next permutation in lexicographic order.
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).expect("pivot exists");
        current.swap(i - 1, j);
        current[i..].reverse();
    }
}

/// `ι_s(ū)[t] = u[(s + t) mod D]`.
fn shift_into(tuple: &[usize], s: usize, out: &mut [usize]) {
    let d = tuple.len();
    for (t, slot) in out.iter_mut().enumerate() {
        *slot = tuple[(s + t) % d];
    }
}

fn permute_into(tuple: &[usize], perm: &[usize], out: &mut [usize]) {
    for (slot, &p) in out.iter_mut().zip(perm) {
        *slot = tuple[p];
    }
}

/// Two-step averaging: over the `D` cyclic shifts, then over permutations fixing each position.
///
/// The result is consistent and has the same chosen-value pmf.
pub fn make_consistent<T: Scalar>(table: &StrategyTable<T>) -> StrategyTable<T> {
    let (k, d) = (table.k(), table.d());
    let n = table.tuple_count();
    let d_t = T::from_usize(d);
    let mut tuple = vec![0; d];
    let mut moved = vec![0; d];

    let mut shifted = Vec::with_capacity(n * d);
    for idx in 0..n {
        table.decode(idx, &mut tuple);
        for i in 0..d {
            let mut acc = T::zero();
            for pos in 0..d {
                shift_into(&tuple, (i + d - pos) % d, &mut moved);
                acc = acc + table.probs(&moved)[pos].clone();
            }
            shifted.push(acc / d_t.clone());
        }
    }
    let shifted = StrategyTable::new(k, d, shifted).expect("averaging keeps rows stochastic");

    let perms = permutations(d);
    let fixing: Vec<Vec<&Vec<usize>>> = (0..d).map(|i| perms.iter().filter(|p| p[i] == i).collect()).collect();
    let mut entries = Vec::with_capacity(n * d);
    for idx in 0..n {
        table.decode(idx, &mut tuple);
        for (i, fix) in fixing.iter().enumerate() {
            let mut acc = T::zero();
            for perm in fix {
                permute_into(&tuple, perm, &mut moved);
                acc = acc + shifted.probs(&moved)[i].clone();
            }
            entries.push(acc / T::from_usize(fix.len()));
        }
    }
    StrategyTable::new(k, d, entries).expect("averaging keeps rows stochastic")
}

/// Checks the cyclic-shift identities and invariance under permutations fixing each position.
pub fn is_consistent<T: Scalar>(table: &StrategyTable<T>) -> bool {
    let d = table.d();
    let perms = permutations(d);
    let mut tuple = vec![0; d];
    let mut moved = vec![0; d];
    for idx in 0..table.tuple_count() {
        table.decode(idx, &mut tuple);
        let probs = table.probs_at(idx);
        for (i, p) in probs.iter().enumerate() {
            for pos in 0..d {
                shift_into(&tuple, (i + d - pos) % d, &mut moved);
                if !table.probs(&moved)[pos].close(p) {
                    return false;
                }
            }
            for perm in perms.iter().filter(|perm| perm[i] == i) {
                permute_into(&tuple, perm, &mut moved);
                if !table.probs(&moved)[i].close(p) {
                    return false;
                }
            }
        }
    }
    true
}

/// Relabels through `phi`: `p^φ(ū) = p(φ(u_1), …, φ(u_D))`. Labels are 0-based.
pub fn scramble<T: Scalar>(table: &StrategyTable<T>, phi: &[usize]) -> Result<StrategyTable<T>> {
    let k = table.k();
    let mut seen = vec![false; k];
    if phi.len() != k || phi.iter().any(|&x| x >= k || std::mem::replace(&mut seen[x], true)) {
        return contract(format!("phi {phi:?} is not a bijection of 0..{k}"));
    }
    let mut image = vec![0; table.d()];
    StrategyTable::from_fn(k, table.d(), |tuple| {
        for (slot, &u) in image.iter_mut().zip(tuple) {
            *slot = phi[u];
        }
        table.probs(&image).to_vec()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use crate::Exact;
    use num_bigint::BigInt;
    use proptest::prelude::*;
    use rand::Rng;

    fn random_rational_table<R: Rng>(k: usize, d: usize, rng: &mut R) -> StrategyTable<Exact> {
        StrategyTable::from_fn(k, d, |_| {
            let raw: Vec<i64> = (0..d).map(|_| rng.gen_range(0..6)).collect();
            let total: i64 = raw.iter().sum();
            if total == 0 {
                return vec![Exact::from_ratio(1, d as i64); d];
            }
            raw.iter().map(|&r| Exact::new(BigInt::from(r), BigInt::from(total))).collect()
        })
        .unwrap()
    }

    #[test]
    fn permutations_are_lexicographic() {
        assert_eq!(permutations(3), vec![
            vec![0, 1, 2],
            vec![0, 2, 1],
            vec![1, 0, 2],
            vec![1, 2, 0],
            vec![2, 0, 1],
            vec![2, 1, 0]
        ]);
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }

    #[test]
    fn first_position_becomes_uniform() {
        let t = StrategyTable::<Exact>::first_position(3, 3).unwrap();
        assert!(!is_consistent(&t));
        assert_eq!(make_consistent(&t), StrategyTable::uniform(3, 3).unwrap());
    }

    #[test]
    fn max_and_uniform_are_fixed_points() {
        for (k, d) in [(4, 2), (3, 3), (2, 4)] {
            let max = StrategyTable::<Exact>::max(k, d).unwrap();
            assert!(is_consistent(&max));
            assert_eq!(make_consistent(&max), max);
            assert!(is_consistent(&StrategyTable::<Exact>::uniform(k, d).unwrap()));
        }
    }

    #[test]
    fn consistentization_preserves_sigma_exactly() {
        let mut r = rng::stream(2024, rng::DOMAIN_MONTE_CARLO, 0);
        for _ in 0..30 {
            let t = random_rational_table(3, 3, &mut r);
            let c = make_consistent(&t);
            assert!(is_consistent(&c));
            assert_eq!(c.sigma(), t.sigma());
            assert_eq!(make_consistent(&c), c);
        }
    }

    #[test]
    fn reversal_turns_max_into_min() {
        let k = 4;
        let max = StrategyTable::<Exact>::max(k, 2).unwrap();
        let rev: Vec<usize> = (0..k).rev().collect();
        let s = scramble(&max, &rev).unwrap();
        assert_eq!(s, StrategyTable::min(k, 2).unwrap());
        let mut reversed = max.sigma().probs().to_vec();
        reversed.reverse();
        assert_eq!(s.sigma().probs(), &reversed[..]);
        assert_eq!(scramble(&max, &[0, 1, 2, 3]).unwrap(), max);
        assert!(scramble(&max, &[0, 1, 1, 3]).is_err());
        assert!(scramble(&max, &[0, 1, 2]).is_err());
    }

    proptest! {
        #[test]
        fn scramble_roundtrip_and_consistency(seed in any::<u64>(), perm_idx in 0usize..24) {
            let mut r = rng::stream(seed, rng::DOMAIN_MONTE_CARLO, 1);
            let t = make_consistent(&random_rational_table(4, 2, &mut r));
            let phi = &permutations(4)[perm_idx];
            let mut inv = vec![0; 4];
            for (x, &y) in phi.iter().enumerate() {
                inv[y] = x;
            }
            let s = scramble(&t, phi).unwrap();
            prop_assert!(is_consistent(&s));
            prop_assert_eq!(scramble(&s, &inv).unwrap(), t);
        }
    }
}

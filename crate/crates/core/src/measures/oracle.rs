//! Brute-force Levy-Prokhorov distance straight from the set definition.
//!
//! `ρ(μ,ν) = inf{ε > 0 : μ(A) <= ν(A^ε) + ε and ν(A) <= μ(A^ε) + ε for all A}`.
//! Only sets made of support atoms matter, and `A^ε` changes only when `ε`
//! crosses a pairwise distance. On `(d_k, d_{k+1}]` the worst excess
//! `h_k = max_A μ(A) - ν(A^ε)` (both directions) is constant, so
//! `ρ = min_k max(d_k, h_k)`, capped by the larger total mass. Masses may differ.

use super::AtomicMeasure;
use crate::error::{size, Result};
use crate::scalar::Real;

/// Combined support size accepted by [`lp_distance_oracle`].
pub const ORACLE_MAX_ATOMS: usize = 14;

pub fn lp_distance_oracle<F: Real>(mu: &AtomicMeasure<F>, nu: &AtomicMeasure<F>) -> Result<F> {
    let (a, b) = (mu.atoms(), nu.atoms());
    if a.len() + b.len() > ORACLE_MAX_ATOMS {
        return size(format!("oracle handles at most {ORACLE_MAX_ATOMS} atoms in total"));
    }
    let cap = mu.total_mass().max(nu.total_mass());
    let mut dists = vec![F::zero()];
    for &(x, _) in a {
        for &(y, _) in b {
            dists.push((x - y).abs());
        }
    }
    dists.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    dists.dedup();

    let mut best = cap;
    for &d in &dists {
        let h = worst_excess(a, b, d).max(worst_excess(b, a, d));
        best = best.min(d.max(h));
    }
    Ok(best.max(F::zero()))
}

/// `max_A from(A) - to(N_d(A))` over subsets `A` of the `from` atoms.
fn worst_excess<F: Real>(from: &[(F, F)], to: &[(F, F)], d: F) -> F {
    let neighbours: Vec<u32> = from
        .iter()
        .map(|&(x, _)| {
            to.iter()
                .enumerate()
                .filter(|(_, &(y, _))| (x - y).abs() <= d)
                .fold(0u32, |acc, (j, _)| acc | (1 << j))
        })
        .collect();
    let mut worst = F::zero();
    for set in 0u32..(1 << from.len()) {
        let mut mass = F::zero();
        let mut hood = 0u32;
        for (i, &(_, w)) in from.iter().enumerate() {
            if set & (1 << i) != 0 {
                mass = mass + w;
                hood |= neighbours[i];
            }
        }
        let covered: F = to.iter().enumerate().filter(|(j, _)| hood & (1 << j) != 0).map(|(_, t)| t.1).sum();
        worst = worst.max(mass - covered);
    }
    worst
}

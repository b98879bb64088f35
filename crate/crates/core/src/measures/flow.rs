//! Max-flow for the Levy-Prokhorov coupling problem.
//!
//! `window_flow` solves the transport problem where an atom at `x` may send
//! mass to atoms `y` with `|x - y| <= eps`. On the line every neighbourhood is
//! a contiguous run of target atoms whose ends move right as `x` grows, so
//! filling the leftmost open capacity first is an optimal augmenting order.
//! `FlowNetwork` is a general Dinic solver used to cross-check it.

use std::collections::VecDeque;

use crate::scalar::Real;

/// Maximum mass transportable from `sources` to `sinks` along pairs within `eps`.
///
/// Both slices must be sorted by value.
pub fn window_flow<F: Real>(sources: &[(F, F)], sinks: &[(F, F)], eps: F) -> F {
    let mut cap: Vec<F> = sinks.iter().map(|s| s.1).collect();
    let mut lo = 0;
    let mut flow = F::zero();
    for &(x, supply) in sources {
        while lo < sinks.len() && sinks[lo].0 < x && (x - sinks[lo].0).abs() > eps {
            lo += 1;
        }
        let mut need = supply;
        let mut j = lo;
        while need > F::zero() && j < sinks.len() && (sinks[j].0 - x).abs() <= eps {
            let take = need.min(cap[j]);
            cap[j] = cap[j] - take;
            need = need - take;
            flow = flow + take;
            if cap[j] <= F::zero() {
                j += 1;
            }
        }
        // Everything in [lo, j) is saturated and stays so.
        lo = j.max(lo);
    }
    flow
}

#[derive(Debug, Clone)]
struct Edge<F> {
    to: usize,
    cap: F,
}

/// Directed network with real capacities (Dinic's algorithm).
#[derive(Debug, Clone)]
pub struct FlowNetwork<F> {
    adj: Vec<Vec<usize>>,
    edges: Vec<Edge<F>>,
}

impl<F: Real> FlowNetwork<F> {
    pub fn new(nodes: usize) -> Self {
        Self { adj: vec![Vec::new(); nodes], edges: Vec::new() }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: F) {
        self.adj[from].push(self.edges.len());
        self.edges.push(Edge { to, cap });
        self.adj[to].push(self.edges.len());
        self.edges.push(Edge { to: from, cap: F::zero() });
    }

    pub fn max_flow(&mut self, s: usize, t: usize) -> F {
        let n = self.adj.len();
        let mut total = F::zero();
        let eps = F::epsilon();
        loop {
            let mut level = vec![usize::MAX; n];
            level[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &e in &self.adj[u] {
                    let Edge { to, cap } = self.edges[e];
                    if cap > eps && level[to] == usize::MAX {
                        level[to] = level[u] + 1;
                        queue.push_back(to);
                    }
                }
            }
            if level[t] == usize::MAX {
                return total;
            }
            let mut next = vec![0usize; n];
            loop {
                let pushed = self.augment(s, t, F::infinity(), &level, &mut next);
                if pushed <= eps {
                    break;
                }
                total = total + pushed;
            }
        }
    }

    fn augment(&mut self, u: usize, t: usize, limit: F, level: &[usize], next: &mut [usize]) -> F {
        if u == t {
            return limit;
        }
        while next[u] < self.adj[u].len() {
            let e = self.adj[u][next[u]];
            let Edge { to, cap } = self.edges[e];
            if cap > F::epsilon() && level[to] == level[u] + 1 {
                let pushed = self.augment(to, t, limit.min(cap), level, next);
                if pushed > F::zero() {
                    self.edges[e].cap = self.edges[e].cap - pushed;
                    self.edges[e ^ 1].cap = self.edges[e ^ 1].cap + pushed;
                    return pushed;
                }
            }
            next[u] += 1;
        }
        F::zero()
    }
}

/// Max flow on the bipartite graph `{(i, j) : |x_i - y_j| <= eps}` via Dinic.
pub fn max_flow<F: Real>(sources: &[(F, F)], sinks: &[(F, F)], eps: F) -> F {
    let (n, m) = (sources.len(), sinks.len());
    let (s, t) = (n + m, n + m + 1);
    let mut net = FlowNetwork::new(n + m + 2);
    for (i, &(x, a)) in sources.iter().enumerate() {
        net.add_edge(s, i, a);
        for (j, &(y, _)) in sinks.iter().enumerate() {
            if (x - y).abs() <= eps {
                net.add_edge(i, n + j, F::infinity());
            }
        }
    }
    for (j, &(_, b)) in sinks.iter().enumerate() {
        net.add_edge(n + j, t, b);
    }
    net.max_flow(s, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sorted_atoms(raw: Vec<(u8, u8)>) -> Vec<(f64, f64)> {
        let mut v: Vec<(f64, f64)> =
            raw.into_iter().map(|(x, w)| (x as f64 / 255.0, (w as f64 + 1.0) / 64.0)).collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        v
    }

    #[test]
    fn simple_cases() {
        let a = [(0.2, 1.0)];
        let b = [(0.5, 1.0)];
        assert_eq!(window_flow(&a, &b, 0.2), 0.0);
        assert_eq!(window_flow(&a, &b, 0.3 + 1e-12), 1.0);
        let a = [(0.0, 0.5), (1.0, 0.5)];
        let b = [(0.0, 1.0)];
        assert_eq!(window_flow(&a, &b, 0.0), 0.5);
        assert_eq!(max_flow(&a, &b, 0.0), 0.5);
    }

    proptest! {
        #[test]
        fn greedy_window_matches_dinic(
            a in prop::collection::vec((any::<u8>(), any::<u8>()), 1..9),
            b in prop::collection::vec((any::<u8>(), any::<u8>()), 1..9),
            e in 0u8..=255,
        ) {
            let (a, b) = (sorted_atoms(a), sorted_atoms(b));
            let eps = e as f64 / 255.0;
            let g = window_flow(&a, &b, eps);
            let d = max_flow(&a, &b, eps);
            prop_assert!((g - d).abs() < 1e-12, "greedy {} dinic {}", g, d);
        }
    }
}

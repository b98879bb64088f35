//! One function per subcommand, each producing a [`Report`].

use std::collections::BTreeSet;

use gridlab::entropy::{gibbs_exact, gibbs_mc, grid_entropy_dual, DualOptions};
use gridlab::measures::{kl_divergence, lp_distance, lp_distance_binned, lp_distance_oracle, total_variation, total_variation_binned};
use gridlab::paths::{entropy_slope, path_stats, PathCount};
use gridlab::permutohedron::{
    enumerate_deterministic_consistent, extreme_points_of_sigma_polytope, extreme_sigma, verify_weight_tuples, Ordering,
};
use gridlab::simulate::{exact_pmf, reference_sigma, sample_environment, simulate, Model, Plan};
use gridlab::strategies::{sigma_discrete, Pmf, StrategyDomain, StrategyTable};
use gridlab::{BinnedMeasure, Exact};
use serde_json::{json, Map, Value};

use crate::inputs;
use crate::output::{big, num, nums, Report, Table};
use crate::{CliError, DiscreteArgs, DualArgs, GibbsArgs, LpArgs, PathsArgs, SimulateArgs};

fn config(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn simulate_cmd(a: &SimulateArgs, seed: u64) -> Result<Report, CliError> {
    let loaded = inputs::strategy(&a.strategy, a.k, a.d)?;
    let d = loaded.d;
    let model = match loaded.strategy.domain() {
        StrategyDomain::Continuous => Model::Continuous,
        StrategyDomain::Discrete { k, .. } => Model::Discrete { k },
    };
    let run = simulate(a.n, d, model, &Plan::Single(loaded.strategy.clone()), seed)?;
    let empirical = run.empirical_binned(a.m)?;
    let reference = reference_sigma(&loaded.strategy, d, a.m, seed)?;
    let rho = lp_distance_binned(&empirical, &reference)?;
    let tv = total_variation_binned(&empirical, &reference)?;
    let tv_pmf = match (exact_pmf(&loaded.strategy), run.empirical_pmf()) {
        (Some(e), Some(p)) => Some(0.5 * e.probs().iter().zip(p.probs()).map(|(x, y)| (x - y).abs()).sum::<f64>()),
        _ => None,
    };
    let mut table = Table::new(&["bin", "center", "empirical", "reference"]);
    for b in 0..a.m {
        table.push(vec![json!(b), num(empirical.center(b)), num(empirical.weights()[b]), num(reference.weights()[b])]);
    }
    let model_name = match model {
        Model::Continuous => json!("continuous"),
        Model::Discrete { k } => json!({ "discrete": { "K": k } }),
    };
    Ok(Report {
        command: "simulate",
        seed,
        config: config(vec![
            ("strategy", json!(a.strategy)),
            ("K", json!(a.k)),
            ("D", json!(d)),
            ("n", json!(a.n)),
            ("m", json!(a.m)),
        ]),
        result: json!({
            "model": model_name,
            "rho": num(rho),
            "tv": num(tv),
            "tv_pmf": tv_pmf.map(num),
            "empirical": nums(empirical.weights()),
            "reference": nums(reference.weights()),
        }),
        table,
    })
}

pub fn dual_cmd(a: &DualArgs, seed: u64) -> Result<Report, CliError> {
    let m_list = match &a.m {
        Some(list) => list.clone(),
        None => vec![inputs::natural_resolution(&a.nu)?.unwrap_or(8)],
    };
    let opts = DualOptions { max_iter: a.max_iter, tol: a.tol, ..DualOptions::default() };
    let mut rows = Vec::new();
    let mut table = Table::new(&["m", "entropy_estimate", "kl_to_uniform", "iterations", "grad_norm", "converged", "diverged"]);
    for &m in &m_list {
        let nu = inputs::binned_measure(&a.nu, m, a.d)?;
        let rep = grid_entropy_dual(&nu, a.d, a.beta, &opts)?;
        let kl = kl_divergence(&nu, &BinnedMeasure::uniform(m)?)?;
        table.push(vec![
            json!(m),
            num(rep.entropy_estimate),
            num(kl),
            json!(rep.iterations),
            num(rep.grad_norm),
            json!(rep.converged),
            json!(rep.diverged),
        ]);
        rows.push(json!({
            "m": m,
            "entropy_estimate": num(rep.entropy_estimate),
            "kl_to_uniform": num(kl),
            "iterations": rep.iterations,
            "grad_norm": num(rep.grad_norm),
            "converged": rep.converged,
            "diverged": rep.diverged,
            "warning": rep.warning(),
            "tau_star": nums(rep.tau_star.values()),
        }));
    }
    Ok(Report {
        command: "dual",
        seed,
        config: config(vec![
            ("nu", json!(a.nu)),
            ("m", json!(m_list)),
            ("D", json!(a.d)),
            ("beta", num(a.beta)),
            ("max_iter", json!(a.max_iter)),
            ("tol", num(a.tol)),
        ]),
        result: json!({ "rows": rows }),
        table,
    })
}

pub fn gibbs_cmd(a: &GibbsArgs, seed: u64) -> Result<Report, CliError> {
    let tau = inputs::tau(&a.tau, a.m, a.beta)?;
    let exact: f64 = gibbs_exact(&tau, a.d)?;
    let mc = match a.mc {
        Some(n) => Some(gibbs_mc(&tau, a.d, n, seed)?),
        None => None,
    };
    let mut table = Table::new(&["m", "D", "beta", "gibbs_exact", "mc_estimate", "mc_stderr"]);
    table.push(vec![
        json!(tau.m()),
        json!(a.d),
        num(tau.beta()),
        num(exact),
        mc.map_or(Value::Null, |(e, _)| num(e)),
        mc.map_or(Value::Null, |(_, s)| num(s)),
    ]);
    let mc_json = mc.map(|(e, s)| json!({ "n": a.mc, "estimate": num(e), "stderr": num(s), "z": num((e - exact) / s) }));
    Ok(Report {
        command: "gibbs",
        seed,
        config: config(vec![
            ("tau", json!(a.tau)),
            ("m", json!(tau.m())),
            ("D", json!(a.d)),
            ("beta", num(tau.beta())),
            ("mc", json!(a.mc)),
        ]),
        result: json!({ "gibbs_exact": num(exact), "mc": mc_json }),
        table,
    })
}

fn count_json(c: &PathCount) -> (Value, Value) {
    let exact = c.exact().map_or(Value::Null, big);
    (exact, num(c.ln()))
}

pub fn paths_cmd(a: &PathsArgs, seed: u64) -> Result<Report, CliError> {
    let n_max = *a.n.iter().max().ok_or_else(|| CliError::Usage("--n needs at least one value".into()))?;
    let nu = inputs::binned_measure(&a.nu, a.m, a.d)?;
    let env = sample_environment(n_max, a.d, Model::Continuous, seed)?;
    let stats = path_stats(&env, &nu, a.m, &a.eps, &a.ranks)?;
    let slopes = entropy_slope(&env, &nu, &a.eps, a.m, &a.n)?;
    let mut table = Table::new(&["n", "eps", "count", "ln_count", "slope"]);
    let mut slope_rows = Vec::new();
    for p in &slopes {
        let (count, ln_count) = count_json(&p.count);
        table.push(vec![json!(p.n), num(p.eps), count.clone(), ln_count.clone(), num(p.slope)]);
        slope_rows.push(json!({ "n": p.n, "eps": num(p.eps), "count": count, "ln_count": ln_count, "slope": num(p.slope) }));
    }
    let (total, ln_total) = count_json(&stats.total);
    let order_stats: Vec<Value> =
        stats.order_stats.iter().map(|o| json!({ "rank": big(o.rank), "distance": num(o.distance) })).collect();
    Ok(Report {
        command: "paths",
        seed,
        config: config(vec![
            ("nu", json!(a.nu)),
            ("m", json!(a.m)),
            ("D", json!(a.d)),
            ("n", json!(a.n)),
            ("eps", nums(&a.eps)),
            ("ranks", Value::Array(a.ranks.iter().map(|&r| big(r)).collect())),
        ]),
        result: json!({
            "n": stats.n,
            "states": stats.states,
            "exact": stats.exact,
            "total": total,
            "ln_total": ln_total,
            "order_stats": order_stats,
            "slopes": slope_rows,
        }),
        table,
    })
}

fn rationals(p: &Pmf<Exact>) -> Vec<String> {
    p.probs().iter().map(|x| x.to_string()).collect()
}

pub fn discrete_cmd(a: &DiscreteArgs, seed: u64) -> Result<Report, CliError> {
    let (k, d) = (a.k, a.d);
    let extreme = extreme_points_of_sigma_polytope::<Exact>(k, d)?;
    let orderings = Ordering::all(k);
    let ordering_pmfs: Vec<Pmf<Exact>> = orderings.iter().map(|o| extreme_sigma(o, d)).collect();

    let extreme_set: BTreeSet<Vec<Exact>> = extreme.iter().map(|p| p.probs().to_vec()).collect();
    let ordering_set: BTreeSet<Vec<Exact>> = ordering_pmfs.iter().map(|p| p.probs().to_vec()).collect();
    let injective = ordering_set.len() == orderings.len();
    let matches = extreme_set == ordering_set;

    let mut weight_tuples_ok = true;
    for o in &orderings {
        weight_tuples_ok &= verify_weight_tuples(&o.greedy_table::<Exact>(d)?)?.all_perm_of_d10;
    }
    let max_sigma = sigma_discrete(&StrategyTable::<Exact>::max(k, d)?)?;
    let kd = Exact::from_integer((k as i64).pow(d as u32).into());
    let formula_ok = (1..=k).all(|x| {
        let diff = (x as i64).pow(d as u32) - (x as i64 - 1).pow(d as u32);
        *max_sigma.mass(x - 1) == Exact::from_integer(diff.into()) / &kd
    });
    let tables = match enumerate_deterministic_consistent::<Exact>(k, d) {
        Ok(t) => Some(t.len()),
        Err(gridlab::Error::Size(_)) => None,
        Err(e) => return Err(e.into()),
    };

    let mut header = vec!["ordering".to_string()];
    header.extend((1..=k).map(|x| format!("p{x}")));
    let mut table = Table { header, rows: Vec::new() };
    let mut per_ordering = Vec::new();
    for (o, p) in orderings.iter().zip(&ordering_pmfs) {
        let name = o.one_based().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let mut row = vec![json!(name)];
        row.extend(rationals(p).into_iter().map(Value::from));
        table.push(row);
        let mut multiset = p.value_multiset();
        multiset.sort();
        per_ordering.push(json!({
            "ordering": o.one_based(),
            "pmf": rationals(p),
            "value_multiset": multiset.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        }));
    }
    Ok(Report {
        command: "discrete",
        seed,
        config: config(vec![("K", json!(k)), ("D", json!(d))]),
        result: json!({
            "orderings": orderings.len(),
            "deterministic_consistent_tables": tables,
            "extreme_points": extreme.iter().map(rationals).collect::<Vec<_>>(),
            "ordering_pmfs": per_ordering,
            "checks": {
                "extreme_points_match_orderings": matches,
                "ordering_map_injective": injective,
                "weight_tuples_perm_of_d10": weight_tuples_ok,
                "max_pmf_formula": formula_ok,
            },
        }),
        table,
    })
}

pub fn lp_cmd(a: &LpArgs, seed: u64) -> Result<Report, CliError> {
    let mu = inputs::atomic_measure(&a.a, a.m, a.d)?;
    let nu = inputs::atomic_measure(&a.b, a.m, a.d)?;
    let distance = lp_distance(&mu, &nu)?;
    let tv = total_variation(&mu, &nu);
    let oracle = match lp_distance_oracle(&mu, &nu) {
        Ok(x) => Some(x),
        Err(gridlab::Error::Size(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let mut table = Table::new(&["distance", "tv", "oracle"]);
    table.push(vec![num(distance), num(tv), oracle.map_or(Value::Null, num)]);
    Ok(Report {
        command: "lp",
        seed,
        config: config(vec![("a", json!(a.a)), ("b", json!(a.b)), ("m", json!(a.m)), ("D", json!(a.d))]),
        result: json!({ "distance": num(distance), "tv": num(tv), "oracle": oracle.map(num) }),
        table,
    })
}

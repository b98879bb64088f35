use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gridlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridlab"))
        .args(args)
        .env_remove("GRIDLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = gridlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn discrete_report_for_four_labels() {
    let doc = json(&["discrete", "--K", "4", "--D", "2"]);
    let r = &doc["result"];
    assert_eq!(r["orderings"], 24);
    assert_eq!(r["deterministic_consistent_tables"], 64);
    let points = r["extreme_points"].as_array().unwrap();
    assert_eq!(points.len(), 24);
    for p in points {
        let mut values: Vec<&str> = p.as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
        values.sort();
        assert_eq!(values, ["1/16", "3/16", "5/16", "7/16"]);
    }
    for check in r["checks"].as_object().unwrap().values() {
        assert_eq!(check, &Value::Bool(true));
    }
}

#[test]
fn dual_at_uniform_is_log_two() {
    let doc = json(&["dual", "--nu", "uniform", "--m", "8", "--D", "2"]);
    let est = doc["result"]["rows"][0]["entropy_estimate"].as_f64().unwrap();
    assert!((est - 2f64.ln()).abs() < 1e-6);
}

#[test]
fn lp_between_diracs() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "a.json", r#"{"type":"atoms","atoms":[[0.2,1.0]]}"#);
    let b = write(dir.path(), "b.json", r#"{"type":"atoms","atoms":[[0.5,1.0]]}"#);
    let doc = json(&["lp", "--a", &a, "--b", &b]);
    assert_eq!(doc["result"]["distance"].as_f64(), Some(0.3));
    assert_eq!(doc["result"]["oracle"].as_f64(), Some(0.3));
}

#[test]
fn reports_embed_version_config_and_seed() {
    let out = Command::new(env!("CARGO_BIN_EXE_gridlab"))
        .args(["gibbs", "--mc", "1000"])
        .env("GRIDLAB_SEED", "17")
        .output()
        .unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["seed"], 17);
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["config"]["mc"], 1000);
    assert_eq!(json(&["gibbs", "--seed", "4"])["seed"], 4);
}

#[test]
fn json_round_trips() {
    let out = gridlab(&["paths", "--n", "8,12", "--ranks", "1,5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let parsed: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", text);
}

#[test]
fn reruns_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "4", "4"].iter().enumerate() {
        let path = dir.path().join(format!("run{i}.json"));
        let out = gridlab(&[
            "simulate", "--n", "20000", "--m", "16", "--seed", "9", "--workers", workers, "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
        outputs.push(fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn csv_headers() {
    let cases: [(&[&str], &str); 4] = [
        (&["dual", "--m", "4,8", "--format", "csv"], "m,entropy_estimate,kl_to_uniform,iterations,grad_norm,converged,diverged"),
        (&["paths", "--n", "6,10", "--format", "csv"], "n,eps,count,ln_count,slope"),
        (&["simulate", "--n", "1000", "--m", "4", "--format", "csv"], "bin,center,empirical,reference"),
        (&["discrete", "--K", "3", "--format", "csv"], "ordering,p1,p2,p3"),
    ];
    for (args, header) in cases {
        let text = String::from_utf8(gridlab(args).stdout).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# gridlab "));
        assert_eq!(lines.next(), Some(header), "{args:?}");
    }
}

#[test]
fn path_counts_are_exact_and_monotone() {
    let doc = json(&["paths", "--n", "16", "--eps", "0.1,0.2,0.5,1"]);
    let r = &doc["result"];
    assert_eq!(r["total"], 1u64 << 16);
    let counts: Vec<u64> = r["slopes"].as_array().unwrap().iter().map(|s| s["count"].as_u64().unwrap()).collect();
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(counts[3], 1 << 16);
    assert!((r["slopes"][3]["slope"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-11);
}

#[test]
fn exit_codes() {
    let usage = gridlab(&["dual", "--bogus"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&usage.stderr).contains("Usage"));
    assert_eq!(gridlab(&["simulate", "--strategy", "min"]).status.code(), Some(2));

    let missing = gridlab(&["gibbs", "--tau", "/no/such/tau.json"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/no/such/tau.json"));

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"type":"binned","weights":[0.5,0.6]}"#);
    let out = gridlab(&["dual", "--nu", &bad]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));

    let unwritable = dir.path().join("missing-dir").join("out.json");
    assert_eq!(gridlab(&["gibbs", "--out", unwritable.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(gridlab(&["discrete", "--K", "7"]).status.code(), Some(1));
}

#[test]
fn strategy_files_drive_simulation() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "vee.json", r#"{"type":"scored","score":"vee","D":3}"#);
    let doc = json(&["simulate", "--strategy", &file, "--n", "50000", "--m", "10"]);
    assert_eq!(doc["config"]["D"], 3);
    assert!(doc["result"]["rho"].as_f64().unwrap() < 0.05);
    assert_eq!(gridlab(&["simulate", "--strategy", &file, "--D", "2"]).status.code(), Some(2));
}

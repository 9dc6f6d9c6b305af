use std::path::{Path, PathBuf};

use dnls_core::cli::run;
use dnls_core::config::ScenarioConfig;
use serde_json::Value;
use tempfile::TempDir;

const SHARED: &str = r#"{
    "schema_version": 1,
    "model": {"kappa": 0.5, "gamma": 2.0, "nonlinearity": {"sigma": 1.0, "sign": 1}},
    "lattice": {"sites": 64},
    "driving": {
        "g1": {"profile": {"kind": "exponential", "amplitude": 0.8727, "rate": 1.0},
               "law": {"kind": "periodic", "period": 6.283185307179586, "harmonics": [{"order": -1, "coefficient": [1.0, 0.0]}]}},
        "g2": {"profile": {"kind": "single_site", "amplitude": 0.25, "site": 0},
               "law": {"kind": "periodic", "period": 6.283185307179586, "harmonics": [{"order": 1, "coefficient": [1.0, 0.0]}]}}
    },
    "scenario": {"horizon": 5.0, "initial": {"kind": "random_absorbing", "multiple": 3.0}, "seed": 9}
}"#;

const BREATHER: &str = r#"{
    "schema_version": 1,
    "model": {"kappa": 0.5, "gamma": 3.0, "nonlinearity": {"sigma": 1.0, "sign": 1}},
    "lattice": {"sites": 64},
    "driving": {
        "g1": {"profile": {"kind": "exponential", "amplitude": 0.5, "rate": 1.0},
               "law": {"kind": "periodic", "period": 6.283185307179586, "harmonics": [{"order": -1, "coefficient": [1.0, 0.0]}]}},
        "g2": {"profile": {"kind": "gaussian", "amplitude": 0.1, "width": 1.4142135623730951},
               "law": {"kind": "periodic", "period": 6.283185307179586,
                       "harmonics": [{"order": 1, "coefficient": [0.5, 0.0]}, {"order": -1, "coefficient": [0.5, 0.0]}]}}
    },
    "scenario": {"seeds": [null, 1]}
}"#;

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn dnls(args: &[&str]) -> i32 {
    run(std::iter::once("dnls").chain(args.iter().copied()).map(std::ffi::OsString::from))
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn simulate_writes_a_trajectory() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", SHARED);
    let csv = dir.path().join("t.csv");
    let json = dir.path().join("s.json");
    let code = dnls(&["simulate", "--config", cfg.to_str().unwrap(), "--out", csv.to_str().unwrap(), "--json", json.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header.split(',').count(), 1 + 2 * 64);
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() > 2);
    let last_t: f64 = rows.last().unwrap().split(',').next().unwrap().parse().unwrap();
    assert_eq!(last_t, 5.0);
    let summary = read_json(&json);
    assert_eq!(summary["command"], "simulate");
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["samples"].as_u64().unwrap() as usize, rows.len());
}

#[test]
fn runs_are_deterministic_and_seed_overrides_apply() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", SHARED);
    let run_to = |name: &str, seed: Option<&str>| {
        let out = dir.path().join(name);
        let mut args = vec!["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        assert_eq!(dnls(&args), 0);
        std::fs::read(out).unwrap()
    };
    let a = run_to("a.csv", None);
    assert_eq!(a, run_to("b.csv", None));
    assert_eq!(a, run_to("c.csv", Some("9")));
    assert_ne!(a, run_to("d.csv", Some("10")));
}

#[test]
fn checks_report_pass() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "c.json", SHARED);
    for cmd in ["verify-bounds", "absorbing", "tail"] {
        let json = dir.path().join(format!("{cmd}.json"));
        assert_eq!(dnls(&[cmd, "--config", cfg.to_str().unwrap(), "--json", json.to_str().unwrap()]), 0, "{cmd}");
        assert_eq!(read_json(&json)["pass"], true);
    }
}

#[test]
fn weak_damping_is_bad_input() {
    let dir = TempDir::new().unwrap();
    let weak = SHARED.replace("\"gamma\": 2.0", "\"gamma\": 0.4");
    let cfg = write(dir.path(), "weak.json", &weak);
    assert_eq!(dnls(&["absorbing", "--config", cfg.to_str().unwrap()]), 2);
}

#[test]
fn malformed_input_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "bad.json", "{\"schema_version\": 1");
    assert_eq!(dnls(&["simulate", "--config", cfg.to_str().unwrap()]), 2);
    assert_eq!(dnls(&["simulate", "--config", dir.path().join("missing.json").to_str().unwrap()]), 2);
    assert_eq!(dnls(&["frobnicate"]), 2);
    assert_eq!(dnls(&["simulate"]), 2);
    assert_eq!(dnls(&["--help"]), 0);
}

#[test]
fn breather_summary_and_profile() {
    let dir = TempDir::new().unwrap();
    let cfg = write(dir.path(), "b.json", BREATHER);
    let json = dir.path().join("b.out.json");
    let csv = dir.path().join("profile.csv");
    let code = dnls(&["breather", "--config", cfg.to_str().unwrap(), "--json", json.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    let s = read_json(&json);
    assert!(s["periodicity_residual"].as_f64().unwrap() <= 1e-9);
    assert!(s["seed_spread"].as_f64().unwrap() <= 1e-9);
    assert_eq!(s["verification"]["pass"], true);
    let profile = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(profile.lines().count(), 65);
    assert!(profile.lines().nth(1).unwrap().starts_with("-32,"));
}

#[test]
fn loaded_configs_re_emit_identically() {
    let cfg = ScenarioConfig::from_json(BREATHER).unwrap();
    let text = cfg.to_json();
    assert_eq!(ScenarioConfig::from_json(&text).unwrap().to_json(), text);
}

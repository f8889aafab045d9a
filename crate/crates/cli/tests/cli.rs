use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz-lab")).args(args).output().expect("binary runs")
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn young_eval_power_scaled() {
    let out = lab(&["young", "--phi", "power_scaled:2", "--at", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json_stdout(&out);
    assert_eq!(r["result"]["value"], 2.0);
    assert_eq!(r["schema_version"], "1");
    assert_eq!(r["seed"], 7);
}

#[test]
fn divergent_fixture_fails_strict_mode_only() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert!(lab(&["emit-fixture", "lpq-divergent", "--dir", d]).status.success());
    let cfg = dir.path().join("lpq-divergent.json");
    let cfg = cfg.to_str().unwrap();
    assert_eq!(lab(&["--strict", "run", "--config", cfg]).status.code(), Some(2));
    let out = lab(&["run", "--config", cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_stdout(&out)["result"]["reports"][0]["verdict"], "diverges");
}

#[test]
fn every_fixture_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for name in orlicz_cli::fixtures::FIXTURES {
        let out = lab(&["emit-fixture", name, "--dir", d]);
        assert!(out.status.success(), "{name}");
        let cfg = dir.path().join(format!("{name}.json"));
        let out_dir = dir.path().join(format!("out-{name}"));
        let out = lab(&["--output-dir", out_dir.to_str().unwrap(), "run", "--config", cfg.to_str().unwrap()]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let cfg = orlicz_cli::config::load_config(&cfg).unwrap();
        let report = out_dir.join(format!("{}.json", cfg.command.name()));
        let v: Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
        assert_eq!(v["seed"], 7);
    }
}

#[test]
fn worked_example_passes_every_suite() {
    let out = lab(&["--strict", "verify-all", "--fixture", "example-2-10"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_stdout(&out)["result"]["all_passed"], true);
}

#[test]
fn schema_errors_name_the_field_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", r#"{"command": "norm", "space": {"symmetric": {"n_cells": -3}}}"#);
    let out = lab(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("space.symmetric.n_cells"));
    let cfg = write(dir.path(), "bad2.json", r#"{"command": "criteria", "params": {"wich": "all"}}"#);
    let out = lab(&["run", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("wich"));
    assert_eq!(lab(&["emit-fixture", "nope"]).status.code(), Some(1));
}

#[test]
fn norm_and_condexp_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let space = r#"{"atomic": {"masses": [0.25, 0.25, 0.5]}}"#;
    let out = lab(&["norm", "--phi", "ps:2", "--space", space, "--fn", "[2, 0, 0]"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // p^(-1/p) (Σ|f|^p m)^(1/p) = 2^(-1/2) · 1
    let n = json_stdout(&out)["result"]["norm"].as_f64().unwrap();
    assert!((n - 0.5f64.sqrt()).abs() < 1e-10);

    let out_dir = dir.path().join("ce");
    let out = lab(&[
        "--output-dir",
        out_dir.to_str().unwrap(),
        "condexp",
        "--space",
        r#"{"symmetric": {"n_cells": 4}}"#,
        "--fn",
        r#""w""#,
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("condexp.json")).unwrap()).unwrap();
    for b in v["result"]["blocks"].as_array().unwrap() {
        assert!(b["re"].as_f64().unwrap().abs() < 1e-15);
    }
    let csv = std::fs::read_to_string(out_dir.join("condexp-cells.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
}

#[test]
fn essnorm_from_flags_writes_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&[
        "--output-dir",
        dir.path().to_str().unwrap(),
        "essnorm",
        "--phi",
        "ps:2",
        "--u",
        r#"{"mass_fn": "2^(-n)", "value_fn": "1 + 1/n", "n_max": 64}"#,
        "--C",
        "1",
        "--ks",
        "1,2,4,8,16",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("essnorm-curve.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "k,distance,raw,candidates");
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn nmax_env_sets_default_depth() {
    let out = Command::new(env!("CARGO_BIN_EXE_orlicz-lab"))
        .env("ORLICZ_LAB_NMAX", "40")
        .args(["criteria", "--which", "power-atom-bound", "--p", "2", "--q", "3", "--u", r#"{"mass_fn": "2^(-n)", "value_fn": "1"}"#])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = &json_stdout(&out)["result"]["reports"][0]["per_atom_trace"];
    assert_eq!(trace.as_array().unwrap().len(), 40);
}

#[test]
fn compare_mode_detects_differences() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (d, at) in [(&a, "2"), (&b, "3")] {
        let out = lab(&["--output-dir", d.to_str().unwrap(), "young", "--phi", "ps:2", "--at", at]);
        assert!(out.status.success());
    }
    let (ja, jb) = (a.join("young.json"), b.join("young.json"));
    assert_eq!(lab(&["--compare", ja.to_str().unwrap(), ja.to_str().unwrap()]).status.code(), Some(0));
    let out = lab(&["--compare", ja.to_str().unwrap(), jb.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("/result"));
}

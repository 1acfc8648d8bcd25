//! End-to-end tests of the `growup` binary: spec examples and the exit-code
//! contract (0 pass, 1 check failure, 2 usage/config error).

use std::path::Path;
use std::process::{Command, Output};

fn growup(args: &[&str]) -> Output {
    growup_env(args, &[])
}

fn growup_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_growup"));
    cmd.args(args).env_remove("GROWUP_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn exponents_example() {
    let o = growup(&["exponents", "--m", "2", "--N", "3"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("p0 = 2\n") && text.contains("pF = 2\n") && text.contains("pS = 10\n"), "{text}");
    let j = json(&growup(&["exponents", "--m", "2", "--N", "3", "--json"]));
    assert_eq!(j["exponents"]["pS"], 10.0);
}

#[test]
fn regime_examples() {
    let o = growup(&["regime", "--m", "1", "--p", "1", "--N", "3", "--L", "2", "--json"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["rate_law"], "exp(lambda0 t)");
    let lam = j["lambda0"].as_f64().unwrap();
    assert!(lam > 0.0 && lam < 1.0);
    assert!(stdout(&growup(&["regime", "--m", "1", "--p", "1", "--N", "3", "--L", "2"])).contains("lambda0(L) = "));

    let j = json(&growup(&["regime", "--m", "0.7", "--p", "0.5", "--N", "3", "--json"]));
    assert_eq!(j["region"], "D");
    assert_eq!(j["regime"]["rate_law"], "none");
}

#[test]
fn usage_and_parameter_errors_exit_2() {
    assert_eq!(code(&growup(&["regime", "--m", "-1", "--p", "1", "--N", "3"])), 2);
    assert_eq!(code(&growup(&["regime", "--m", "1", "--p", "2", "--N", "3"])), 2); // p > p0
    assert_eq!(code(&growup(&["regime", "--m", "1"])), 2);
    assert_eq!(code(&growup(&["frobnicate"])), 2);
    assert_eq!(code(&growup(&["verify", "no-such-recipe"])), 2);
    assert_eq!(code(&growup(&["--help"])), 0);
}

#[test]
fn special_stationary_csv_matches_sin_r_over_r() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("stat.csv");
    let o = growup(&["special", "stationary", "--N", "3", "--gamma", "1", "--L", "1", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (header, rows) = read_csv(&csv);
    assert_eq!(header, ["r", "w", "w_prime", "u"]);
    let mut checked = 0;
    for row in &rows {
        let r: f64 = row[0].parse().unwrap();
        if r > 0.0 && r <= 1.0 {
            let w: f64 = row[1].parse().unwrap();
            assert!((w / (r.sin() / r) - 1.0).abs() < 1e-8);
            checked += 1;
        }
    }
    assert!(checked >= 10);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("stat.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "special stationary");
    assert_eq!(meta["config"]["L"], 1.0);
}

#[test]
fn special_eigen_and_selfsim() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("eig.csv");
    let j = json(&growup(&["special", "eigen", "--N", "2", "--L", "3", "-o", csv.to_str().unwrap()]));
    let lam = j["summary"]["lambda0"].as_f64().unwrap();
    assert!(lam > 0.0 && lam < 1.0);
    assert_eq!(read_csv(&csv).0, ["r", "phi"]);

    let csv = dir.path().join("ss.csv");
    let o = growup(&["special", "selfsim", "--m", "0.5", "--N", "3", "--type", "I", "--alpha", "2.5", "-o", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let j = json(&o);
    let near = j["summary"]["near_zero_exponent"].as_f64().unwrap();
    let far = j["summary"]["far_field_exponent"].as_f64().unwrap();
    assert!((near + 2.0).abs() < 0.04 && (far + 4.0).abs() < 0.08, "{near} {far}");
    assert!(read_csv(&csv).1.len() > 100);
    assert_eq!(code(&growup(&["special", "selfsim", "--m", "0.5", "--N", "3", "--alpha", "2.5"])), 2);
}

#[test]
fn simulate_from_config_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("heat.json");
    std::fs::write(
        &cfg,
        r#"{"params": {"m": 1, "p": 1, "N": 2, "L": 1}, "grid": {"r_max": 60, "cells": 300}, "t_max": 5,
            "initial": {"kind": "gaussian", "amplitude": 1, "width": 1}, "reaction": false, "trace_radii": [0, 1]}"#,
    )
    .unwrap();
    let out = dir.path().join("run");
    // the flag overrides the file's t_max
    let o = growup(&["simulate", "-c", cfg.to_str().unwrap(), "--t-max", "50", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&o);
    assert_eq!(report["pass"], true);
    assert!((report["t_end"].as_f64().unwrap() - 50.0).abs() < 1e-9);
    assert!(report["checks"].as_array().unwrap().iter().any(|c| c["name"] == "heat-kernel" && c["pass"] == true));
    for f in ["series.csv", "snapshots.csv", "meta.json", "report.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["t_max"], 50.0);
    let (header, rows) = read_csv(&out.join("series.csv"));
    assert_eq!(header.last().unwrap(), "u(r=1)");
    assert!(rows.iter().all(|r| r[0].contains('e')));
    let (header, _) = read_csv(&out.join("snapshots.csv"));
    assert_eq!(header, ["t", "r", "u", "dt_used"]);

    // --print-config shows the merged document and it parses back
    let o = growup(&["simulate", "-c", cfg.to_str().unwrap(), "--m", "0.5", "--print-config"]);
    let merged: growup_cli::ExperimentConfig = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(merged.params.m, 0.5);
}

#[test]
fn simulate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"params": {"m": 1}}"#).unwrap();
    assert_eq!(code(&growup(&["simulate", "-c", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&growup(&["simulate", "--cells", "2", "-o", dir.path().join("x").to_str().unwrap()])), 2);
    // a ≡ 0 heat-kernel check on a domain far too small: the oracle fails → exit 1
    let out = dir.path().join("small");
    let o = growup(&[
        "simulate", "--m", "1", "--p", "1", "--N", "2", "--no-reaction", "--r-max", "3", "--cells", "30", "--t-max", "20", "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["pass"], false);
    assert!(out.join("report.json").is_file());
}

#[test]
fn verify_recipes() {
    let o = growup(&["verify", "Lstar"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["pass"], true);
    assert_eq!(j["criterion"], 1);
    assert!(j["checks"].as_array().unwrap().iter().any(|c| c["name"] == "L*(3) vs pi/2"));

    for recipe in ["rate-pm", "duhamel-limits"] {
        let o = growup(&["verify", recipe]);
        assert_eq!(code(&o), 0, "{recipe}: {}", stdout(&o));
        assert_eq!(json(&o)["recipe"], recipe);
    }
    let list = stdout(&growup(&["verify", "--list"]));
    assert!(list.contains("rate-outside") && list.contains("heat-kernel"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lstar.json");
    let o = growup(&["verify", "lstar", "--human", "-o", path.to_str().unwrap()]);
    assert!(stdout(&o).starts_with("PASS criterion 1 Lstar"));
    assert!(path.is_file());
}

#[test]
fn sweep_empty_grid_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty");
    let o = growup(&["sweep", "--N", "3", "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(out.join("regime.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(out.join("regime.meta.json").is_file());

    let out = dir.path().join("l0");
    let o = growup_env(&["sweep", "--table", "lambda0", "--N", "3", "--L", "log:1.6:100:20", "-o", out.to_str().unwrap()], &[("GROWUP_WORKERS", "3")]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["workers"], 3);
    assert_eq!(j["summary"]["monotone_increasing"], true);
    let (_, rows) = read_csv(&out.join("lambda0.csv"));
    assert_eq!(rows.len(), 20);

    assert_eq!(code(&growup_env(&["sweep", "--N", "3", "-o", out.to_str().unwrap()], &[("GROWUP_WORKERS", "zero")])), 2);
    assert_eq!(code(&growup(&["sweep", "--table", "k-star"])), 2);
}

#[test]
fn sweep_10x10_matches_classifier() {
    // N = 3, L = 2: the m and p grids are offset so that no cell sits on the
    // border p = m; cells with p > m < 1 (region C) have no data-independent
    // prediction and are not compared; cells next to a region border are
    // excluded from the gated fraction.
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig1");
    let o = growup_env(
        &[
            "sweep", "--N", "3", "--L", "2", "--m", "0.55:1.45:10", "--p", "0.3:1.2:10", "--t-max", "1e4", "--r-max", "20", "--cells",
            "200", "--no-cells", "-o", out.to_str().unwrap(),
        ],
        &[("GROWUP_WORKERS", "4")],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let s = &json(&o)["summary"];
    assert_eq!(s["cells"], 100);
    let compared = s["compared"].as_u64().unwrap();
    assert!(compared >= 40, "{s}");
    assert!(s["interior_compared"].as_u64().unwrap() >= 30, "{s}");
    assert!(s["interior_agreement_fraction"].as_f64().unwrap() >= 0.9, "{s}");
    assert!(!out.join("cells").exists());
}

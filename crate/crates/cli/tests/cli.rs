use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn pdjc(args: &[&str], dir: &Path, config: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pdjc"));
    cmd.args(args).arg("--out").arg(dir);
    if let Some(text) = config {
        let path = dir.join("config.json");
        fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

const SMALL: &str = r#"{"w_mod_sq": 9, "lambda": 5, "delta": 0.1, "t_max_scaled": 50, "n_points": 201}"#;

#[test]
fn evolve_is_byte_deterministic_across_thread_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(pdjc(&["evolve", "--with-oracle"], a.path(), Some(SMALL)).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_pdjc"))
        .env("PDJC_THREADS", "1")
        .args(["evolve", "--with-oracle", "--out"])
        .arg(b.path())
        .arg("--config")
        .arg(a.path().join("config.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
    for name in ["evolution.csv", "summary.json"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn evolve_writes_schema_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = pdjc(&["evolve", "--observables", "squeezing,inversion"], dir.path(), Some(SMALL));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "evolution.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "gt,inversion,s_x,s_p,sigma_xx,sigma_pp,bound");
    assert_eq!(lines.count(), 201);
    let summary: Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    assert!(summary["norm_defect_max"].as_f64().unwrap() < 1e-12);
    assert!(summary["oracle_deviation_max"].is_null());
    let inv = &summary["per_observable"]["inversion"];
    assert_eq!(inv["arg_gt_max"].as_f64(), Some(0.0));
    for key in ["min", "max", "arg_gt_min", "arg_gt_max"] {
        assert!(inv[key].is_number(), "{key}");
    }
}

#[test]
fn evolve_with_oracle_reports_deviation() {
    let dir = TempDir::new().unwrap();
    let out = pdjc(&["evolve", "--with-oracle", "--observables", "entropy"], dir.path(), Some(SMALL));
    assert!(out.status.success());
    let summary: Value = serde_json::from_str(&read(dir.path(), "summary.json")).unwrap();
    assert!(summary["oracle_deviation_max"].as_f64().unwrap() < 1e-8);
    assert!(summary["per_observable"]["g_plus"].is_object());
}

#[test]
fn spectrum_min_gap_matches_coupling() {
    let dir = TempDir::new().unwrap();
    for lambda in [0.0, 50.0] {
        let config = format!(r#"{{"lambda": {lambda}, "spectrum": {{"n_list": [1, 2]}}}}"#);
        let out = pdjc(&["spectrum"], dir.path(), Some(&config));
        assert!(out.status.success());
        let csv = read(dir.path(), "spectrum.csv");
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "n,delta,e_plus,e_minus");
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 2 * 201);
        for n in [1.0, 2.0] {
            let gap = rows.iter().filter(|r| r[0] == n).map(|r| r[2] - r[3]).fold(f64::INFINITY, f64::min);
            let expected = 2.0 * 0.01 * (2.0 * n + 2.0 * lambda + 1.0_f64).sqrt();
            assert!((gap - expected).abs() < 1e-12, "n={n} lambda={lambda}: {gap} vs {expected}");
        }
    }
}

#[test]
fn uncoupled_spectrum_crosses() {
    let dir = TempDir::new().unwrap();
    let out = pdjc(&["spectrum"], dir.path(), Some(r#"{"g": 0, "t_max": 1, "spectrum": {"n_list": [1]}}"#));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "spectrum.csv");
    let gap = csv
        .lines()
        .skip(1)
        .map(|l| {
            let r: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (r[2] - r[3]).abs()
        })
        .fold(f64::INFINITY, f64::min);
    assert!(gap < 1e-12);
}

#[test]
fn empty_detuning_range_gives_header_only() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"spectrum": {"delta_start": 0.1, "delta_end": -0.1}}"#;
    assert!(pdjc(&["spectrum"], dir.path(), Some(config)).status.success());
    assert_eq!(read(dir.path(), "spectrum.csv"), "n,delta,e_plus,e_minus\n");
}

#[test]
fn validate_passes_on_default_truncation() {
    let dir = TempDir::new().unwrap();
    let out = pdjc(&["validate"], dir.path(), Some(r#"{"lambda": 50, "delta": 0.01, "n_points": 401}"#));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&read(dir.path(), "validation.json")).unwrap();
    assert_eq!(report["passed"], Value::Bool(true));
    assert!(report["amplitude_deviation_max"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn validate_fails_on_undersized_truncation() {
    let dir = TempDir::new().unwrap();
    let out = pdjc(&["validate"], dir.path(), Some(r#"{"w_mod_sq": 30, "n_trunc_override": 20, "n_points": 101}"#));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation_boundary_leakage"));
    let report: Value = serde_json::from_str(&read(dir.path(), "validation.json")).unwrap();
    assert_eq!(report["passed"], Value::Bool(false));
}

#[test]
fn invalid_config_names_the_field() {
    let dir = TempDir::new().unwrap();
    let out = pdjc(&["evolve"], dir.path(), Some(r#"{"lambda": -0.6}"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda"));
    let out = pdjc(&["evolve"], dir.path(), Some(r#"{"t_max_scaled": 0, "n_points": 2}"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_max_scaled"));
    let out = pdjc(&["evolve", "--observables", "inversion,spin"], dir.path(), None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn uncoupled_evolution_uses_absolute_time() {
    let dir = TempDir::new().unwrap();
    let out = pdjc(&["evolve", "--observables", "inversion"], dir.path(), Some(r#"{"g": 0, "t_max": 10, "n_points": 11}"#));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "evolution.csv");
    assert!(csv.starts_with("t,inversion\n"));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn secdof(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_secdof"))
        .arg("--out-dir")
        .arg(dir)
        .args(args)
        .env_remove("SECDOF_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const QUICK: [&str; 4] = ["--pgrid", "1e2:1e8:7", "--ser-trials", "100"];

#[test]
fn run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = secdof(dir.path(), &[&["run", "--scheme", "wt-helpers", "--m", "1", "--out", "runs/wt1.csv"][..], &QUICK].concat());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("runs/wt1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8);
    assert!(csv.starts_with("P,Q,a,gamma,rate_1,sum_rate,leakage,"));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("runs/wt1.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["csv"], "runs/wt1.csv");
    assert_eq!(stdout_json(&out)["theory_slope"], "1/2");
}

#[test]
fn rerun_reports_identical_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = secdof(dir.path(), &["run", "--scheme", "ic-cm", "--m", "0", "--pgrid", "1e2:1e5:4", "--out", "ic.csv"]);
    assert!(out.status.success());
    let out = secdof(dir.path(), &["rerun", "ic.manifest.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["identical"], true);
}

#[test]
fn rerun_detects_tampered_csv() {
    let dir = tempfile::tempdir().unwrap();
    secdof(dir.path(), &["run", "--scheme", "wt-helpers", "--m", "1", "--pgrid", "1e2:1e5:4", "--out", "w.csv"]);
    let path = dir.path().join("w.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("100,", "101,", 1)).unwrap();
    let out = secdof(dir.path(), &["rerun", "w.manifest.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["identical"], false);
}

#[test]
fn invalid_delta_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = secdof(dir.path(), &["run", "--scheme", "wt-helpers", "--m", "1", "--delta", "1.5", "--pgrid", "1e2:1e8:7", "--out", "x.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "delta_out_of_range");
    assert!(err["message"].as_str().unwrap().contains("delta out of range"));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn output_path_cannot_escape() {
    let dir = tempfile::tempdir().unwrap();
    for target in ["../escape.csv", "/tmp/escape.csv"] {
        let out = secdof(dir.path(), &["run", "--scheme", "wt-helpers", "--m", "1", "--pgrid", "1e2:1e5:4", "--out", target]);
        assert_eq!(out.status.code(), Some(2), "{target}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(err["error"], "invalid_path");
    }
}

#[test]
fn mac_has_rate_per_user() {
    let dir = tempfile::tempdir().unwrap();
    let out = secdof(dir.path(), &["run", "--scheme", "mac", "--k", "2", "--pgrid", "1e2:1e5:4", "--out", "mac.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("mac.csv")).unwrap();
    assert!(csv.starts_with("P,Q,a,gamma,rate_1,rate_2,sum_rate,"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(
        &config,
        r#"{"scheme": "wt-helpers", "m": 2, "pgrid": "1e2:1e5:4", "seed": 4, "out": "from-config.csv"}"#,
    )
    .unwrap();
    let out = secdof(dir.path(), &["run", "--config", config.to_str().unwrap(), "--out", "override.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("override.csv").exists());
    assert!(!dir.path().join("from-config.csv").exists());
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("override.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 4);
    assert_eq!(manifest["config"]["m"], 2);
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    std::fs::write(&config, r#"{"scheme": "wt-helpers", "m": 1, "pgrid": "1e2:1e5:4", "bogus": 1}"#).unwrap();
    let out = secdof(dir.path(), &["run", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_secdof"))
        .args(["run", "--scheme", "wt-helpers", "--m", "0", "--pgrid", "1e2:1e5:4", "--out", "env.csv"])
        .env("SECDOF_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("env.csv").exists());
}

#[test]
fn table_lists_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = secdof(dir.path(), &["table", "--max-m", "2", "--max-k", "4", "--json"]);
    assert!(out.status.success());
    let rows = stdout_json(&out);
    let dof_of = |kind: &str, key: &str, n: u64| {
        rows.as_array()
            .unwrap()
            .iter()
            .find(|r| r["topology"]["kind"] == kind && r["topology"][key] == n)
            .map(|r| r["dof"].as_str().unwrap().to_string())
    };
    assert_eq!(dof_of("wiretap-helpers", "helpers", 1).as_deref(), Some("1/2"));
    assert_eq!(dof_of("ic-cm", "helpers", 0).as_deref(), Some("2/3"));
    assert_eq!(dof_of("mac-wiretap", "users", 4).as_deref(), Some("12/13"));
}

#[test]
fn verify_alignment_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = secdof(dir.path(), &["--jobs", "2", "verify", "--suite", "alignment", "--seeds", "3", "--report", "r/align.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r/align.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}

#[test]
fn unknown_suite_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = secdof(dir.path(), &["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

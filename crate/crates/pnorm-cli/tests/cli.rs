//! End-to-end tests of the `pnorm` binary: exit codes, JSON/CSV shapes, and
//! seed determinism.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn pnorm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnorm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

fn identity3() -> tempfile::NamedTempFile {
    write_temp(
        r#"{"rows":3,"cols":3,"entries":[[1,0],[0,0],[0,0],[0,0],[1,0],[0,0],[0,0],[0,0],[1,0]]}"#,
    )
}

/// The 4x2 column stacking (n = 2) of the diagonalizable 2x2 instance.
fn sd_element() -> tempfile::NamedTempFile {
    write_temp(
        r#"{"rows":4,"cols":2,"entries":[
            [1.5,0],[0.5,0],
            [0.5,0],[1.5,0],
            [1.5,0],[-0.5,0],
            [-0.5,0],[1.5,0]]}"#,
    )
}

fn sd_algebra() -> tempfile::NamedTempFile {
    write_temp(
        r#"{"kind":"basis","dim":2,"basis":[
            {"rows":2,"cols":2,"entries":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]},
            {"rows":2,"cols":2,"entries":[[0.5,0],[-0.5,0],[-0.5,0],[0.5,0]]}]}"#,
    )
}

#[test]
fn norm_exact_identity() {
    let m = identity3();
    let out = pnorm(&["norm", m.path().to_str().unwrap(), "-p", "1", "-q", "1", "--exact"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["estimate"]["value"].as_f64().unwrap(), 1.0);
    assert_eq!(v["manifest"]["command"], "norm");
}

#[test]
fn norm_exact_rejects_unsupported_pair() {
    let m = identity3();
    let out = pnorm(&["norm", m.path().to_str().unwrap(), "-p", "3", "-q", "3", "--exact"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn norm_estimate_is_seed_deterministic() {
    let m = sd_element();
    let run = || {
        pnorm(&[
            "norm", m.path().to_str().unwrap(), "-p", "1.5", "-q", "1.5",
            "--seed", "9", "--restarts", "8",
        ])
    };
    let (a, b) = (run(), run());
    assert!(a.status.success());
    let (va, vb) = (stdout_json(&a), stdout_json(&b));
    assert_eq!(va["estimate"]["value"], vb["estimate"]["value"]);
}

#[test]
fn norm_oracle_brackets_the_estimate() {
    let m = identity3();
    let out = pnorm(&[
        "norm", m.path().to_str().unwrap(), "-p", "1.5", "-q", "1.5",
        "--oracle", "--resolution", "12",
    ]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let value = v["oracle"]["value"].as_f64().unwrap();
    let upper = v["oracle"]["upper_bound"].as_f64().unwrap();
    assert!(value <= 1.0 + 1e-12 && 1.0 <= upper);
}

#[test]
fn malformed_matrix_is_an_input_error() {
    let m = write_temp("{not json");
    let out = pnorm(&["norm", m.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn gap_detects_norm_recovery_failure_at_p1() {
    let (el, alg) = (sd_element(), sd_algebra());
    let out = pnorm(&[
        "gap", el.path().to_str().unwrap(),
        "--algebra", alg.path().to_str().unwrap(),
        "-p", "1", "--restarts", "64",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v = stdout_json(&out);
    assert_eq!(v["cstar_like"], false);
    let gap = v["report"]["gap"].as_f64().unwrap();
    assert!(gap > 0.8 && gap < 0.9, "gap = {gap}");
}

#[test]
fn gap_passes_at_p2() {
    let (el, alg) = (sd_element(), sd_algebra());
    let out = pnorm(&[
        "gap", el.path().to_str().unwrap(),
        "--algebra", alg.path().to_str().unwrap(),
        "-p", "2", "--restarts", "16",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["cstar_like"], true);
}

#[test]
fn verify_duality_suite_passes() {
    let out = pnorm(&["verify", "duality", "--trials", "10"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["report"]["passed"], true);
    assert_eq!(v["report"]["trials"], 10);
}

#[test]
fn counterexample_upper_triangular_has_zero_pairing() {
    let out = pnorm(&["counterexample", "upper-triangular", "-p", "1.5", "-n", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["report"]["pairing_sup"].as_f64().unwrap(), 0.0);
    assert!(v["report"]["gap"].as_f64().unwrap() > 0.0);
}

#[test]
fn sweep_writes_csv_with_header() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("rows.csv");
    let out = pnorm(&[
        "sweep", "--grid", "2,3", "--restarts", "8",
        "--out", csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p,norm,sup,gap,certified,restarts,seed"));
    assert_eq!(lines.count(), 2);
    // manifest still lands on stdout
    let v = stdout_json(&out);
    assert_eq!(v["manifest"]["command"], "sweep");
}

#[test]
fn sweep_without_out_prints_csv_to_stdout() {
    let out = pnorm(&["sweep", "--grid", "2", "--restarts", "8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("p,norm,sup,gap,certified,restarts,seed"));
    let manifest: Value = serde_json::from_slice(&out.stderr).expect("manifest on stderr");
    assert_eq!(manifest["command"], "sweep");
}

#[test]
fn invalid_thread_cap_is_an_input_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_pnorm"))
        .env("PNORM_THREADS", "zero")
        .args(["norm", "/nonexistent.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

//! End-to-end tests for the command-line interface: exit codes, JSON shape,
//! and a few frozen values.

use std::io::Write;
use std::process::{Command, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_tame-weights");

fn run_with_stdin(args: &[&str], input: &str) -> (i32, String, String) {
    let mut child = Command::new(BIN)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn binary");
    child
        .stdin
        .as_mut()
        .expect("stdin")
        .write_all(input.as_bytes())
        .expect("write stdin");
    let out = child.wait_with_output().expect("wait");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_stdin(args, "")
}

const UNRAMIFIED_P5: &str = r#"{
    "ctx": {"p": 5, "f": 1, "e": 1, "n": 3},
    "pieces": [
        {"niveau": 1, "exponent": 0},
        {"niveau": 1, "exponent": 0},
        {"niveau": 1, "exponent": 0}
    ]
}"#;

#[test]
fn compute_obvious_set_of_unramified_parameter() {
    let (code, stdout, _) = run_with_stdin(&["compute", "--set", "obv"], UNRAMIFIED_P5);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("JSON report");
    let rows: Vec<Vec<Vec<i64>>> = report["w_obv"]
        .as_array()
        .expect("w_obv array")
        .iter()
        .map(|w| serde_json::from_value(w["rows"].clone()).expect("rows"))
        .collect();
    assert_eq!(
        rows,
        vec![
            vec![vec![6, 3, 0]],
            vec![vec![7, 3, 3]],
            vec![vec![7, 7, 3]],
        ]
    );
    assert!(report["closure"].is_null());
    assert_eq!(report["genericity"]["delta"], 3);
    assert_eq!(report["genericity"]["is_generic"], false);
}

#[test]
fn compute_all_reports_every_predictor_over_qp() {
    let (code, stdout, _) = run_with_stdin(&["compute"], UNRAMIFIED_P5);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("JSON report");
    for key in ["w_obv", "closure", "w_expl", "w_q", "obscure", "shadow", "adp"] {
        assert!(report[key].is_array(), "{key} should be present");
    }
    // The explicit set strictly contains the closure here: F(p-2,-1,-p) is
    // obscure for the trivial parameter.
    assert_eq!(report["obscure"].as_array().expect("obscure").len(), 1);
    assert_eq!(report["shadow"].as_array().expect("shadow").len(), 0);
}

#[test]
fn compute_reads_parameter_from_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("parameter.json");
    std::fs::write(&path, UNRAMIFIED_P5).expect("write parameter");
    let (code, stdout, _) = run(&["compute", path.to_str().expect("path"), "--set", "obv"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("\"w_obv\""));
}

#[test]
fn malformed_json_is_an_input_error() {
    let (code, _, stderr) = run_with_stdin(&["compute"], "{ not json");
    assert_eq!(code, 2);
    assert!(stderr.contains("invalid parameter JSON"));
}

#[test]
fn wrong_total_dimension_is_an_input_error() {
    let input = r#"{
        "ctx": {"p": 5, "f": 1, "e": 1, "n": 3},
        "pieces": [{"niveau": 2, "exponent": 7}]
    }"#;
    let (code, _, stderr) = run_with_stdin(&["compute"], input);
    assert_eq!(code, 2);
    assert!(stderr.contains("niveaux sum to 2"));
}

#[test]
fn exact_predicted_set_outside_its_range_is_unsupported() {
    let input = r#"{
        "ctx": {"p": 5, "f": 2, "e": 1, "n": 3},
        "pieces": [
            {"niveau": 1, "exponent": 0},
            {"niveau": 1, "exponent": 0},
            {"niveau": 1, "exponent": 0}
        ]
    }"#;
    let (code, _, stderr) = run_with_stdin(&["compute", "--set", "wq"], input);
    assert_eq!(code, 3);
    assert!(stderr.contains("n = 3, f = 1, e = 1"));
}

#[test]
fn digit_witness_is_constructed_and_verified() {
    let (code, stdout, _) = run(&[
        "digits", "witness", "--d", "3", "--f", "1", "--p", "5", "--n", "17",
    ]);
    assert_eq!(code, 0);
    let out: serde_json::Value = serde_json::from_str(&stdout).expect("JSON witness");
    assert_eq!(out["verified"], true);
    assert_eq!(out["x"].as_array().expect("digits").len(), 3);
}

#[test]
fn degenerate_digit_class_is_reported_unsupported() {
    // Exponent 0 in niveau 2 lies in the excluded residue classes.
    let (code, _, stderr) = run(&[
        "digits", "witness", "--d", "2", "--f", "1", "--p", "5", "--n", "0",
    ]);
    assert_eq!(code, 3);
    assert!(!stderr.is_empty());
}

#[test]
fn corpus_verification_passes_at_five() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("corpus.json");
    let (code, _, stderr) = run(&[
        "verify-corpus", "--p", "5", "--out", path.to_str().expect("path"),
    ]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let text = std::fs::read_to_string(&path).expect("report file");
    let reports: serde_json::Value = serde_json::from_str(&text).expect("JSON reports");
    assert!(!reports.as_array().expect("array").is_empty());
    assert!(stderr.contains("instances ok"));
}

#[test]
fn gl3_comparison_scan_passes_at_five() {
    let (code, stdout, _) = run(&[
        "scan", "--check", "gl3-comparison", "--p", "5", "--jobs", "2",
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("JSON report");
    assert_eq!(report["checked"], 100);
    assert_eq!(report["violations"].as_array().expect("violations").len(), 0);
}

#[test]
fn dominance_chain_scan_requires_three_dimensions() {
    let (code, _, stderr) = run(&["scan", "--check", "yewang", "--p", "5", "--n", "4"]);
    assert_eq!(code, 3);
    assert!(stderr.contains("n = 3"));
}

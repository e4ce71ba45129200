use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_spectral-bounds"));
    cmd.env_remove("SPECTRAL_BOUNDS_TOL");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn result<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["name"] == name)
        .unwrap_or_else(|| panic!("no {name} result"))
}

#[test]
fn report_on_example_matrix() {
    let out = run(&["report", "--matrix", &fixture("example_3x3.mtx")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    let r = result(&report, "spread_centered_norm");
    assert!((r["bound"].as_f64().unwrap() - 4.342329219).abs() < 1e-8);
    assert!((r["exact"].as_f64().unwrap() - 4.561552813).abs() < 1e-8);
    assert_eq!(report["oracle_summary"]["spread_a"].as_f64().map(|s| (s * 1e4).round()), Some(45616.0));
    assert!(report["tool_version"].as_str().unwrap().starts_with("spectral-bounds/"));
    for r in report["results"].as_array().unwrap() {
        if r["applicable"] == true {
            assert!(r["slack"].as_f64().unwrap() >= -1e-8, "{r}");
        } else {
            assert!(r["reason"].is_string(), "{r}");
        }
    }
}

#[test]
fn report_on_identity_with_files() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("eye.mtx");
    fs::write(&m, "%%MatrixMarket matrix coordinate real general\n4 4 4\n1 1 1\n2 2 1\n3 3 1\n4 4 1\n").unwrap();
    let json_path = dir.path().join("r.json");
    let csv_path = dir.path().join("r.csv");
    let out = run(&[
        "report",
        "--matrix",
        m.to_str().unwrap(),
        "--json",
        json_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(result(&report, "spread_centered_norm")["bound"], 0.0);
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("name,"));
    assert_eq!(lines.count(), report["results"].as_array().unwrap().len());
}

#[test]
fn report_on_two_matrices() {
    let out = run(&[
        "report",
        "--matrix",
        &fixture("hermitian_4x4.mtx"),
        "--matrix-b",
        &fixture("hermitian_4x4_trace_mean.mtx"),
        "--bounds",
        "mirsky_pair,trace_complement_gap",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.iter().filter(|r| r["name"] == "mirsky_pair").count(), 6);
    assert_eq!(results.len(), 7);
    assert_ne!(report["matrix_a_digest"], report["matrix_b_digest"]);
}

#[test]
fn usage_errors_exit_one() {
    let a = fixture("example_3x3.mtx");
    for args in [
        vec!["report", "--matrix", a.as_str(), "--bounds", "no_such_bound"],
        vec!["report", "--matrix", "/nonexistent/file.mtx"],
        vec!["verify", "--ensemble", "wishart", "--n", "3", "--trials", "1", "--seed", "0"],
        vec!["verify", "--ensemble", "psd", "--n", "1", "--trials", "1", "--seed", "0"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mtx");
    fs::write(&bad, "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n").unwrap();
    assert_eq!(run(&["report", "--matrix", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn help_and_version_exit_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify"));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn verify_is_deterministic_across_threads() {
    let base = ["verify", "--ensemble", "circulant", "--n", "5", "--trials", "12", "--seed", "3"];
    let one = run(&[&base[..], &["--threads", "1"]].concat());
    let three = run(&[&base[..], &["--threads", "3"]].concat());
    let default = run(&base);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    assert_eq!(one.stdout, default.stdout);
    let summary = json(&one);
    assert_eq!(summary["total_violations"], 0);
    assert_eq!(summary["ensemble"]["trials"], 12);
    assert_eq!(summary["tolerance"], 1e-8);
}

#[test]
fn tolerance_comes_from_environment() {
    let out = bin()
        .args(["verify", "--ensemble", "psd", "--n", "3", "--trials", "2", "--seed", "1"])
        .env("SPECTRAL_BOUNDS_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["tolerance"], 1e-6);
}

#[test]
fn worked_example_text_and_json() {
    let out = run(&["paper-example"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("M - m >= 4.4721 <= 4.5000 <= 4.5616"), "{text}");

    let out = run(&["paper-example", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let ex = json(&out);
    assert_eq!(ex["pass"], true);
    assert_eq!(ex["square_matches"], true);
    assert_eq!(ex["square"][0], serde_json::json!([9.0, 9.0, 5.0]));
}

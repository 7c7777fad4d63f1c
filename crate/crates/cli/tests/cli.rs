//! End-to-end runs of the `adaptive-alpha` binary.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adaptive-alpha"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn anova_alpha_prints_published_value() {
    let out = run(&["alpha", "--anova", "-k", "2", "-r", "100"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("0.0060"), "{}", stdout(&out));
}

#[test]
fn json_output_round_trips_and_carries_provenance() {
    let v = json(&[
        "anova-alpha",
        "-k",
        "5",
        "-r",
        "50",
        "--strategy",
        "anchored",
        "--anchor-n",
        "200",
        "--format",
        "json",
    ]);
    let alpha = v["alpha_adaptive"].as_f64().unwrap();
    assert!((alpha - 0.0327).abs() < 5e-5, "{alpha}");
    assert_eq!(v["strategy"]["name"], "anchored");
    assert_eq!(v["strategy"]["alpha0"], 0.05);
    assert_eq!(v["strategy"]["anchor_n"], 200);
    let text = serde_json::to_string(&v).unwrap();
    let back: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(
        back["alpha_adaptive"].as_f64().unwrap().to_bits(),
        alpha.to_bits()
    );
}

#[test]
fn bic_alpha_matches_table() {
    let v = json(&["bic-alpha", "-n", "10", "--format", "json"]);
    let alpha = v["alpha_adaptive"].as_f64().unwrap();
    assert!((alpha - 0.0149).abs() < 5e-5, "{alpha}");
    assert_eq!(v["strategy"]["name"], "bic");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(
        run(&["alpha", "-n", "10", "-j", "2", "-q", "5", "--log-b", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["alpha", "-n", "10", "-j", "2", "-q", "1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&[
            "alpha",
            "--anova",
            "-k",
            "2",
            "-r",
            "10",
            "--strategy",
            "pbic"
        ])
        .status
        .code(),
        Some(1)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn computation_errors_exit_two_with_json_body() {
    let out = run(&[
        "alpha", "-n", "3", "-j", "3", "-q", "1", "--log-b", "1", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let body: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(body["error"]["code"], "degenerate_design");
    assert!(body["error"]["message"].as_str().unwrap().contains("n = 3"));
}

#[test]
fn tables_csv_has_parameter_header_and_stable_rows() {
    let a = run(&["tables", "--table", "2", "--format", "csv"]);
    let b = run(&["tables", "--table", "2", "--format", "csv"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,r,method,alpha_adaptive"));
    assert_eq!(
        lines.next().unwrap().split(',').take(3).collect::<Vec<_>>(),
        ["2", "4", "minimal"]
    );
    assert!(text.contains("2,100,pbic,requires-input"));
}

#[test]
fn simulation_is_identical_across_worker_counts() {
    let base = [
        "simulate-table3",
        "-r",
        "10,50",
        "-K",
        "200",
        "--outer-reps",
        "4",
        "--seed",
        "3",
        "--format",
        "json",
    ];
    let one = run(&[&base[..], &["--workers", "1"]].concat());
    let four = run(&[&base[..], &["--workers", "4"]].concat());
    assert!(
        one.status.success(),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    assert_eq!(one.stdout, four.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn regression_test_from_csv() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "y,x1,x2").unwrap();
    for i in 0..40 {
        let x1 = (i as f64 * 0.37).sin() * 3.0 + i as f64 * 0.1;
        let x2 = (i as f64 * 1.3).cos() * 2.0;
        let y = 1.0 + 0.5 * x1 + 0.8 * x2 + (i as f64 * 2.1).sin();
        writeln!(file, "{y},{x1},{x2}").unwrap();
    }
    file.flush().unwrap();
    let path = file.path().to_str().unwrap();
    let v = json(&[
        "test",
        "--csv",
        path,
        "--response",
        "y",
        "--null",
        "x1",
        "--alt",
        "x1,x2",
        "--format",
        "json",
    ]);
    let report = &v["report"];
    let t = report["T"].as_f64().unwrap();
    assert!(t > 0.0);
    let p = report["p_gamma"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(report["diagnostics"]["n"], 40);
    assert_eq!(report["diagnostics"]["q"], 1);
    assert!(v["regression"]["b"].as_f64().unwrap() > 0.0);

    let missing = run(&[
        "test",
        "--csv",
        path,
        "--response",
        "nope",
        "--null",
        "x1",
        "--alt",
        "x1,x2",
    ]);
    assert_ne!(missing.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("nope"));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("alpha.json");
    let out = run(&[
        "bic-alpha",
        "-n",
        "100",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert!((v["alpha_adaptive"].as_f64().unwrap() - 0.0040).abs() < 5e-5);
}

#[test]
fn mc_check_reports_both_distances() {
    let v = json(&[
        "mc-check", "-n", "50", "--draws", "5000", "--seed", "2", "--format", "json",
    ]);
    assert!(v["ks_gamma"].as_f64().unwrap() < 0.05);
    assert!(v["ks_exact"].as_f64().unwrap() < 0.05);
    assert_eq!(v["draws"], 5000);
}

use std::process::{Command, Output};

use serde_json::Value;

fn sosdw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sosdw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

fn close(a: (f64, f64), b: (f64, f64), tol: f64) -> bool {
    let d = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    d <= tol * (b.0.powi(2) + b.1.powi(2)).sqrt()
}

const POINT: [&str; 10] = [
    "--x", "0.1,0.2", "--y", "0.3,-0.1", "--lambda", "0.4", "--p", "0.1", "--gamma", "0.37",
];

#[test]
fn verify_passes_and_exits_zero() {
    let out = sosdw(&[
        "verify",
        "--suite",
        "states,limit-det",
        "--n-max",
        "3",
        "--format",
        "json",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = json(&out);
    assert_eq!(report["passed"], Value::Bool(true));
    assert_eq!(report["failed"], 0);
}

#[test]
fn failed_identity_exits_one() {
    let out = sosdw(&[
        "verify",
        "--suite",
        "theta-kernel",
        "--tolerance",
        "1e-300",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], Value::Bool(false));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        sosdw(&["evaluate", "--y", "1", "--lambda", "0"])
            .status
            .code(),
        Some(2)
    );
    let out = sosdw(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn reports_are_reproducible_without_timing() {
    let args = [
        "verify",
        "--suite",
        "agreement,recursion",
        "--trials",
        "5",
        "--seed",
        "9",
        "--format",
        "json",
        "--no-timing",
    ];
    let (a, b) = (sosdw(&args), sosdw(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("runtime_ms"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let args = [
        "verify",
        "--suite",
        "limit-det",
        "--format",
        "json",
        "--no-timing",
    ];
    let direct = sosdw(&args);
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    assert_eq!(sosdw(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn evaluators_agree_from_the_command_line() {
    let at = |method: &str| {
        let mut args = vec![
            "evaluate",
            "--method",
            method,
            "--eta",
            "0.2",
            "--no-timing",
        ];
        args.extend(POINT);
        let out = sosdw(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        complex(&json(&out)["value"])
    };
    let brute = at("brute");
    for method in ["weightfn", "ik", "ik-frobenius", "factored"] {
        assert!(close(at(method), brute, 1e-10), "{method}");
    }
}

#[test]
fn free_fermion_matches_state_sum_at_half() {
    let at = |method: &str| {
        let mut args = vec!["evaluate", "--method", method, "--eta", "0.5"];
        args.extend(POINT);
        complex(&json(&sosdw(&args))["value"])
    };
    assert!(close(at("freefermion"), at("brute"), 1e-9));
}

#[test]
fn tables_csv_header_and_first_rows() {
    let out = sosdw(&["tables", "--n-max", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,A_n,C_n,K_0,K_1,K_2,p_0,p_1,p_2");
    assert_eq!(lines[1], "1,1,2,2,2,0,1/2,1/2,0");
    assert_eq!(lines[2], "2,2,5,5,8,5,5/18,4/9,5/18");
}

#[test]
fn states_are_json_lines() {
    let out = sosdw(&["states", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<Value> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 7);
    assert!(rows
        .iter()
        .all(|r| r["heights"][0] == serde_json::json!([0, 1, 2, 3])));
}

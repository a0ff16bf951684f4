use std::process::{Command, Output};

use serde_json::Value;

fn loopforms(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_loopforms"));
    cmd.args(args).env_remove("LOOPFORMS_SEED");
    if let Some(seed) = seed_env {
        cmd.env("LOOPFORMS_SEED", seed);
    }
    cmd.output().expect("binary runs")
}

fn json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).expect("json report on stdout")
}

#[test]
fn passing_run_exits_zero() {
    let out = loopforms(&["verify", "--suite", "lie", "--format", "json"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn failing_check_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"suite": "loops", "tolerances": {"loops.holonomy_round_trip": 0.0}}"#).unwrap();
    let out = loopforms(&["verify", "--config", config.to_str().unwrap(), "--format", "csv"], None);
    assert_eq!(out.status.code(), Some(1));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("loops.holonomy_round_trip,") && l.contains(",false,")));
}

#[test]
fn configuration_errors_exit_two_without_a_report() {
    let out = loopforms(&["verify", "--suite", "lie", "--samples", "2"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 4"));
    assert_eq!(loopforms(&["verify", "--suite", "everything"], None).status.code(), Some(2));
}

#[test]
fn seed_precedence() {
    let seed_of = |out: Output| json(&out)["seed"].as_u64().unwrap();
    assert_eq!(seed_of(loopforms(&["verify", "--suite", "lie", "--format", "json"], Some("31"))), 31);
    assert_eq!(seed_of(loopforms(&["verify", "--suite", "lie", "--format", "json", "--seed", "8"], Some("31"))), 8);
    assert_eq!(loopforms(&["verify", "--suite", "lie"], Some("not a number")).status.code(), Some(2));
}

#[test]
fn report_goes_to_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = loopforms(&["verify", "--suite", "forms", "--format", "json", "--out", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(report["config"]["suite"], "forms");
}

#[test]
fn coefficient_table_command() {
    let out = loopforms(&["table", "coefficients", "--kmax", "2"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "k,lhs,rhs,equal\n1,1,1,true\n2,1/3,1/3,true\n");
    assert_eq!(loopforms(&["table", "coefficients", "--kmax", "0"], None).status.code(), Some(2));
}

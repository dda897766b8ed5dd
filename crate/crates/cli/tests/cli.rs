use std::path::Path;
use std::process::{Command, Output};

fn cesorl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cesorl")).args(args).env_remove("CESORL_SEED").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn cesaro_norm_of_unit_indicator() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", r#"{"domain": "halfline", "pieces": [[0, 1, 1]]}"#);
    let o = cesorl(&["norm", "--phi", "power:2", "--f", &f, "--space", "cesaro"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1.414214");

    let bare = write(dir.path(), "g.json", "[[0, 1, 1]]");
    let o = cesorl(&["norm", "--phi", "power:2", "--f", &bare, "--space", "plain"]);
    assert_eq!(stdout(&o).trim(), "1.000000");
}

#[test]
fn modular_reports_infinity_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "f.json", "[[0, 1, 2]]");
    let o = cesorl(&["modular", "--phi", "capped_inf:1", "--f", &f, "--space", "plain"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("inf"), "{}", stdout(&o));
}

#[test]
fn delta2_power_holds_with_constant_four() {
    let o = cesorl(&["delta2", "--phi", "power:2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Holds, K=4"), "{}", stdout(&o));

    let o = cesorl(&["delta2", "--phi", "exp_gap", "--domain", "unit"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Fails"));
}

#[test]
fn delta2_writes_ratio_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ratio.csv");
    let o = cesorl(&["--csv", csv.to_str().unwrap(), "delta2", "--phi", "power:3"]);
    assert_eq!(o.status.code(), Some(0));
    let body = std::fs::read_to_string(csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(lines.next(), Some("u,ratio"));
    for l in lines {
        let r: f64 = l.split(',').nth(1).unwrap().parse().unwrap();
        assert!((r - 8.0).abs() < 1e-9);
    }
}

#[test]
fn witness_report_verifies_and_tampering_is_caught() {
    let dir = tempfile::tempdir().unwrap();
    let o = cesorl(&["--json", "witness", "--theorem", "7", "--phi", "capped_inf:1", "--truncation", "30"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["kind"]["kind"], "oc_failure");
    let path = write(dir.path(), "w.json", &stdout(&o));
    let o = cesorl(&["verify", &path]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));

    let mut bad = report.clone();
    let pieces = bad["elements"][0]["function"]["pieces"].as_array_mut().unwrap();
    pieces[0][2] = serde_json::json!(pieces[0][2].as_f64().unwrap() * 0.5);
    let path = write(dir.path(), "bad.json", &bad.to_string());
    let o = cesorl(&["verify", &path]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn mismatched_case_is_an_error() {
    let o = cesorl(&["witness", "--theorem", "7", "--phi", "capped_inf:1", "--case", "I(1)"]);
    assert_eq!(o.status.code(), Some(0));
    let o = cesorl(&["witness", "--theorem", "7", "--phi", "capped_inf:1", "--case", "II(3)"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("I(1)"));
}

#[test]
fn strict_monotonicity_witness() {
    let o = cesorl(&["witness", "--theorem", "10", "--phi", "shifted:1,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("SMFailure"));
    let o = cesorl(&["witness", "--theorem", "10", "--phi", "power:2"]);
    assert!(stdout(&o).starts_with("NoWitnessFound"));
}

#[test]
fn inconclusive_embedding_exits_two() {
    let o = cesorl(&["suite", "--name", "embedding", "--phi", "power:2", "--psi", "power:3", "--domain", "unit", "--corpus-size", "8"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = cesorl(&["suite", "--name", "embedding", "--phi", "power:3", "--psi", "power:2", "--domain", "unit", "--corpus-size", "8"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Embedded"));
}

#[test]
fn order_continuity_table_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t7.csv");
    let o = cesorl(&["--csv", csv.to_str().unwrap(), "suite", "--name", "theorem7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stdout(&o).contains("INCONSISTENT"));
    assert_eq!(std::fs::read_to_string(csv).unwrap().lines().count(), 8);
}

#[test]
fn order_continuity_row_without_hypothesis_needs_override() {
    let o = cesorl(&["suite", "--name", "theorem7", "--phi", "capped_inf:1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = cesorl(&["suite", "--name", "theorem7", "--phi", "capped_inf:1", "--allow-override"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn config_supplies_phi_and_domain() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"phi": {"family": "power", "params": [2.0]}, "domain": "unit"}"#);
    let o = cesorl(&["--config", &cfg, "nontrivial"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("nontrivial"));
}

#[test]
fn malformed_config_names_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", "{\n  \"seed\": 1,\n  \"sed\": 3\n}");
    let o = cesorl(&["--config", &cfg, "delta2", "--phi", "power:2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("sed"), "{err}");
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(cesorl(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cesorl(&["norm"]).status.code(), Some(1));
    assert_eq!(cesorl(&["--help"]).status.code(), Some(0));
    assert_eq!(cesorl(&["delta2"]).status.code(), Some(1));
    assert_eq!(cesorl(&["delta2", "--phi", "nosuch:1"]).status.code(), Some(1));
}

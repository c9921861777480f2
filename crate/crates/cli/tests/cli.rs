use std::process::{Command, Output};

use logdamp_core::report::ExperimentReport;

fn logdamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logdamp")).args(args).output().expect("binary runs")
}

fn report_of(out: &Output) -> ExperimentReport {
    ExperimentReport::from_json(&String::from_utf8_lossy(&out.stdout)).expect("json report on stdout")
}

#[test]
fn free_group_counterexample_passes() {
    let out = logdamp(&["counterexample", "--family", "free_group", "--d", "2", "--t", "a1", "--gamma", "a1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report_of(&out);
    let pairing = r.checks.iter().find(|c| c.name == "pairing").unwrap();
    assert_eq!(pairing.computed, -1.0);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("PASS counterexample"));
}

#[test]
fn zero_pairing_exits_one() {
    let out = logdamp(&["counterexample", "--family", "free_group", "--gamma", "a2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[family]\nd = 3\nchain = \"a1:a1\"\n\n[grid]\ns = [3.0]\n").unwrap();
    let out = logdamp(&["heat-oracle", "--config", cfg.to_str().unwrap(), "--d", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report_of(&out);
    assert_eq!(r.config["family"]["d"], 2);
    assert_eq!(r.config["family"]["chain"], "a1:a1");
    assert_eq!(r.checks.len(), 2);
}

#[test]
fn unknown_key_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[grid]\nalpha_eps = [0.3]\n").unwrap();
    let out = logdamp(&["heat-oracle", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha_eps"));
}

#[test]
fn misspelled_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.toml");
    std::fs::write(&cfg, "[family]\ndd = 2\n").unwrap();
    let out = logdamp(&["heat-oracle", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_has_one_row_per_check() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let args = ["damp-sweep", "--M", "32"];
    let a = logdamp(&[&args[..], &["--out", csv.to_str().unwrap(), "--format", "csv"]].concat());
    let b = logdamp(&[&args[..], &["--out", json.to_str().unwrap()]].concat());
    assert_eq!(a.status.code(), b.status.code());
    assert!(a.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let r = ExperimentReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(text.lines().next(), Some("name,computed,expected,tol,pass"));
    assert_eq!(text.lines().count(), r.checks.len() + 1);
}

#[test]
fn reports_are_deterministic() {
    let args = ["pole-audit", "--d", "2", "--chain", "a1:a1,a2:"];
    let mut a = report_of(&logdamp(&args));
    let mut b = report_of(&logdamp(&args));
    a.wall_clock_seconds = 0.0;
    b.wall_clock_seconds = 0.0;
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
}

#[test]
fn pole_audit_lists_base_points() {
    let out = logdamp(&["pole-audit", "--d", "2", "--chain", "a1:a1"]);
    let r = report_of(&out);
    let poles = r.details["poles"].as_array().unwrap();
    assert!(!poles.is_empty());
    assert!(poles.iter().any(|p| p["variant"] == "heat" && p["order"] == 1));
    let base_ok = r.checks.iter().filter(|c| c.name.contains("base points")).all(|c| c.pass);
    assert!(base_ok);
}

#[test]
fn pv_order_takes_a_single_s() {
    let out = logdamp(&["pv-order", "--s", "1,0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ou-brunn");
const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");

fn run(args: &[&str], out: &Path) -> Output {
    Command::new(BIN).args(args).arg("--out").arg(out).output().expect("binary runs")
}

#[test]
fn quick_config_passes_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{CONFIGS}/quick.toml");
    let out = run(&["suite", "--config", &cfg, "--jobs", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "suite");
    assert_eq!(report["seed"], 7);
    let cases = report["cases"].as_array().unwrap();
    let csv = fs::read_to_string(dir.path().join("cases.csv")).unwrap();
    assert_eq!(csv.lines().count(), cases.len() + 1);
    assert!(dir.path().join("eigenfunction_disk.csv").exists());
    let iv = fs::read_to_string(dir.path().join("eigenfunction_iv.csv")).unwrap();
    assert_eq!(iv.lines().next(), Some("x,u"));
}

#[test]
fn single_experiment_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{CONFIGS}/quick.toml");
    let out = run(&["matrix-lemma", "--config", &cfg, "--seed", "99"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "matrix-lemma");
    assert_eq!(report["seed"], 99);
    assert!(report["cases"].as_array().unwrap().iter().all(|c| c["experiment"] == "matrix-lemma"));
}

#[test]
fn failed_assertion_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("gap.toml");
    // a gap demand no resolution can meet
    fs::write(&cfg, "[solver]\nh-1d = [0.04, 0.02, 0.01]\n[equality-probe]\npairs = [[\"interval{-1,1}\", \"interval{-2,2}\"]]\ngap-factor = 1e9\n").unwrap();
    let out = run(&["equality-probe", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join("out/report.json").exists());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[bm-sweep]\npairs = [[\"ball{1}\", \"interval{-1,1}\"]]\nt = [0.5]\n").unwrap();
    assert_eq!(run(&["bm-sweep", "--config", bad.to_str().unwrap()], dir.path()).status.code(), Some(2));
    let missing = format!("{CONFIGS}/logconc.toml");
    assert_eq!(run(&["urysohn", "--config", &missing], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["suite", "--config", "/nonexistent.toml"], dir.path()).status.code(), Some(2));
}

#[test]
fn one_off_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["eigen", "--body", "interval{-1,1}", "--h", "0.01"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 2.0).abs() < 1e-3);
    assert!(dir.path().join("eigenfunction_body.csv").exists());
    let bad = run(&["eigen", "--body", "interval{1,0}", "--h", "0.01"], dir.path());
    assert_eq!(bad.status.code(), Some(2));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const MINIMAL: &str = r#"
run_id = "q"
energy = "quadratic"
initial = "constant(1)"
[flow]
tau = 1e-3
t_end = 5
"#;

fn sgflow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sgflow"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("spec.toml");
    fs::write(&path, text).unwrap();
    path
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn minimal_run_writes_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    write_spec(tmp.path(), MINIMAL);
    let out = sgflow(tmp.path(), &["run", "spec.toml"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let run = tmp.path().join("runs/q");
    let traj = fs::read_to_string(run.join("traj.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next(), Some("t,energy,slope,step_norm,cum_length,H,defect"));
    assert_eq!(lines.count(), 5001);
    let report: Value = serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    let theta = report["kl"]["theta"].as_f64().unwrap();
    assert!((theta - 0.5).abs() < 0.02, "{theta}");
    assert!(run.join("state_0.csv").exists() && run.join("state_5000.csv").exists());
}

#[test]
fn manifest_lists_every_default() {
    let tmp = tempfile::tempdir().unwrap();
    write_spec(tmp.path(), MINIMAL);
    assert_eq!(sgflow(tmp.path(), &["run", "spec.toml"]).status.code(), Some(0));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("runs/q/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["prng"].as_str().unwrap().contains("ChaCha8"));
    let spec = &manifest["spec"];
    assert_eq!(spec["energy"], "quadratic(33)");
    for key in ["run_id", "output_dir", "seed", "energy", "initial", "flow", "analysis"] {
        assert!(spec.get(key).is_some(), "{key}");
    }
    for key in ["tau", "t_end", "prox_tol", "slope_tol", "record_every", "certify", "snapshot_every", "forcing"] {
        assert!(spec["flow"].get(key).is_some(), "flow.{key}");
    }
    assert_eq!(spec["flow"]["record_every"], 1);
    for key in [
        "kl_fit",
        "omega",
        "length",
        "chain_rule",
        "kls_check",
        "tail_fraction",
        "converge_threshold",
        "slope_threshold",
        "chain_rule_points",
    ] {
        assert!(spec["analysis"].get(key).is_some(), "analysis.{key}");
    }
}

#[test]
fn step_bound_violation_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write_spec(tmp.path(), &MINIMAL.replace("quadratic", "semilinear(17)").replace("1e-3", "0.05"));
    let out = sgflow(tmp.path(), &["run", "spec.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("1/(2*omega)"), "{}", stderr(&out));
    assert!(!tmp.path().join("runs").exists());
}

#[test]
fn unknown_field_exits_2_with_location() {
    let tmp = tempfile::tempdir().unwrap();
    write_spec(tmp.path(), &MINIMAL.replace("t_end = 5", "t_end = 5\ntua = 1"));
    let out = sgflow(tmp.path(), &["run", "spec.toml"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("tua") && err.contains("line"), "{err}");
}

#[test]
fn missing_spec_file_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(sgflow(tmp.path(), &["run", "nope.toml"]).status.code(), Some(2));
}

#[test]
fn runtime_failure_keeps_partial_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    // the first forced step overflows the energy
    let spec = MINIMAL.replace("t_end = 5", "t_end = 0.1\n[flow.forcing]\nprofile = \"constant(1e300)\"\nt_start = 0\nt_stop = 1");
    write_spec(tmp.path(), &spec);
    let out = sgflow(tmp.path(), &["run", "spec.toml"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let run = tmp.path().join("runs/q");
    let log = fs::read_to_string(run.join("error.log")).unwrap();
    assert!(log.contains("step"), "{log}");
    assert!(run.join("traj.csv").exists() && run.join("manifest.json").exists());
    assert!(!run.join("report.json").exists());
}

#[test]
fn verify_unknown_suite_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(sgflow(tmp.path(), &["verify", "everything"]).status.code(), Some(2));
}

#[test]
fn verify_metric_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = sgflow(tmp.path(), &["verify", "metric"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 7, "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn sweep_empty_values_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    write_spec(tmp.path(), MINIMAL);
    let out = sgflow(tmp.path(), &["sweep", "spec.toml", "--param", "tau", "--values", ""]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_rejects_bad_value_before_running() {
    let tmp = tempfile::tempdir().unwrap();
    write_spec(tmp.path(), &MINIMAL.replace("quadratic", "semilinear(17)"));
    let out = sgflow(tmp.path(), &["sweep", "spec.toml", "--param", "tau", "--values", "1e-3,0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!tmp.path().join("runs").exists());
}

fn sweep_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_tau_shows_first_order_error() {
    let tmp = tempfile::tempdir().unwrap();
    write_spec(tmp.path(), &MINIMAL.replace("t_end = 5", "t_end = 1"));
    let out = sgflow(
        tmp.path(),
        &["sweep", "spec.toml", "--param", "tau", "--values", "1e-2,5e-3,2.5e-3", "--jobs", "2"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("runs/q/sweep.csv")).unwrap();
    assert!(csv.starts_with("value,run_id,status,theta,c,total_length,converged,final_energy,exact_error\n"));
    let errors: Vec<f64> = sweep_rows(&csv).iter().map(|r| r[8].parse().unwrap()).collect();
    for w in errors.windows(2) {
        assert!((1.8..=2.2).contains(&(w[0] / w[1])), "{errors:?}");
    }
}

#[test]
fn sweep_p_recovers_exponents() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = MINIMAL
        .replace("\"quadratic\"", "\"power(2)\"")
        .replace("t_end = 5", "t_end = 200\nrecord_every = 10");
    write_spec(tmp.path(), &spec);
    let out = sgflow(tmp.path(), &["sweep", "spec.toml", "--param", "p", "--values", "2,3,4,6"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = fs::read_to_string(tmp.path().join("runs/q/sweep.csv")).unwrap();
    for row in sweep_rows(&csv) {
        let p: f64 = row[0].parse().unwrap();
        let theta: f64 = row[3].parse().unwrap();
        assert!((theta - (p - 1.0) / p).abs() <= 0.02, "p = {p}: theta = {theta}");
    }
}

#[test]
fn seed_override_changes_random_data() {
    let tmp = tempfile::tempdir().unwrap();
    write_spec(
        tmp.path(),
        &MINIMAL.replace("constant(1)", "random(-1, 1)").replace("t_end = 5", "t_end = 0.01"),
    );
    let read = |dir: &str| fs::read(tmp.path().join(dir).join("q/state_0.csv")).unwrap();
    for (dir, seed) in [("a", "1"), ("b", "1"), ("c", "2")] {
        let out = sgflow(tmp.path(), &["run", "spec.toml", "--output-dir", dir, "--seed-override", seed]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
    let manifest: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("c/q/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 2);
}

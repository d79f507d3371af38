use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_thetahat"))
}

fn manifest(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../manifests").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad report ({e}): {}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn task(v: &Value, i: usize) -> &Value {
    &v["tasks"][i]
}

#[test]
fn verify_closed_n4_k2() {
    let out = run(&["verify-closed", "--n", "4", "--k", "2"]);
    assert!(out.status.success());
    let v = report(&out);
    let t = task(&v, 0);
    assert_eq!(t["closed"], true);
    assert_eq!(t["status"], "pass");
    assert!(t["term_count"].as_u64().unwrap() >= 1);
    assert!(t["wall_time"].as_str().unwrap().parse::<f64>().unwrap() >= 0.0);
}

#[test]
fn transition_check_quadratic_map() {
    let path = manifest("quadratic_transition.thm");
    let out = run(&["transition-check", "--manifest", path.to_str().unwrap()]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(task(&v, 0)["theta_residual"], "0");
    assert_eq!(task(&v, 0)["Theta_residual"], "0");
}

#[test]
fn integrate_flat_torus() {
    let out = run(&["integrate", "--fixture", "flat_t4", "--k", "2", "--grid", "16"]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(task(&v, 0)["value_re"], "0");
    assert_eq!(task(&v, 0)["value_im"], "0");
    assert!(task(&v, 0)["runtime_s"].is_string());
}

#[test]
fn pullback_of_a_given_form() {
    let path = manifest("quadratic_transition.thm");
    let out = run(&[
        "pullback",
        "--manifest",
        path.to_str().unwrap(),
        "--form",
        "dG[1][2][2]^dx2",
        "--no-timings",
    ]);
    assert!(out.status.success());
    assert_eq!(task(&report(&out), 0)["result"], "(1)*dx1^dx2");
}

#[test]
fn report_runs_manifest_tasks() {
    let path = manifest("quadratic_transition.thm");
    let out = run(&["report", "--manifest", path.to_str().unwrap(), "--no-timings"]);
    assert!(out.status.success());
    let v = report(&out);
    assert_eq!(v["success"], true);
    assert_eq!(v["tasks"].as_array().unwrap().len(), 4);
    assert_eq!(task(&v, 2)["result"], "(-I*x2*pi^-1)*dx1^dx2");
}

#[test]
fn reports_are_byte_identical_across_runs_and_threads() {
    let args = [
        "integrate",
        "--fixture",
        "perturbed_t4",
        "--k",
        "2",
        "--grid",
        "16",
        "--seed",
        "5",
        "--no-timings",
    ];
    let outputs: Vec<Vec<u8>> = ["1", "3", "1"]
        .iter()
        .map(|t| bin().args(args).env("THETAHAT_THREADS", t).output().unwrap().stdout)
        .collect();
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0], outputs[2]);
}

#[test]
fn failing_check_exits_nonzero_with_partial_report() {
    let out = run(&[
        "integrate",
        "--fixture",
        "fubini_study_cp2",
        "--k",
        "2",
        "--grid",
        "8",
        "--tol",
        "1e-12",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    assert_eq!(task(&v, 0)["status"], "fail");
    assert!(task(&v, 0)["value_re"].is_string());
}

#[test]
fn task_errors_are_reported() {
    let out = run(&["integrate", "--fixture", "klein_bottle", "--k", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v = report(&out);
    assert_eq!(task(&v, 0)["status"], "error");
    assert!(task(&v, 0)["message"].as_str().unwrap().contains("klein_bottle"));
}

#[test]
fn malformed_manifest_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.thm");
    std::fs::write(&path, "[chart]\nn = 2\n[connection]\nGamma[1][1][2] = x1 +* x2\n").unwrap();
    let out = run(&["report", "--manifest", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.thm:4:22"), "{err}");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = run(&["verify-closed", "--n", "2", "--k", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["tasks"][0]["closed"], true);
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = bin()
        .args(["verify-closed", "--n", "2", "--k", "1"])
        .env("THETAHAT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

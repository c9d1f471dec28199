//! Exit-code contract and report-shape checks for the job runner.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, job_body: &str) -> Output {
    let job = dir.join("job.json");
    fs::write(&job, job_body).unwrap();
    Command::new(env!("CARGO_BIN_EXE_ultraweights"))
        .arg("--job")
        .arg(&job)
        .arg("--out-dir")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

#[test]
fn malformed_json_exits_1_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "{\"command\": \"check\",\n  \"m\": [broken");
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "stderr: {err}");
    assert!(err.contains("column"), "stderr: {err}");
}

#[test]
fn unknown_command_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), r#"{"command":"frobnicate","output":{"path":"x.json"}}"#);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_engine_field_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // Moment engine without sigma: schema-valid JSON, semantically incomplete.
    let out = run(
        dir.path(),
        r#"{"command":"propagate","engine":"moment","k":{"step":2,"count":16},
            "m":{"kind":"gevrey","s":1.0,"K":64},"output":{"path":"x.json"}}"#,
    );
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sigma"), "stderr: {err}");
}

#[test]
fn unbounded_ratio_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // k_j = 2^(2^j) on a Gevrey weight: the lacunary root ratio is unbounded,
    // so propagation must refuse with a hypothesis failure.
    let out = run(
        dir.path(),
        r#"{"command":"propagate","engine":"global","k":[0,4,16,256,65536],
            "m":{"kind":"gevrey","s":2.0,"K":65536},"output":{"path":"x.json"}}"#,
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("hypothesis failure"), "stderr: {err}");
}

#[test]
fn failing_verdict_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    // gevrey(1) has j/m_j = 1: bounded but not vanishing, so the Beurling
    // checklist fails while the report file is still written.
    let out = run(
        dir.path(),
        r#"{"command":"check","m":{"kind":"gevrey","s":1.0,"K":128},
            "base":{"step":2,"count":33},"setting":"e_lp_beurling",
            "output":{"path":"check.json"}}"#,
    );
    assert_eq!(out.status.code(), Some(2));
    let body = fs::read_to_string(dir.path().join("out/check.json")).unwrap();
    assert!(body.contains("\"verdict\": \"fails\""), "report: {body}");
}

#[test]
fn passing_jobs_exit_0_and_write_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        dir.path(),
        r#"{"command":"conjugate","omega":{"kind":"linear"},"rho":1.0,"K":64,
            "sigma":2.0,"output":{"path":"conj.json"}}"#,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body = fs::read_to_string(dir.path().join("out/conj.json")).unwrap();
    assert!(body.contains("\"absorption\""), "report: {body}");

    let out = run(
        dir.path(),
        r#"{"command":"propagate","engine":"interval_cg","k":{"step":2,"count":16},
            "m":{"kind":"factorial_power","s":1.0,"K":64},"c":2.0,
            "interval_len":2.0,"output":{"path":"cg.json"}}"#,
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body = fs::read_to_string(dir.path().join("out/cg.json")).unwrap();
    assert!(body.contains("\"regime\": \"interval_cg\""), "report: {body}");
}

#[test]
fn seed_check_exits_0() {
    let out = Command::new(env!("CARGO_BIN_EXE_ultraweights")).arg("--seed-check").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().filter(|l| l.ends_with("PASS")).count() >= 5, "{text}");
}

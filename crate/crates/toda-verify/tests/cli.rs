use std::path::Path;
use std::process::{Command, Output};

fn tool(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_toda-verify"));
    c.args(args);
    // keep the caller's environment from leaking into the flags
    for (k, _) in std::env::vars() {
        if k.starts_with("TODA_VERIFY_") {
            c.env_remove(k);
        }
    }
    c
}

fn exit(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn run(args: &[&str]) -> Output {
    tool(args).output().unwrap()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(exit(&run(&["--help"])), 0);
    assert_eq!(exit(&run(&["--version"])), 0);
    assert_eq!(exit(&run(&["verify", "--help"])), 0);
}

#[test]
fn exact_passes_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = run(&["verify", "exact", "--samples", "100", "--seed", "7", "--json", json.to_str().unwrap()]);
    assert_eq!(exit(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("exact.toda_residual"));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v["suites"][0]["checks"].as_array().unwrap().len() >= 8);
    assert_eq!(v["config"]["samples"], 100);
}

#[test]
fn check_failure_has_its_own_code() {
    let o = run(&["verify", "exact", "--samples", "20", "--tol", "toda=1e-300", "--quiet"]);
    assert_eq!(exit(&o), 2);
    assert!(o.stdout.is_empty());
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let j = json.to_str().unwrap();
    let cases: &[&[&str]] = &[
        &["verify", "fourier", "--suite", "fourier", "--samples", "0", "--json", j],
        &["verify"],
        &["verify", "kernel"],
        &["verify", "exact", "--suite", "linearized"],
        &["verify", "exact", "--tol", "toda"],
        &["verify", "exact", "--tol", "nosuch=1"],
        &["verify", "exact", "--n-range", "3:1"],
        &["verify", "exact", "--samples", "-4"],
        &["kernel", "--refine", "1"],
        &["frobnicate"],
        &[],
    ];
    for args in cases {
        let o = run(args);
        assert_eq!(exit(&o), 64, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert!(!Path::new(&json).exists());
}

#[test]
fn environment_mirrors_flags() {
    let o = tool(&["verify", "exact"]).env("TODA_VERIFY_SAMPLES", "0").output().unwrap();
    assert_eq!(exit(&o), 64);
    let o = tool(&["verify", "exact", "--quiet"])
        .env("TODA_VERIFY_SAMPLES", "10")
        .env("TODA_VERIFY_TOL", "toda=1e-300,bilinear=1e-3")
        .output()
        .unwrap();
    assert_eq!(exit(&o), 2);
    let o = tool(&["verify", "exact", "--quiet", "--n-range", "-1:1"])
        .env("TODA_VERIFY_SAMPLES", "10")
        .output()
        .unwrap();
    assert_eq!(exit(&o), 0);
}

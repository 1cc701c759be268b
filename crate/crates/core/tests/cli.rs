//! End-to-end runs of the `gausstomo` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn gausstomo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gausstomo"))
        .args(args)
        .env_remove("TOMO_QUAD_RTOL")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn photon_dist_json_echoes_config() {
    let out = gausstomo(&["photon-dist", "--sigma-pp", "1.5", "--sigma-qq", "1.5", "--nmax", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let probs: Vec<f64> = serde_json::from_value(v["probs"].clone()).unwrap();
    for (n, p) in probs.iter().enumerate() {
        let want = 1f64.powi(n as i32) / 2f64.powi(n as i32 + 1);
        assert!((p - want).abs() < 1e-12);
    }
    assert_eq!(v["meta"]["config"]["command"]["photon-dist"]["nmax"], 4);
    assert!(v["meta"]["corrections"].is_object());
}

#[test]
fn state_file_and_inline_state_conflict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.json");
    std::fs::write(&path, r#"{"mean_q":0,"mean_p":0,"sigma_pp":0.5,"sigma_qq":0.5,"sigma_pq":0}"#).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(gausstomo(&["pnt", "--state", p, "--alpha-re", "1"]).status.code(), Some(0));
    assert_eq!(gausstomo(&["pnt", "--state", p, "--mean-q", "1"]).status.code(), Some(64));
}

#[test]
fn unphysical_state_is_domain_error() {
    let out = gausstomo(&["photon-dist", "--sigma-pp", "0.1", "--sigma-qq", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("uncertainty"));
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(gausstomo(&[]).status.code(), Some(64));
    assert_eq!(gausstomo(&["verify", "--identity", "p7"]).status.code(), Some(64));
    assert_eq!(gausstomo(&["simulate", "--nsamples", "many"]).status.code(), Some(64));
    let out = Command::new(env!("CARGO_BIN_EXE_gausstomo"))
        .args(["verify", "--identity", "p9"])
        .env("TOMO_QUAD_RTOL", "tight")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn verify_identities_pass() {
    for args in [
        vec!["verify", "--identity", "p9"],
        vec!["verify", "--identity", "p14", "--m", "2", "--n", "3", "--gamma", "0.7"],
        vec!["verify", "--identity", "roundtrip", "--sigma-pp", "1.0", "--sigma-qq", "0.4", "--sigma-pq", "0.2"],
        vec!["verify", "--identity", "transform", "--mean-q", "1", "--alpha-im", "0.5"],
    ] {
        let out = gausstomo(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", stderr(&out));
        assert!(json(&out)["abs_err"].as_f64().unwrap() < 1e-6);
    }
}

#[test]
fn failed_verification_is_numerical_failure() {
    let out = gausstomo(&["verify", "--identity", "transform", "--sigma-pp", "2", "--tolerance", "1e-300"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optical_table_round_trips_through_transform() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.csv");
    let state = ["--sigma-pp", "0.9", "--sigma-qq", "0.6", "--sigma-pq", "0.1", "--mean-p", "0.5"];
    let mut args = vec!["optical", "--n-angles", "48", "--x-points", "401", "--x-min", "-8", "--x-max", "8"];
    args.extend(state);
    args.extend(["--format", "csv", "--output", table.to_str().unwrap()]);
    let out = gausstomo(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(std::fs::read_to_string(&table).unwrap().starts_with('#'));

    let out = gausstomo(&["transform", "optical-to-pnt", "--input", table.to_str().unwrap(), "--nmax", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let got: Vec<f64> = serde_json::from_value(json(&out)["probs"].clone()).unwrap();

    let mut args = vec!["pnt", "--nmax", "4"];
    args.extend(state);
    let want: Vec<f64> = serde_json::from_value(json(&gausstomo(&args))["probs"].clone()).unwrap();
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-3, "{got:?} vs {want:?}");
    }
}

#[test]
fn malformed_table_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "theta,x,w\n0,0,0.5\n0,abc,0.1\n").unwrap();
    let out = gausstomo(&["transform", "optical-to-pnt", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr(&out).contains(":3"), "{}", stderr(&out));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--nsamples", "20000", "--seed", "5", "--n-angles", "16", "--x-bins", "60", "--nmax", "2"];
    let (a, b) = (json(&gausstomo(&args)), json(&gausstomo(&args)));
    assert_eq!(a["estimated"], b["estimated"]);
    assert_eq!(a["rng"], "ChaCha8");
}

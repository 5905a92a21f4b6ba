//! End-to-end tests of the `levycov` binary: exit codes, file outputs,
//! determinism, and the seed-override rule.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn levycov(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levycov"))
        .args(args)
        .env_remove("LEVYCOV_THREADS")
        .output()
        .expect("failed to spawn levycov")
}

fn write(path: &Path, contents: &str) {
    fs::write(path, contents).unwrap();
}

const BROWNIAN_MODEL: &str = r#""brownian": {"sigma1": 1.4142135623730951, "sigma2": 1.0, "rho": 0.7071067811865475}"#;

fn simulate_config(seed: u64, with_jumps: bool) -> String {
    let jumps = if with_jumps {
        r#", "jumps": {"r1": 0.5, "r2": 0.8, "c1": 1.0, "c2": 1.0, "gamma": 0.3, "symmetric": true}"#
    } else {
        ""
    };
    format!(r#"{{"model": {{{BROWNIAN_MODEL}{jumps}}}, "n": 64, "seed": {seed}}}"#)
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.json");
    write(&config, &simulate_config(7, true));

    for out in ["a", "b"] {
        let out_dir = dir.path().join(out);
        let status = levycov(&[
            "simulate",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(status.status.success(), "stderr: {}", String::from_utf8_lossy(&status.stderr));
    }
    for name in ["increments.csv", "jump_log.csv"] {
        let a = fs::read(dir.path().join("a").join(name)).unwrap();
        let b = fs::read(dir.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }

    // a different seed must change the data
    let out_c = dir.path().join("c");
    levycov(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_c.to_str().unwrap(),
        "--seed",
        "8",
    ]);
    let a = fs::read(dir.path().join("a/increments.csv")).unwrap();
    let c = fs::read(out_c.join("increments.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn cli_seed_override_wins_and_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let config_s1 = dir.path().join("s1.json");
    let config_s7 = dir.path().join("s7.json");
    write(&config_s1, &simulate_config(1, false));
    write(&config_s7, &simulate_config(7, false));

    let overridden = dir.path().join("overridden");
    let native = dir.path().join("native");
    levycov(&[
        "simulate",
        "--config",
        config_s1.to_str().unwrap(),
        "--out",
        overridden.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    levycov(&[
        "simulate",
        "--config",
        config_s7.to_str().unwrap(),
        "--out",
        native.to_str().unwrap(),
    ]);
    assert_eq!(
        fs::read(overridden.join("increments.csv")).unwrap(),
        fs::read(native.join("increments.csv")).unwrap()
    );
    let echo: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(overridden.join("simulate.json")).unwrap())
            .unwrap();
    assert_eq!(echo["seed"], 7);
}

#[test]
fn estimate_all_zeros_is_zero_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let increments = dir.path().join("increments.csv");
    let mut csv = String::from("j,dx1,dx2\n");
    for j in 1..=16 {
        csv.push_str(&format!("{j},0.0,0.0\n"));
    }
    write(&increments, &csv);
    let config = dir.path().join("est.json");
    write(&config, r#"{"estimator": "spectral", "M": 4.229, "r": 0.5}"#);

    let out_dir = dir.path().join("out");
    let output = levycov(&[
        "estimate",
        "--config",
        config.to_str().unwrap(),
        "--input",
        increments.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("estimate.json")).unwrap()).unwrap();
    assert_eq!(result["value"], 0.0);
    assert_eq!(result["valid"], true);
    assert_eq!(result["n"], 16);
}

#[test]
fn benchmark_writes_report_and_raw() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("plan.json");
    write(
        &config,
        &format!(
            r#"{{
                "model": {{{BROWNIAN_MODEL}}},
                "estimators": [
                    {{"estimator": "spectral", "M": 4.229, "r": 0.5}},
                    {{"estimator": "rc"}}
                ],
                "n_grid": [64, 128],
                "replications": 10,
                "master_seed": 3
            }}"#
        ),
    );
    let out_dir = dir.path().join("out");
    let output = levycov(&[
        "benchmark",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--emit-raw",
        "--threads",
        "2",
    ]);
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));

    let report = fs::read_to_string(out_dir.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines[0], "estimator,n,replications,mean,bias,sd,rmse,invalid");
    assert_eq!(lines.len(), 1 + 4, "2 estimators x 2 grid points");

    let raw = fs::read_to_string(out_dir.join("raw.csv")).unwrap();
    assert_eq!(raw.lines().count(), 1 + 2 * 2 * 10);

    // the sidecar must re-validate against the input schema
    let sidecar: levycov::io::ReportSidecarDoc =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert!(levycov::Plan::try_from(&sidecar.plan).is_ok());
}

#[test]
fn unparseable_config_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("broken.json");
    write(&config, "{ not json");
    let out = levycov(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_input_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("est.json");
    write(&config, r#"{"estimator": "rc"}"#);
    let out = levycov(&[
        "estimate",
        "--config",
        config.to_str().unwrap(),
        "--input",
        dir.path().join("nope.csv").to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sim.json");
    // an infinite-variation stream with a 3-term series budget cannot reach
    // the truncation level
    write(
        &config,
        &format!(
            r#"{{
                "model": {{{BROWNIAN_MODEL}, "jumps": {{"r1": 1.2, "r2": 1.8, "c1": 1.0, "c2": 1.0, "gamma": 0.0, "symmetric": true}}}},
                "sim": {{"max_series_terms": 3}},
                "n": 64,
                "seed": 5
            }}"#
        ),
    );
    let out = levycov(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_class_reports_membership() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cc.json");
    write(&config, &format!(r#"{{"model": {{{BROWNIAN_MODEL}}}, "M": 4.229, "r": 0.5}}"#));
    let out_dir = dir.path().join("out");
    let out = levycov(&[
        "check-class",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("membership.json")).unwrap())
            .unwrap();
    assert_eq!(doc["passes"], true);
    // sigma1 = sqrt(2) squares back to 2 only up to rounding
    assert!((doc["total"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stdout).contains("membership:       pass"));
}

#[test]
fn benchmark_gate_requires_force_outside_class() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("plan.json");
    // total = 3 > M = 0.1: outside the class
    write(
        &config,
        &format!(
            r#"{{
                "model": {{{BROWNIAN_MODEL}}},
                "estimators": [{{"estimator": "spectral", "M": 0.1, "r": 0.5}}],
                "n_grid": [64],
                "replications": 5,
                "master_seed": 3
            }}"#
        ),
    );
    let out_dir = dir.path().join("out");
    let refused = levycov(&[
        "benchmark",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(refused.status.code(), Some(1));
    let forced = levycov(&[
        "benchmark",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--force",
    ]);
    assert!(forced.status.success(), "stderr: {}", String::from_utf8_lossy(&forced.stderr));
}

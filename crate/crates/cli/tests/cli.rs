//! End-to-end checks of the `bp` binary: exit codes, report schema, the
//! seed environment variable, and determinism of the JSON output.

use std::process::{Command, Output};

fn bp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bp"))
        .args(args)
        .env_remove("BP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn constants_prints_tables() {
    let out = bp(&["constants", "--n", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("sigma_4 = 19.739208802178716"));
    assert!(text.contains("|G(2,4)| = 19.739208802178716"));
}

#[test]
fn verify_single_case_emits_report() {
    let dir = std::env::temp_dir().join("bp-cli-test-report");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("single.json");
    let out = bp(&[
        "verify",
        "--theorem",
        "circumscribed",
        "--n",
        "3",
        "--k",
        "2",
        "--samples",
        "20000",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 42);
    assert_eq!(report["summary"]["failed"], 0);
    let case = &report["cases"][0];
    assert_eq!(case["theorem"], "circumscribed");
    assert!(case["lhs"]["exact"].as_bool().unwrap());
    assert!(case["rhs"]["stderr"].as_f64().unwrap() > 0.0);
    assert!(case["pass"].as_bool().unwrap());
    assert!(case["wall_time"].as_f64().unwrap() >= 0.0);
}

#[test]
fn inconsistent_dimensions_exit_2() {
    let out = bp(&["verify", "--theorem", "pivoted-circle", "--n", "3", "--m", "3", "--q", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("m <= n - q"));
}

#[test]
fn unknown_flag_exit_2() {
    let out = bp(&["verify", "--does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_env_var_applies_unless_flag_given() {
    let run = |seed_flag: Option<&str>, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_bp"));
        cmd.args([
            "verify",
            "--theorem",
            "top-dimensional",
            "--n",
            "2",
            "--samples",
            "5000",
        ]);
        cmd.env_remove("BP_SEED");
        if let Some(seed) = seed_flag {
            cmd.args(["--seed", seed]);
        }
        if let Some(value) = env {
            cmd.env("BP_SEED", value);
        }
        stdout(&cmd.output().unwrap())
    };
    let default = run(None, None);
    let env_seeded = run(None, Some("7"));
    let flag_wins = run(Some("42"), Some("7"));
    assert_ne!(default, env_seeded, "BP_SEED must change the estimate");
    assert_eq!(default, flag_wins, "an explicit --seed overrides BP_SEED");
}

#[test]
fn reports_are_deterministic_modulo_timing() {
    let dir = std::env::temp_dir().join("bp-cli-test-determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let mut reports = Vec::new();
    for name in ["a.json", "b.json"] {
        let path = dir.join(name);
        let out = bp(&[
            "verify",
            "--theorem",
            "pivoted-2",
            "--n",
            "3",
            "--m",
            "2",
            "--samples",
            "10000",
            "--seed",
            "42",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        fn scrub(v: &mut serde_json::Value) {
            match v {
                serde_json::Value::Object(map) => {
                    map.remove("wall_time");
                    map.values_mut().for_each(scrub);
                }
                serde_json::Value::Array(items) => items.iter_mut().for_each(scrub),
                _ => {}
            }
        }
        scrub(&mut v);
        reports.push(serde_json::to_string(&v).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn failing_case_exits_1_and_names_it() {
    // An impossible threshold forces a failure on a real run.
    let out = bp(&[
        "verify",
        "--theorem",
        "linear-bp",
        "--n",
        "3",
        "--k",
        "1",
        "--samples",
        "5000",
        "--threshold",
        "0.000001",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("[FAIL] linear-bp"), "output: {text}");
    assert!(text.contains("0 passed, 1 failed"));
}

#[test]
fn oracle_and_roundtrip_subcommands() {
    let out = bp(&[
        "oracle",
        "--theorem",
        "top-dimensional",
        "--n",
        "2",
        "--count",
        "20",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("worst relative error"));

    let out = bp(&[
        "roundtrip",
        "--theorem",
        "anchored",
        "--n",
        "3",
        "--m",
        "2",
        "--k",
        "1",
        "--count",
        "200",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("[pass] anchored round trip"));
}

#[test]
fn sample_emits_json_lines() {
    let out = bp(&[
        "sample",
        "--theorem",
        "on-sphere",
        "--n",
        "2",
        "--k",
        "1",
        "--samples",
        "5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["theorem"], "on-sphere");
        assert!(v["weight"].as_f64().unwrap() > 0.0);
        assert!(v["radius"].as_f64().unwrap() <= 1.0);
    }
}

#[test]
fn unwritable_report_path_exits_nonzero() {
    let out = bp(&[
        "verify",
        "--theorem",
        "top-dimensional",
        "--n",
        "1",
        "--samples",
        "2000",
        "--out",
        "/nonexistent-dir/report.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot write report"));
}

#[test]
fn constant_integrand_rejected_on_euclidean_theorem() {
    let out = bp(&[
        "verify",
        "--theorem",
        "circumscribed",
        "--n",
        "2",
        "--k",
        "1",
        "--integrand",
        "constant",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn thermoscope(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermoscope"))
        .args(args)
        .env_remove("THERMOSCOPE_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not one JSON document ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn predict_reports_target_and_residual() {
    let out = thermoscope(&["predict", "--object1", "aluminum", "--target", "pine wood"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["ambiguous_temperature"].as_f64().unwrap() - 4.575_466_693_306_969).abs() < 1e-9);
    assert!(v["verification_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn verify_proof_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let ra = thermoscope(&["verify-proof", "--samples", "2000", "--seed", "9", "--out", s(&a)]);
    let rb = thermoscope(&[
        "verify-proof",
        "--samples",
        "2000",
        "--seed",
        "9",
        "--out",
        s(&b),
        "--jobs",
        "1",
    ]);
    assert_eq!(ra.status.code(), Some(0));
    assert_eq!(rb.status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ra.stdout, rb.stdout);
    assert_eq!(json(&ra)["violations"], 0);
}

#[test]
fn verify_proof_with_zero_samples() {
    let out = thermoscope(&["verify-proof", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n_samples"], 0);
    assert!(v["min_gap"].is_null());
}

#[test]
fn simulate_then_fit_recovers_pine() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("pine.csv");
    let out = thermoscope(&["simulate", "--object", "pine wood", "--out", s(&trace)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("time_s,temperature_c,sensor_id\n"));

    let out = thermoscope(&[
        "fit",
        "--trace",
        s(&trace),
        "--sensor",
        "892,29.5",
        "--bounds",
        "50,50000",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let e = json(&out)["estimate"].as_f64().unwrap();
    assert!((e - 331.0).abs() / 331.0 < 1e-3, "{e}");
}

#[test]
fn seed_env_overrides_scenario_seed() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_thermoscope"))
        .args(["simulate", "--out", s(&trace)])
        .env("THERMOSCOPE_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["seed"], 77);

    let out = Command::new(env!("CARGO_BIN_EXE_thermoscope"))
        .args(["simulate", "--out", s(&trace)])
        .env("THERMOSCOPE_SEED", "not a number")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fit_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.csv");
    assert_eq!(thermoscope(&["simulate", "--out", s(&good)]).status.code(), Some(0));

    let out = thermoscope(&["fit", "--trace", s(&good), "--bounds", "50000,50"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());

    let headerless = dir.path().join("headerless.csv");
    let body: String = std::fs::read_to_string(&good)
        .unwrap()
        .lines()
        .skip(1)
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&headerless, body).unwrap();
    let out = thermoscope(&["fit", "--trace", s(&headerless)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("header"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn fit_on_flat_trace_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.csv");
    let mut text = String::from("time_s,temperature_c,sensor_id\n");
    for i in 0..100 {
        text.push_str(&format!("{},29.5,active\n", i as f64 * 0.02));
    }
    std::fs::write(&flat, text).unwrap();
    let out = thermoscope(&["fit", "--trace", s(&flat)]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_scenario_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"sensor": {"material": "robot sensor", "temperature": 29.5, "colour": "red"}}"#,
    )
    .unwrap();
    let out = thermoscope(&[
        "predict",
        "--scenario",
        s(&bad),
        "--object1",
        "aluminum",
        "--target-effusivity",
        "331",
    ]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::write(&bad, "{ not json").unwrap();
    let out = thermoscope(&["study", "--study", "1", "--scenario", s(&bad), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn study_requires_out_and_known_id() {
    assert_eq!(thermoscope(&["study", "--study", "3"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        thermoscope(&["study", "--study", "4", "--out", s(dir.path())])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn study_three_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = thermoscope(&["study", "--study", "3", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["accuracy"].as_f64().unwrap(), 1.0);
    assert_eq!(v["traces"], 540);
    for f in ["manifest.json", "report.json", "confusion.csv", "histogram.csv"] {
        assert!(dir.path().join(f).is_file(), "{f}");
    }
    assert_eq!(std::fs::read_dir(dir.path().join("traces")).unwrap().count(), 540);
    let confusion = std::fs::read_to_string(dir.path().join("confusion.csv")).unwrap();
    assert!(confusion.starts_with("true_condition,predicted,count\n"));
}

#[test]
fn study_one_calls_cold_wood_metal() {
    let dir = tempfile::tempdir().unwrap();
    let out = thermoscope(&["study", "--study", "1", "--out", s(dir.path()), "--jobs", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["cold_wood_as_metal"].as_f64().unwrap() >= 0.95);
}

#[test]
fn classify_and_tune_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let active = dir.path().join("a.csv");
    let passive = dir.path().join("p.csv");
    let out = thermoscope(&[
        "simulate",
        "--object",
        "aluminum",
        "--double",
        "--out",
        s(&active),
        "--passive-out",
        s(&passive),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = thermoscope(&[
        "classify",
        "--active",
        s(&active),
        "--passive",
        s(&passive),
        "--study",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["label"], "metal");
    let out = thermoscope(&["classify", "--active", s(&active), "--study", "3"]);
    assert_eq!(out.status.code(), Some(2));

    let out = thermoscope(&["tune-target", "--step", "0.5", "--ideal"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["target"].as_f64().unwrap(), 4.5);
    assert_eq!(thermoscope(&["tune-target", "--step", "-1"]).status.code(), Some(2));

    let trials = dir.path().join("trials.json");
    let records: Vec<Value> = [30.0, 31.0, 33.5, 36.0, 27.9]
        .iter()
        .map(|f| serde_json::json!({"finger_temp_avg": f, "intended": 32.0, "epsilon": 32.0 - f, "answers": {}}))
        .collect();
    std::fs::write(&trials, serde_json::to_string(&records).unwrap()).unwrap();
    let csv = dir.path().join("h.csv");
    let out = thermoscope(&["histogram", "--trials", s(&trials), "--gamma", "3.5", "--out", s(&csv)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(std::fs::read_to_string(&csv)
        .unwrap()
        .starts_with("bin_lo,bin_hi,count,in_range\n"));
    let out = thermoscope(&["histogram", "--trials", s(&trials), "--center", "32"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["threshold_search"]["gamma"].is_number());
    assert_eq!(
        thermoscope(&["histogram", "--trials", s(&trials)]).status.code(),
        Some(2)
    );
}

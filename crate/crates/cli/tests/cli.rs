use std::fs::File;
use std::process::{Command, Output};

use fhs_core::fields::write_csv;
use fhs_core::{Grid, TrialFunction};

fn fhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fhs")).args(args).output().expect("spawn fhs")
}

#[test]
fn constants_json_has_the_reciprocal_pi_row() {
    let out = fhs(&["constants", "--json"]);
    assert!(out.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3 * 19);
    let half = rows.iter().find(|r| r["n"] == 1 && r["s"] == 0.5).unwrap();
    let inv_pi = std::f64::consts::FRAC_1_PI;
    assert!((half["hardy"].as_f64().unwrap() - inv_pi).abs() < 1e-12);
    assert!((half["gamma"].as_f64().unwrap() - inv_pi).abs() < 1e-12);
    assert!(half["sobolev_estimate"].is_null());
}

#[test]
fn quadform_of_zero_field_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.csv");
    write_csv(&TrialFunction::zeros(Grid::with_resolution(1, 65).unwrap()), File::create(&path).unwrap()).unwrap();
    let out = fhs(&["quadform", "--field", path.to_str().unwrap(), "--s", "0.4", "--json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["fourier_value", "gagliardo_value", "regional_value", "hardy_value"] {
        assert_eq!(r[key].as_f64(), Some(0.0), "{key}");
    }
}

#[test]
fn unknown_subcommand_exits_2() {
    assert_eq!(fhs(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{ \"experiment\": \"bn\", \"points\": 7 }").unwrap();
    let out = fhs(&["experiment", "bn", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_of_hypothesis_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bn.json");
    let cfg = r#"{ "experiment": "bn", "points": [ { "n": 1, "s": 0.4, "lambda": { "absolute": 0.1 } } ] }"#;
    std::fs::write(&path, cfg).unwrap();
    let out = fhs(&["experiment", "bn", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn coupling_at_or_above_hardy_exits_2() {
    let out = fhs(&["minimize", "--n", "1", "--s", "0.4", "--lambda", "5.0", "--resolution", "65"]);
    assert_eq!(out.status.code(), Some(2));
}

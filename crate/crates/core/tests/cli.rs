use std::path::Path;
use std::process::{Command, Output};

fn cjdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cjdlab"))
        .args(args)
        .current_dir(Path::new(env!("CARGO_MANIFEST_DIR")).join("../.."))
        .output()
        .unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    let out = cjdlab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let out = cjdlab(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(env!("CARGO_PKG_VERSION")), "{text}");
    assert!(text.contains("build"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cjdlab(&[]).status.code(), Some(1));
    assert_eq!(cjdlab(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(cjdlab(&["run", "--seed", "abc"]).status.code(), Some(1));
    assert_eq!(cjdlab(&["predict"]).status.code(), Some(1));
}

#[test]
fn data_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let o = out.to_str().unwrap();
    assert_eq!(cjdlab(&["stats", "--dataset", "/nonexistent.csv", "--out", o]).status.code(), Some(2));
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"train_fraction": 1.5}"#).unwrap();
    assert_eq!(cjdlab(&["run", "--config", cfg.to_str().unwrap(), "--out", o]).status.code(), Some(2));
    std::fs::write(&cfg, r#"{"unknown_field": 1}"#).unwrap();
    assert_eq!(cjdlab(&["stats", "--config", cfg.to_str().unwrap(), "--out", o]).status.code(), Some(2));
    let model = dir.path().join("m.json");
    std::fs::write(&model, "{}").unwrap();
    let r = cjdlab(&["predict", "--model", model.to_str().unwrap(), "--out", o]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("corrupt model"));
    assert!(!out.exists());
}

#[test]
fn stats_and_sweep_succeed_with_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let o = dir.path().to_str().unwrap();
    let s = cjdlab(&["stats", "--out", o]);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    assert!(dir.path().join("table1.csv").exists());
    let s = cjdlab(&["sweep", "--config", "configs/default.json", "--seed", "5", "--out", o]);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    assert!(dir.path().join("sweep.json").exists());
}

#[test]
fn run_then_predict() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fast.json");
    std::fs::write(&cfg, r#"{"lstm": {"epochs": 5}, "forest": {"n_trees": 5}}"#).unwrap();
    let o = dir.path().to_str().unwrap();
    let r = cjdlab(&["run", "--config", cfg.to_str().unwrap(), "--out", o]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let stdout = String::from_utf8(r.stdout).unwrap();
    assert!(stdout.contains("ENR") && stdout.contains("LSTM") && stdout.contains("RF"));
    let model = dir.path().join("models/rf.json");
    let p = cjdlab(&["predict", "--model", model.to_str().unwrap(), "--out", o]);
    assert_eq!(p.status.code(), Some(0), "{}", String::from_utf8_lossy(&p.stderr));
    let text = std::fs::read_to_string(dir.path().join("predictions.csv")).unwrap();
    assert_eq!(text.lines().count(), 38);
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CS1: &str = r#"{"summands": [{"a": 1, "b": 1, "c": 2}, {"a": 1, "b": 1, "c": 2}]}"#;
const BAD_SUM: &str = r#"{"summands": [{"a": 1, "b": 1, "c": 2}, {"a": 1, "b": 1, "c": 3}]}"#;
const DEGENERATE: &str = r#"{"summands": [{"a": 2, "b": 1, "c": 2}]}"#;

fn sflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sflab"))
        .args(args)
        .env_remove("SFLAB_CAPACITY")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn cs1_tower(dir: &TempDir, levels: &str) -> PathBuf {
    let spec = write(dir, "cs1.json", CS1);
    let out = dir.path().join(format!("cs1-k{levels}.json"));
    let o = sflab(&["build", s(&spec), "--levels", levels, "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    out
}

#[test]
fn validate_exit_codes() {
    let dir = TempDir::new().unwrap();
    let o = sflab(&["validate", s(&write(&dir, "cs1.json", CS1))]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["dims"]["d"], 4);
    assert_eq!(v["dims"]["mult"], serde_json::json!([2, 2]));

    let o = sflab(&["validate", s(&write(&dir, "bad.json", BAD_SUM))]);
    assert_eq!(code(&o), 1);
    assert!(json(&o)["violations"][0].as_str().unwrap().starts_with("SumNotOne"));

    let o = sflab(&["validate", s(&dir.path().join("missing.json"))]);
    assert_eq!(code(&o), 2);
    let o = sflab(&["validate", s(&write(&dir, "junk.json", "{not json"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn build_is_idempotent_and_capped() {
    let dir = TempDir::new().unwrap();
    let a = cs1_tower(&dir, "3");
    let first = fs::read(&a).unwrap();
    let tower: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(tower["depth"], 3);
    let again = cs1_tower(&dir, "3");
    assert_eq!(first, fs::read(again).unwrap());

    let spec = write(&dir, "cs1.json", CS1);
    let o = sflab(&["build", s(&spec), "--levels", "9"]);
    assert_eq!(code(&o), 3);
    let o = Command::new(env!("CARGO_BIN_EXE_sflab"))
        .args(["build", s(&spec), "--levels", "3"])
        .env("SFLAB_CAPACITY", "16")
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);

    let deg = write(&dir, "degenerate.json", DEGENERATE);
    assert_eq!(code(&sflab(&["build", s(&deg), "--levels", "5"])), 0);
}

#[test]
fn check_suites_on_depth_three() {
    let dir = TempDir::new().unwrap();
    let tower = cs1_tower(&dir, "3");
    for suite in ["relations", "lemma1", "lemma2", "lemma3", "shift", "collapse"] {
        let o = sflab(&["check", s(&tower), "--suite", suite]);
        assert_eq!(code(&o), 0, "{suite}: {}", String::from_utf8_lossy(&o.stderr));
        let v = json(&o);
        assert_ne!(v["status"], "fail");
        assert_eq!(v["seed"], 0x5EED);
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["anchor"].is_string()));
    }
    let v = json(&sflab(&["check", s(&tower), "--suite", "lemma1"]));
    let joint = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "lemma1: dim A_1 ⋯ A_2").unwrap();
    assert_eq!(joint["status"], "pass");

    let v = json(&sflab(&["check", s(&tower), "--suite", "shift"]));
    let prefix = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "shift: reference family: S prefix").unwrap();
    assert_eq!(prefix["detail"], "S prefix [1, 3]");
}

#[test]
fn check_is_deterministic_across_jobs() {
    let dir = TempDir::new().unwrap();
    let tower = cs1_tower(&dir, "3");
    let a = sflab(&["check", s(&tower), "--jobs", "1"]);
    let b = sflab(&["check", s(&tower), "--jobs", "4"]);
    assert_eq!(a.stdout, b.stdout);
    let c = sflab(&["check", s(&tower), "--seed", "7"]);
    assert_eq!(json(&c)["seed"], 7);
}

#[test]
fn malformed_tower_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "t.json", r#"{"spec": 1}"#);
    assert_eq!(code(&sflab(&["check", s(&bad)])), 2);
}

#[test]
fn tl_command() {
    let o = sflab(&["tl", "--lambda", "1/5", "--m", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    let w = v["data"]["weights"].as_array().unwrap();
    assert!((w[0].as_f64().unwrap() - 0.2).abs() < 1e-12);

    let o = sflab(&["tl", "--lambda", "1/5", "--m", "4"]);
    assert_eq!(code(&o), 0);
    let kappa = json(&o)["data"]["kappa"].as_f64().unwrap();
    assert!(kappa < 0.16);
    assert!((kappa - 0.10625).abs() < 1e-12);

    let o = sflab(&["tl", "--lambda", "1/4", "--m", "3"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("(4, ∞) ∩ ℚ"));
    assert_eq!(code(&sflab(&["tl", "--lambda", "1/5", "--m", "5"])), 2);
}

#[test]
fn report_merge() {
    let dir = TempDir::new().unwrap();
    let pass = write(&dir, "a.json", &String::from_utf8(sflab(&["tl", "--lambda", "1/5"]).stdout).unwrap());
    let pass2 = write(&dir, "b.json", &String::from_utf8(sflab(&["tl", "--lambda", "1/6", "--m", "4"]).stdout).unwrap());
    let o = sflab(&["report", "--merge", s(&pass), s(&pass2)]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["status"], "pass");

    let mut failing: Value = serde_json::from_str(&fs::read_to_string(&pass).unwrap()).unwrap();
    failing["checks"][0]["status"] = "fail".into();
    failing["status"] = "fail".into();
    let fail = write(&dir, "c.json", &failing.to_string());
    let o = sflab(&["report", "--merge", s(&pass), s(&fail)]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["status"], "fail");

    let o = sflab(&["report", "--merge", s(&pass), "--format", "text"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("status ") && l.contains("anchor")));

    let spec = write(&dir, "cs1.json", CS1);
    assert_eq!(code(&sflab(&["report", "--merge", s(&spec)])), 2);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&sflab(&[])), 2);
    assert_eq!(code(&sflab(&["check"])), 2);
    assert_eq!(code(&sflab(&["--version"])), 0);
}

mod common;

use std::path::Path;
use std::process::{Command, Output};

use geoweave::dsl::load_feature_set;
use sha2::{Digest, Sha256};

use common::fixture_path;

fn geoweave(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geoweave")).args(args).arg("--out").arg(out).env_remove("GEOWEAVE_SEED").output().unwrap()
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

fn check_outputs(out: &Path, m: &serde_json::Value) {
    for o in m["outputs"].as_array().unwrap() {
        let bytes = std::fs::read(out.join(o["path"].as_str().unwrap())).unwrap();
        assert_eq!(o["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
}

#[test]
fn usage_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.fs");
    std::fs::write(&empty, "# nothing here\n").unwrap();
    let bad = dir.path().join("bad.fs");
    std::fs::write(&bad, "rel proactive w=1 el={}:q act_to={}\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["frobnicate"],
        vec!["match", "--games", "3"],
        vec!["match", "--game", "chess"],
        vec!["match", "--game", "hex1"],
        vec!["render", "--features", empty.to_str().unwrap()],
        vec!["render", "--features", bad.to_str().unwrap()],
        vec!["render", "--features", "/definitely/not/here.fs"],
        vec!["tune", "--features", bad.to_str().unwrap()],
        vec!["generate", "--max-elements", "0"],
    ];
    for args in cases {
        let o = geoweave(&args, &dir.path().join("out"));
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn render_writes_one_svg_per_feature_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = geoweave(&["render", "--game", "hex7", "--features", &fixture_path("group3.fs")], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(m["command"], "render");
    assert_eq!(m["outputs"].as_array().unwrap().len(), load_feature_set(fixture_path("group3.fs")).unwrap().len());
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    check_outputs(&out, &m);
}

#[test]
fn seed_comes_from_the_environment_when_not_given() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = Command::new(env!("CARGO_BIN_EXE_geoweave"))
        .args(["match", "--game", "line4-5x5", "--agent", "policy", "--games", "2", "--out"])
        .arg(&out)
        .env("GEOWEAVE_SEED", "99")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(manifest(&out)["seed"], 99);
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("match.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 99);
}

#[test]
fn generated_candidates_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = geoweave(
        &["generate", "--game", "line4-7x7", "--max-elements", "2", "--max-walk-length", "1", "--include-reactive"],
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fs = load_feature_set(out.join("candidates.fs")).unwrap();
    assert!(fs.features.iter().any(|f| f.last_move.is_some()));
    assert!(fs.features.iter().any(|f| f.last_move.is_none()));
    check_outputs(&out, &manifest(&out));
}

#[test]
fn evaluate_without_features_uses_the_empty_set() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e");
    let o = geoweave(&["evaluate", "--game", "line4-5x5", "--agent", "policy", "--games", "20", "--seed", "3"], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rec: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("eval.json")).unwrap()).unwrap();
    assert_eq!(rec["games"], 20);
    assert_eq!(rec["featureSetHash"].as_str().unwrap().len(), 64);
    let line = std::fs::read_to_string(out.join("eval.jsonl")).unwrap();
    assert_eq!(line.lines().count(), 1);
    assert_eq!(serde_json::from_str::<serde_json::Value>(&line).unwrap(), rec);
}

#[test]
fn tune_log_respects_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = geoweave(
        &[
            "tune",
            "--game",
            "line4-5x5",
            "--features",
            &fixture_path("line4.fs"),
            "--agent",
            "policy",
            "--budget",
            "5",
            "--games",
            "10",
            "--step",
            "2",
        ],
        &out,
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let log = std::fs::read_to_string(out.join("tune.jsonl")).unwrap();
    let n = log.lines().count();
    assert!((1..=5).contains(&n), "{n} evaluations");
    let tuned = load_feature_set(out.join("tuned.fs")).unwrap();
    assert_eq!(tuned.len(), load_feature_set(fixture_path("line4.fs")).unwrap().len());
    check_outputs(&out, &manifest(&out));
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reesdiag::model::ModelFile;
use serde_json::Value;

const FIXTURES: [&str; 3] = ["torus", "interval", "sheared"];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(format!("{name}.json"))
}

fn run(args: &[&str], model: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reesdiag"))
        .args(args)
        .arg("--model")
        .arg(model)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn construct_on_torus_succeeds() {
    let out = run(&["construct"], &fixture("torus"));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "success");
    assert_eq!(v["result"]["basis"]["sections"].as_array().unwrap().len(), 6);
}

#[test]
fn dependent_pair_is_an_obstruction_with_witness() {
    let out = run(&["check"], &data("sum_difference"));
    assert_eq!(out.status.code(), Some(2));
    let v = json(&out);
    assert_eq!(v["verdict"], "obstruction");
    let text = v["result"].to_string();
    assert!(text.contains("[0]@[1]"), "{text}");
}

#[test]
fn precision_beyond_model_is_an_error() {
    let out = run(&["lift", "--precision", "99"], &fixture("interval"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precision"));
}

#[test]
fn lift_verifies_every_level() {
    for name in FIXTURES {
        let out = run(&["lift", "--precision", "4"], &fixture(name));
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(json(&out)["result"]["verified_levels"], serde_json::json!([1, 2, 3, 4]));
    }
}

#[test]
fn skeleton_command_without_divisors_fails_cleanly() {
    let out = run(&["construct"], &fixture("sheared"));
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divisors"));
}

#[test]
fn fixtures_round_trip() {
    for name in FIXTURES {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let a = ModelFile::from_json(&text).unwrap();
        let b = ModelFile::from_json(&a.to_json()).unwrap();
        assert_eq!(a, b, "{name}");
        assert_eq!(a.to_json(), b.to_json(), "{name}");
        b.validate().unwrap();
    }
}

#[test]
fn output_is_deterministic() {
    for args in [&["construct", "--seed", "7"][..], &["tropicalize"][..], &["grdim"][..]] {
        let a = run(args, &fixture("interval"));
        let b = run(args, &fixture("interval"));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn svg_for_interval_has_one_graph_per_section() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trop.svg");
    let out = Command::new(env!("CARGO_BIN_EXE_reesdiag"))
        .args(["tropicalize", "--format", "svg", "--out"])
        .arg(&path)
        .arg("--model")
        .arg(fixture("interval"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 3);
}

#[test]
fn toml_model_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.toml");
    std::fs::write(
        &path,
        r#"
spec = 1
variables = ["x"]
precision = 4
simplices = [[0, 1]]

[[divisors]]
label = "E0"
weights = ["1"]
multiplicity = 1

[[divisors]]
label = "E1"
weights = ["-1"]
multiplicity = 1

[[levels]]
sections = ["1", "x", "x^-1"]
"#,
    )
    .unwrap();
    let out = run(&["check"], &path);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn wrong_schema_version_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.json");
    let text = std::fs::read_to_string(fixture("interval")).unwrap().replacen("\"spec\": 1", "\"spec\": 2", 1);
    std::fs::write(&path, text).unwrap();
    let out = run(&["grdim"], &path);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("spec"));
}

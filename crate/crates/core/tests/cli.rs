use std::fs;
use std::process::{Command, Output};

use shallow_junctions::presets::PRESETS;

fn swnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swnet")).args(args).output().expect("binary runs")
}

#[test]
fn preset_list_names_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    let out = swnet(&["preset-list", "--emit", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for (name, _) in PRESETS {
        assert!(text.contains(name), "{name}");
        let file = dir.path().join(format!("{name}.json"));
        let v = swnet(&["validate", file.to_str().unwrap()]);
        assert!(v.status.success(), "{name}: {}", String::from_utf8_lossy(&v.stderr));
    }
}

#[test]
fn run_writes_gauges_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let s = swnet(&["run", "--preset", "test1_sub90", "--t-end", "0.5", "-o", out.to_str().unwrap()]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let csv = fs::read_to_string(out.join("gauges.csv")).unwrap();
    assert!(csv.starts_with("t,gauge_id,h,u\n"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["t_final"], 0.5);
    assert!(out.join("scenario.json").exists());
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ \"name\": 3 }").unwrap();
    assert_eq!(swnet(&["validate", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(swnet(&["run", "--preset", "no_such_preset", "-o", dir.path().to_str().unwrap()]).status.code(), Some(2));
    let s = swnet(&["run", "--preset", "test1_sub90", "--strategy", "method_z", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_three_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let s = swnet(&["run", "--preset", "test4_super90", "--strategy", "psfp", "-o", dir.path().to_str().unwrap()]);
    assert_eq!(s.status.code(), Some(3));
    let diag: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("diagnostics.json")).unwrap()).unwrap();
    assert!(diag["error"].as_str().unwrap().contains("junction"));
    assert!(diag["snapshot"]["channels"].is_array());
}

#[test]
fn convergence_verb_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let s = swnet(&["convergence", "--levels", "2", "--cells", "20", "-o", dir.path().to_str().unwrap()]);
    assert!(s.status.success());
    let table = fs::read_to_string(dir.path().join("convergence_order2.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
}

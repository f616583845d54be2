use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_padic-vc-lab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn net_size_matches_table() {
    let v = json(&bin(&["net", "size", "--k", "2", "--epsilon", "1/4"]));
    assert_eq!(v["n"], 10944);
    assert_eq!(v["schema"], 1);
    let v = json(&bin(&["net", "size", "--k", "1", "--epsilon", "1/10"]));
    assert_eq!(v["n"], 48552);
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(bin(&["net", "size", "--k", "2", "--epsilon", "3/2"]).status.code(), Some(2));
    assert_eq!(bin(&["net", "size", "--k", "2", "--epsilon", "abc"]).status.code(), Some(2));
    assert_eq!(bin(&["group", "quotient", "--group", "units", "--p", "4", "--level", "2"]).status.code(), Some(2));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn window_commands() {
    let dir = tempfile::tempdir().unwrap();
    let w = write(dir.path(), "w.json", r#"{"p":3,"n":1,"scale":0,"level":1,"residues":[[0],[1]]}"#);
    let t = write(dir.path(), "t.json", r#"{"p":3,"n":1,"scale":0,"level":1,"residues":[[0]],"tail":true}"#);
    assert_eq!(json(&bin(&["measure", "--set", &w]))["measure"], "2/3");
    assert!(json(&bin(&["measure", "--set", &t]))["measure"].is_null());
    let c = json(&bin(&["compact-check", "--set", &t]));
    assert_eq!((c["closed"].as_bool(), c["compact"].as_bool()), (Some(true), Some(false)));
    let fam = format!("[{},{}]", fs::read_to_string(&w).unwrap(), fs::read_to_string(&t).unwrap());
    let f = write(dir.path(), "f.json", &fam);
    assert_eq!(json(&bin(&["compact-locus", "--family", &f]))["locus"], serde_json::json!([0]));
}

#[test]
fn group_commands() {
    let g = ["--group", "units", "--p", "3", "--level", "3"];
    let q = json(&bin(&[&["group", "quotient"][..], &g].concat()));
    assert_eq!(q["order"], 18);
    let s1 = json(&bin(&[&["group", "sample", "--seed", "42", "--count", "5"][..], &g].concat()));
    let s2 = json(&bin(&[&["group", "sample", "--seed", "42", "--count", "5"][..], &g].concat()));
    assert_eq!(s1, s2);
    assert_eq!(s1["sample"].as_array().unwrap().len(), 5);
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "c.json", r#"{"p":3,"n":1,"level":2,"residues":[[1],[4]]}"#);
    assert_eq!(json(&bin(&[&["group", "measure", "--set", &c][..], &g].concat()))["measure"], "1/3");
    let cov = json(&bin(&[&["cover", "--set", &c, "--exact"][..], &g].concat()));
    assert_eq!(cov["covered"], true);
    assert_eq!(cov["exact_k"], 4);
    assert_eq!(bin(&[&["cover", "--set", &c, "--max-translates", "2"][..], &g].concat()).status.code(), Some(3));
    // residue 3 is not a unit
    let bad = write(dir.path(), "b.json", r#"{"p":3,"n":1,"level":1,"residues":[[0]]}"#);
    assert_eq!(bin(&[&["group", "measure", "--set", &bad][..], &g].concat()).status.code(), Some(2));
}

#[test]
fn vc_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write(
        dir.path(),
        "s.json",
        r#"{"ground":[[0],[1],[2]],"family":[{"label":"a","members":[[0]]},{"label":"b","members":[[1]]},{"label":"ab","members":[[0],[1]]},{"label":"none","members":[]}]}"#,
    );
    assert_eq!(json(&bin(&["vc", "dim", "--system", &sys]))["vc_dimension"], "2");
    let hit = write(dir.path(), "hit.json", "[[0],[1]]");
    let miss = write(dir.path(), "miss.json", "[[2]]");
    assert_eq!(json(&bin(&["net", "verify", "--system", &sys, "--epsilon", "1/4", "--sample", &hit]))["ok"], true);
    let out = bin(&["net", "verify", "--system", &sys, "--epsilon", "1/4", "--sample", &miss]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiment_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let csv = dir.path().join("trials.csv");
    let out = bin(&[
        "net", "experiment", "--group", "units", "--p", "3", "--level", "3", "--epsilon", "1/4", "--trials", "10",
        "--seed", "42", "--out", report.to_str().unwrap(), "--csv", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["failures"], 0);
    let rows = fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("trial,N,missed_count,max_discrepancy\n"));
    assert_eq!(rows.lines().count(), 11);
}

#[test]
fn fsg_witness_for_balls() {
    let v = json(&bin(&["fsg", "--group", "additive", "--p", "2", "--level", "3", "--epsilon", "1/2", "--seed", "1"]));
    assert_eq!(v["vc_dimension"], 2);
    assert!(!v["net"].as_array().unwrap().is_empty());
}

#[test]
fn run_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{"pipeline":[{{"kind":"net_size_table","ks":[1,2],"epsilons":["1/2"]}}],"seed":42,"out_dir":{:?}}}"#,
            out_dir.to_str().unwrap()
        ),
    );
    let out = bin(&["run", "--config", &cfg]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["seed"], 42);
    let table = fs::read_to_string(out_dir.join("tables/step0_net_size.csv")).unwrap();
    assert!(table.contains("2,1/2,1/4,2242"));

    let bad = write(dir.path(), "bad.json", r#"{"pipeline":[{"kind":"nope"}]}"#);
    assert_eq!(bin(&["run", "--config", &bad]).status.code(), Some(2));
    let cap = write(
        dir.path(),
        "cap.json",
        r#"{"pipeline":[{"kind":"fsg_witness","group":{"kind":"additive","n":1,"p":2,"level":40},"epsilon":"1/2"}]}"#,
    );
    assert_eq!(bin(&["run", "--config", &cap, "--out-dir", dir.path().to_str().unwrap()]).status.code(), Some(4));
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn catalog() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/catalog")
}

fn pds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pds"))
        .args(args)
        .arg("--catalog")
        .arg(catalog())
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(pds(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(pds(&["search", "--jobs", "many"]).status.code(), Some(2));
    assert_eq!(pds(&["search", "--params", "64,18,2"]).status.code(), Some(2));
}

#[test]
fn group_without_rank_three_image_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let o = pds(&["search", "--group", "c8xc8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn pipeline_on_one_group() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let out_s = out.to_str().unwrap();
    let o = pds(&["search", "--group", "g192", "--jobs", "4", "--out", out_s]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 3072);

    let o = pds(&["verify", "--in", out_s]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("verified 3072 records"));

    let o = pds(&["classify", "--in", out_s]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("g192: 3072 PDSs, 1 classes"), "{}", stdout(&o));
    assert!(pds(&["breakdown", "--in", out_s]).status.success());
    assert!(pds(&["graphs", "--in", out_s]).status.success());

    let csv = dir.path().join("r.csv");
    let o = pds(&["report", "--in", out_s, "--out", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("1 groups with PDSs"), "{text}");
    let row = fs::read_to_string(&csv).unwrap().lines().nth(1).unwrap().to_string();
    assert!(row.starts_with("g192,3072,1,false,1,1,"), "{row}");
}

#[test]
fn search_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    assert!(pds(&["search", "--group", "g193", "--out", a.to_str().unwrap()]).status.success());
    assert!(pds(&["search", "--group", "g193", "--jobs", "3", "--out", b.to_str().unwrap()]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(dir.path().join("a.jsonl.stats.json").exists());
}

#[test]
fn verify_rejects_tampered_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let out_s = out.to_str().unwrap();
    assert!(pds(&["search", "--group", "g193", "--first-only", "--out", out_s]).status.success());
    let text = fs::read_to_string(&out).unwrap();
    let mut rec: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let elements = rec["elements"].as_array_mut().unwrap();
    let last = elements.last().unwrap().as_u64().unwrap();
    *elements.last_mut().unwrap() = serde_json::json!(if last == 63 { 62 } else { 63 });
    if elements[elements.len() - 2] == elements[elements.len() - 1] {
        elements.pop();
    }
    fs::write(&out, format!("{rec}\n")).unwrap();
    let o = pds(&["verify", "--in", out_s]);
    assert_eq!(o.status.code(), Some(1));

    fs::write(&out, "{not json\n").unwrap();
    assert_eq!(pds(&["verify", "--in", out_s]).status.code(), Some(1));
}

#[test]
fn ingest_checks_catalog_and_graph6() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.g6");
    fs::write(&good, "IheA@GUAo\nA_\n").unwrap();
    assert!(pds(&["ingest", "--graph6", good.to_str().unwrap()]).status.success());
    let bad = dir.path().join("bad.g6");
    fs::write(&bad, "A`\n").unwrap();
    assert_eq!(pds(&["ingest", "--graph6", bad.to_str().unwrap()]).status.code(), Some(1));
}

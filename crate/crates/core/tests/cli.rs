//! The binary as a subprocess: exit codes, output formats, determinism and
//! checkpoint handling.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn zerosum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zerosum")).args(args).output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    zerosum(args).status.code().expect("exit code")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = zerosum(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn payload_bytes(path: &Path) -> String {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    serde_json::to_string(&v["payload"]).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["davenport", "--group", "metacyclic:2,3,2"]), 0);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&["davenport"]), 2);
    assert_eq!(code(&["frobnicate", "--group", "cyclic:4"]), 2);
    assert_eq!(code(&["davenport", "--group", "cyclic:4", "--workers", "0"]), 2);
    assert_eq!(code(&["davenport", "--group", "cyclic:4", "--budget-seconds", "0"]), 2);
    assert_eq!(code(&["products", "--group", "cyclic:4"]), 2);
    assert_eq!(code(&["products", "--group", "cyclic:4", "--sequence", "z^9"]), 2);
    assert_eq!(code(&["davenport", "--group", "metacyclic:2,3,1"]), 3);
    assert_eq!(code(&["davenport", "--group", "metacyclic:4,5,2"]), 3);
    assert_eq!(code(&["davenport", "--group", "nonsense"]), 3);
    assert_eq!(code(&["verify-t11", "--group", "cyclic:5"]), 3);
    assert_eq!(code(&["verify-t12", "--group", "metacyclic:3,7,2"]), 4);
    assert_eq!(code(&["gao", "--group", "metacyclic:3,7,2", "--gao-mode", "exhaustive"]), 4);
}

#[test]
fn infeasible_census_is_labelled() {
    let (c, r) = report(&["census-t12", "--group", "metacyclic:3,7,2"]);
    assert_eq!(c, 4);
    assert_eq!(r["status"], "partial");
    assert!(r["payload"]["infeasible"].as_str().unwrap().contains("nodes"));
}

#[test]
fn payloads_are_deterministic() {
    for args in [
        &["lemmas", "--group", "metacyclic:2,3,2", "--seed", "7", "--trials", "50"][..],
        &["census-t12", "--group", "metacyclic:2,3,2", "--workers", "3"][..],
        &["davenport", "--group", "metacyclic:2,5,4", "--workers", "2"][..],
    ] {
        let (c1, a) = report(args);
        let (c2, b) = report(args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(serde_json::to_string(&a["payload"]).unwrap(), serde_json::to_string(&b["payload"]).unwrap());
    }
    let (_, one) = report(&["census-t12", "--group", "metacyclic:2,3,2", "--workers", "1"]);
    let (_, four) = report(&["census-t12", "--group", "metacyclic:2,3,2", "--workers", "4"]);
    assert_eq!(one["payload"], four["payload"]);
}

#[test]
fn timings_live_in_meta() {
    let (_, r) = report(&["verify-t11", "--group", "metacyclic:2,5,4"]);
    assert!(r["payload"].get("seconds").is_none());
    assert!(r["meta"]["seconds"].as_f64().is_some());
    assert!(r["meta"]["timings"].get("/seconds").is_some());
}

#[test]
fn output_formats() {
    let out = zerosum(&["census-t11", "--group", "metacyclic:2,3,2", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,sequence,form");
    assert_eq!(lines.len(), 8);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 3));

    let out = zerosum(&["lemmas", "--group", "metacyclic:2,3,2", "--format", "jsonl", "--trials", "20"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(rows.len() > 10);
    assert!(rows[..rows.len() - 1].iter().all(|r| r["failures"] == 0));
    assert_eq!(rows.last().unwrap()["status"], "complete");
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.lines().all(|l| l.starts_with("PASS ")));

    assert_eq!(code(&["davenport", "--group", "cyclic:4", "--format", "csv"]), 2);
}

#[test]
fn products_task() {
    let (c, r) = report(&["products", "--group", "metacyclic:2,3,2", "--sequence", "x.x*y.x*y^2", "--length", "2"]);
    assert_eq!(c, 0);
    assert_eq!(r["payload"]["product_one_free"], true);
    assert_eq!(r["payload"]["pi"], serde_json::json!(["x", "x*y", "x*y^2"]));
    assert_eq!(r["payload"]["pi_n"]["set"], serde_json::json!(["y", "y^2"]));
}

#[test]
fn out_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    assert_eq!(code(&["davenport", "--group", "metacyclic:2,3,2", "--out", path.to_str().unwrap()]), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["payload"]["value"], 3);
}

#[test]
fn interrupted_census_resumes_to_the_same_payload() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp");
    std::fs::create_dir(&cp).unwrap();
    let (cp_s, full, part) = (cp.to_str().unwrap(), dir.path().join("full.json"), dir.path().join("part.json"));
    let first = code(&["census-t12", "--group", "metacyclic:2,5,4", "--node-cap", "30000", "--checkpoint-dir", cp_s, "--out", part.to_str().unwrap()]);
    assert_eq!(first, 4);
    let mut last = first;
    for _ in 0..100 {
        last = code(&["--resume", "--checkpoint-dir", cp_s, "--node-cap", "30000", "--out", part.to_str().unwrap()]);
        if last != 4 {
            break;
        }
    }
    assert_eq!(last, 0);
    assert_eq!(code(&["census-t12", "--group", "metacyclic:2,5,4", "--out", full.to_str().unwrap()]), 0);
    assert_eq!(payload_bytes(&part), payload_bytes(&full));
}

#[test]
fn bad_checkpoints_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&["davenport", "--group", "metacyclic:2,3,2", "--checkpoint-dir", d, "--resume"]), 2);
    assert_eq!(code(&["census-t11", "--group", "metacyclic:2,3,2", "--checkpoint-dir", d]), 0);
    assert!(dir.path().join("checkpoint.json").exists());
    assert_eq!(code(&["census-t12", "--checkpoint-dir", d, "--resume"]), 3);
    assert_eq!(code(&["--group", "metacyclic:2,5,4", "--checkpoint-dir", d, "--resume"]), 3);
    assert_eq!(code(&["--checkpoint-dir", d, "--resume"]), 0);
    std::fs::write(dir.path().join("checkpoint.json"), "{ not json").unwrap();
    assert_eq!(code(&["--checkpoint-dir", d, "--resume"]), 3);
    std::fs::write(dir.path().join("checkpoint.json"), "{}").unwrap();
    assert_eq!(code(&["--checkpoint-dir", d, "--resume"]), 3);
    // A fresh run discards whatever is there.
    assert_eq!(code(&["census-t11", "--group", "metacyclic:2,3,2", "--checkpoint-dir", d]), 0);
}

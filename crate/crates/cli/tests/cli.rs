use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hallplane"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    (out.status.code().unwrap(), v)
}

fn claim_status(v: &Value, id: &str) -> String {
    v["claims"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == id)
        .unwrap_or_else(|| panic!("claim {id} missing from {v}"))["status"]
        .as_str()
        .unwrap()
        .to_string()
}

#[test]
fn affirmed_question_exits_zero() {
    let (code, v) = report(&["question", "3p1", "--p", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["tool"], "hallplane");
    assert_eq!(v["plane"]["order"], 9);
    assert_eq!(v["plane"]["r"], 0);
    assert_eq!(v["plane"]["s"], 2);
    assert_eq!(v["result"]["affirmed"], true);
    assert_eq!(v["result"]["pairs"], 30);
    assert_eq!(claim_status(&v, "3p1-affirmed"), "pass");
}

#[test]
fn failed_claim_exits_one() {
    let (code, v) = report(&["question", "3p3", "--p", "3"]);
    assert_eq!(v["result"]["affirmed"], false);
    assert_eq!(claim_status(&v, "hall-plane-not-pappian"), "pass");
    assert_eq!(code, 0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("claims.json");
    let manifest = serde_json::json!({"claims": [{
        "id": "hall-pappian",
        "statement": "The Hall plane of order 9 is Pappian",
        "command": "question",
        "subject": "3p3",
        "plane": "hall",
        "expect": true
    }]});
    std::fs::write(&path, manifest.to_string()).unwrap();
    let out = run(&["question", "3p3", "--p", "3", "--format", "text", "--claims", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hall-pappian"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("claim hall-pappian: FAIL"));

}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["question", "3p9"]).status.code(), Some(2));
    let out = run(&["question", "3p1", "--p", "3", "--r", "0", "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("root"));
    assert_eq!(run(&["question", "3p1", "--r", "1"]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "no-such-case"]).status.code(), Some(2));
    let out = run(&["question", "3p3", "--oracle", "--pairs", "canonical"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_ms");
        v
    };
    for args in [
        &["question", "3p2", "--p", "3", "--pairs", "all"][..],
        &["witness", "non-pappus", "--p", "3"][..],
        &["suite", "groups", "--p", "3"][..],
        &["sweep", "bf-nbf-gamma-zero", "--p", "5"][..],
    ] {
        let (_, a) = report(args);
        let (_, b) = report(args);
        assert!(a["wall_time_ms"].is_u64());
        assert_eq!(strip(a), strip(b), "{args:?}");
    }
}

#[test]
fn no_timings_inside_result() {
    let (_, v) = report(&["sweep", "bf-nbf-gamma-nonzero", "--p", "5"]);
    assert!(!v["result"].to_string().contains("elapsed_ms"));
    assert_eq!(claim_status(&v, "constructions-pappus"), "pass");
}

#[test]
fn export_writes_incidence_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h9.inc");
    let out = run(&["plane", "export", "--p", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 92);
    assert_eq!(lines[0], "91 91");
    for row in &lines[1..] {
        let pts: Vec<usize> = row.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(pts.len(), 10);
        assert!(pts.iter().all(|&p| p < 91));
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }
}

#[test]
fn text_format_lists_claims() {
    let out = run(&["suite", "axioms", "--p", "2", "--k", "2", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("claim axioms: PASS"));
    assert!(text.contains("claim hall-not-a-field: PASS"));
}

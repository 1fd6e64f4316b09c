//! Exit-code and round-trip behavior of the command-line interface.
//! Exit codes are the machine contract: 0 pass/ok, 1 verification failure,
//! 2 input or I/O error, 3 inconclusive, 4 integrity failure.

use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdscert"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

const GOOD_SET: &str = r#"{"group":"Z3^2","elements":[[0,1],[0,2],[1,0],[2,0]]}"#;

#[test]
fn verify_passes_a_known_set() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    fs::write(&path, GOOD_SET).unwrap();
    let output = run(&["verify", "Z3^2", path.to_str().unwrap(), "9,4,1,2"]);
    assert_eq!(code(&output), 0);
    let report = stdout(&output);
    assert!(report.contains("result: PASS"));
    assert!(report.contains("regular: yes"));
    assert!(report.contains("trivial: no"));
    assert!(report.contains("lmt-closed: yes"));
    assert!(report.contains("overall: PASS (1/1 sets)"));
}

#[test]
fn verify_fails_on_swapped_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    fs::write(&path, GOOD_SET).unwrap();
    let output = run(&["verify", "Z3^2", path.to_str().unwrap(), "9,4,2,1"]);
    assert_eq!(code(&output), 1);
    let report = stdout(&output);
    assert!(report.contains("spectrum: FAIL"));
    assert!(report.contains("overall: FAIL"));
}

#[test]
fn verify_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();

    let truncated = dir.path().join("truncated.json");
    fs::write(&truncated, &GOOD_SET[..GOOD_SET.len() - 10]).unwrap();
    let output = run(&["verify", "Z3^2", truncated.to_str().unwrap(), "9,4,1,2"]);
    assert_eq!(code(&output), 2);

    let good = dir.path().join("set.json");
    fs::write(&good, GOOD_SET).unwrap();
    // group on the command line disagrees with the file
    let output = run(&["verify", "Z2^3xZ3^3", good.to_str().unwrap(), "9,4,1,2"]);
    assert_eq!(code(&output), 2);
    // unreadable path
    let output = run(&["verify", "Z3^2", "/nonexistent/set.json", "9,4,1,2"]);
    assert_eq!(code(&output), 2);
    // malformed parameter quadruple
    let output = run(&["verify", "Z3^2", good.to_str().unwrap(), "9,4,1"]);
    assert_eq!(code(&output), 2);
    // wrong arity in an element vector
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"group":"Z3^2","elements":[[0,1,2]]}"#).unwrap();
    let output = run(&["verify", "Z3^2", bad.to_str().unwrap(), "9,1,0,0"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn certify_exit_codes_follow_the_verdict() {
    let output = run(&["certify", "216,40,4,8"]);
    assert_eq!(code(&output), 0);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(cert["overall"], "NONEXISTENT");
    assert_eq!(cert["group"], "Z2^3xZ3^3");

    let output = run(&["certify", "216,43,10,8"]);
    assert_eq!(code(&output), 0);

    let output = run(&["certify", "9,4,1,2"]);
    assert_eq!(code(&output), 3);
    let cert: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(cert["overall"], "INCONCLUSIVE");

    let output = run(&["certify", "not-params"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn certify_writes_the_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let output = run(&["certify", "216,40,4,8", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&output), 0);
    assert!(stdout(&output).is_empty());
    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["overall"], "NONEXISTENT");
    assert_eq!(cert["params"]["delta"], 144);
}

#[test]
fn certify_accepts_the_pruning_flag() {
    let output = run(&["certify", "216,40,4,8", "--prune-automorphisms", "--jobs", "2"]);
    assert_eq!(code(&output), 0);
}

#[test]
fn solve_c_lists_solutions_one_per_line() {
    let output = run(&["solve-c", "20", "48", "13"]);
    assert_eq!(code(&output), 0);
    let body = stdout(&output);
    assert_eq!(body.lines().count(), 8);
    assert_eq!(body.lines().next().unwrap(), "5 3 2 1 1 1 1 1 1 1 1 1 1");
    assert_eq!(body.lines().last().unwrap(), "3 3 3 2 2 2 2 2 1 0 0 0 0");

    let output = run(&["solve-c", "18", "32", "13"]);
    assert_eq!(stdout(&output).lines().count(), 3);

    // infeasible targets produce an empty list, not an error
    let output = run(&["solve-c", "20", "30", "13"]);
    assert_eq!(code(&output), 0);
    assert!(stdout(&output).is_empty());

    // zero length is a usage error
    let output = run(&["solve-c", "1", "1", "0"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn plane_exports_thirteen_blocks() {
    let output = run(&["plane", "Z2^3xZ3^3"]);
    assert_eq!(code(&output), 0);
    let body = stdout(&output);
    assert_eq!(body.lines().count(), 13);
    for line in body.lines() {
        assert_eq!(line.split(' ').count(), 4);
    }
    // unsupported and malformed groups are input errors
    assert_eq!(code(&run(&["plane", "Z3^2"])), 2);
    assert_eq!(code(&run(&["plane", "what"])), 2);
}

#[test]
fn search_output_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("found.json");
    let output = run(&["search", "Z3^2", "9,4,1,2", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&output), 0);
    let found: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(found.as_array().unwrap().len(), 6);
    assert!(found[0]["trivial"] == false);

    let verify = run(&["verify", "Z3^2", path.to_str().unwrap(), "9,4,1,2"]);
    assert_eq!(code(&verify), 0);
    assert!(stdout(&verify).contains("overall: PASS (6/6 sets)"));
}

#[test]
fn search_flags_trivial_hits_and_empty_results() {
    let output = run(&["search", "Z2^2", "4,3,2,0"]);
    assert_eq!(code(&output), 0);
    let found: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(found.as_array().unwrap().len(), 1);
    assert!(found[0]["trivial"] == true);

    let output = run(&["search", "Z4", "4,2,1,0"]);
    assert_eq!(code(&output), 0);
    assert_eq!(stdout(&output).trim(), "[]");

    // group order disagreeing with v is an input error
    let output = run(&["search", "Z3^2", "216,40,4,8"]);
    assert_eq!(code(&output), 2);
}

#[test]
fn search_timeout_reports_a_partial_result() {
    let output = run(&["search", "Z2^3xZ3^3", "216,40,4,8", "--timeout", "0"]);
    assert_eq!(code(&output), 0);
    let stderr = String::from_utf8(output.stderr.clone()).unwrap();
    assert!(stderr.contains("stopped early"));
}

#[test]
fn help_is_not_an_error_but_bad_usage_is() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["certify", "--help"])), 0);
    assert_eq!(code(&run(&["no-such-command"])), 2);
    assert_eq!(code(&run(&[])), 2);
    assert_eq!(code(&run(&["certify"])), 2);
}

//! End-to-end tests driving the compiled binary.

use std::process::{Command, Output};

fn commgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_commgraph"))
        .args(args)
        .env_remove("COMMGRAPH_GUARD")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn diameter_record_is_exact() {
    let out = commgraph(&["diameter", "--n", "2", "--m", "4", "--output", "records"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "record=diameter domain=M(2,Z_4) vertices=252 components=1 diameter=3\n"
    );
}

#[test]
fn disconnected_graph_reports_inf() {
    let out = commgraph(&[
        "diameter", "--n", "2", "--m", "2", "--domain", "gl", "--output", "records",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("vertices=5"), "unexpected: {text}");
    assert!(text.contains("components=4"), "unexpected: {text}");
    assert!(text.contains("diameter=inf"), "unexpected: {text}");
}

#[test]
fn records_are_byte_deterministic() {
    let args = [
        "verify", "--suite", "dets", "--n", "2", "--m", "6", "--trials", "100", "--seed",
        "7", "--output", "records",
    ];
    let first = commgraph(&args);
    let second = commgraph(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).contains("status=pass"));
}

#[test]
fn path_command_certifies_and_crosschecks() {
    let out = commgraph(&[
        "path", "--n", "2", "--m", "6", "--x", "2:6:[1,1,0,1]", "--y", "2:6:[1,0,1,1]",
        "--output", "records",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("len=3"), "unexpected: {text}");
    assert!(text.contains("verified=true"), "unexpected: {text}");
    assert!(text.contains("check=pass"), "unexpected: {text}");
    assert!(text.contains("bfs=3"), "unexpected: {text}");
}

#[test]
fn path_accepts_encoded_indices() {
    // 16 and 4 encode the two one-entry nilpotents over Z_4.
    let out = commgraph(&[
        "path", "--n", "2", "--m", "4", "--x", "16", "--y", "4", "--output", "records",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("path=2:4:[0,1,0,0]~"), "unexpected: {text}");
    assert!(text.contains("check=pass"), "unexpected: {text}");
}

#[test]
fn unknown_flag_exits_one() {
    let out = commgraph(&["diameter", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_suite_exits_one() {
    let out = commgraph(&["verify", "--suite", "nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn guard_flag_exits_two() {
    let out = commgraph(&["diameter", "--n", "2", "--m", "4", "--guard", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("guard"));
}

#[test]
fn guard_env_var_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_commgraph"))
        .args(["diameter", "--n", "2", "--m", "4"])
        .env("COMMGRAPH_GUARD", "10")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn central_endpoint_exits_three() {
    let out = commgraph(&[
        "path", "--n", "2", "--m", "6", "--x", "2:6:[1,0,0,1]", "--y", "2:6:[1,1,0,1]",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("not a vertex"));
}

#[test]
fn prime_modulus_exits_four() {
    let out = commgraph(&[
        "path", "--n", "2", "--m", "5", "--x", "2:5:[1,1,0,1]", "--y", "2:5:[1,0,1,1]",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("out of scope for constructive oracle"));
}

#[test]
fn dot_export_lists_every_vertex() {
    let out = commgraph(&["export", "--n", "2", "--m", "2", "--format", "dot"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("label=").count(), 14);
    assert!(text.starts_with("graph commuting {"));
}

#[test]
fn csv_export_round_trips() {
    let out = commgraph(&["export", "--n", "2", "--m", "2", "--format", "csv"]);
    assert!(out.status.success());
    let edges = commgraph::parse_csv_edges(&stdout(&out)).expect("well-formed csv");
    assert!(!edges.is_empty());
    let mut sorted = edges.clone();
    sorted.sort_unstable();
    assert_eq!(edges, sorted);
}

#[test]
fn export_writes_file() {
    let dir = std::env::temp_dir();
    let path = dir.join(format!("commgraph-cli-test-{}.dot", std::process::id()));
    let path_text = path.to_str().expect("utf8 temp path");
    let out = commgraph(&[
        "export", "--n", "2", "--m", "2", "--format", "dot", "--out", path_text,
    ]);
    assert!(out.status.success());
    let written = std::fs::read_to_string(&path).expect("file written");
    assert!(written.contains("graph commuting {"));
    std::fs::remove_file(&path).ok();
}

#[test]
fn component_suite_passes_over_prime_field() {
    let out = commgraph(&["verify", "--suite", "component", "--m", "3", "--output", "records"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("status=pass"));
}

#[test]
fn path_exhaustive_suite_covers_all_pairs() {
    let out = commgraph(&[
        "verify", "--suite", "path-exhaustive", "--domain", "gl", "--n", "2", "--m", "4",
        "--output", "records",
    ]);
    assert!(out.status.success());
    // 94 vertices, 94 * 93 ordered pairs.
    assert!(stdout(&out).contains("trials=8742"), "unexpected: {}", stdout(&out));
}

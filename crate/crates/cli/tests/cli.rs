use std::path::PathBuf;
use std::process::{Command, Output};

fn scott(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scott")).args(args).output().expect("binary runs")
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("scott-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn thin_traces_match_golden_files() {
    for (alpha, stages, file) in [("w", "6", "thin_w_6.json"), ("w^2", "12", "thin_w2_12.json")] {
        let out = scratch(file);
        let o = scott(&["thin", "build", "--alpha", alpha, "--stages", stages, "--trace", out.to_str().unwrap()]);
        assert!(o.status.success());
        let got = std::fs::read_to_string(&out).unwrap();
        let want = std::fs::read_to_string(golden(file)).unwrap();
        assert_eq!(got.trim_end(), want.trim_end(), "trace for {alpha} drifted");
    }
}

#[test]
fn scott_rank_of_two_chain() {
    let o = scott(&["bf", "scott-rank", "--struct", golden("two_chain.json").to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2");
}

#[test]
fn derived_rank_suite_passes() {
    let o = scott(&["verify", "derived-rank", "--exhaustive-nodes", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("[PASS] derived-rank"));
}

#[test]
fn injected_fault_names_the_invariant() {
    let o = scott(&["verify", "coding", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("u_cycles"));
}

#[test]
fn tight_budget_skips() {
    let o = scott(&["verify", "thin", "--time-limit", "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("[SKIP] thin"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(scott(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(scott(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(scott(&["ordinal", "eval", "w+"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let run = || stdout(&scott(&["--json", "--seed", "7", "verify", "coding", "--random-structures", "20"]));
    let first = run();
    assert!(first.contains("\"status\": \"pass\""));
    assert_eq!(first, run());
}

#[test]
fn code_round_trip_through_files() {
    let star = scratch("star.json");
    let a = golden("two_chain.json");
    let o = scott(&["code", "encode", "--struct", a.to_str().unwrap(), "--pair", "3,5", "--out", star.to_str().unwrap()]);
    assert!(o.status.success());
    let o = scott(&["code", "decode", "--star", star.to_str().unwrap(), "--pair", "3,5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(r#""tuples":[[0,1]]"#));
    let o = scott(&["code", "decode", "--star", star.to_str().unwrap(), "--pair", "3,4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(scott(&["code", "verify", "--star", star.to_str().unwrap()]).status.success());
}

#[test]
fn morozov_view_feeds_classification() {
    let s = scratch("view.json");
    let o = scott(&["morozov", "build", "--brackets", "(()())", "--levels", "2", "--out", s.to_str().unwrap()]);
    assert!(o.status.success());
    let o = scott(&["--json", "bf", "classify", "--struct", s.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["automorphisms"], 1);
}

#[test]
fn game_on_canonical_tree() {
    let o = scott(&["--json", "bf", "game", "--rank", "w*2", "--depth", "10", "--width", "4", "--element", "1", "--beta", "2"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["criterion"], false);
    assert_eq!(v["game"]["outcome"], "consistent");
}

#[test]
fn ordinal_eval_and_dot_export() {
    let o = scott(&["ordinal", "eval", "w*2+w"]);
    assert_eq!(stdout(&o).trim(), "w*3 (limit)");
    let o = scott(&["export", "dot", "--alpha", "w", "--stages", "3"]);
    assert!(stdout(&o).starts_with("digraph tree {"));
}

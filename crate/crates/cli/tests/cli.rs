use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(rel)
}

fn dinf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dinf")).args(args).output().expect("run dinf")
}

fn dinf_at(args: &[&str], file: &str) -> Output {
    let path = fixture(file);
    let mut all: Vec<&str> = args.to_vec();
    all.push(path.to_str().unwrap());
    dinf(&all)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

#[test]
fn check_accepts_valid_files() {
    for f in ["chain3.poset", "eps/c2-c3.json", "chain-diagram", "equations/lift.eq", "internal/two.presheaf"] {
        let o = dinf_at(&["check"], f);
        assert_eq!(code(&o), 0, "{f}: {}", stdout(&o));
        assert!(stdout(&o).starts_with("valid"));
    }
}

#[test]
fn check_rejects_non_reflexive_relation() {
    let o = dinf_at(&["check"], "not-reflexive.json");
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("not reflexive"));
}

#[test]
fn missing_file_is_a_usage_error() {
    let o = dinf_at(&["check"], "no-such-file.poset");
    assert_eq!(code(&o), 1);
    let o = dinf_at(&["bilimit"], "no-such-diagram");
    assert_eq!(code(&o), 1);
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let o = dinf(&["verify", "--no-such-flag"]);
    assert_ne!(code(&o), 0);
    assert_ne!(code(&o), 2);
}

#[test]
fn single_object_bilimit_is_the_object() {
    let o = dinf_at(&["bilimit", "--format", "json"], "single");
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["apex_size"], 3);
    assert_eq!(v["pass"], true);
}

#[test]
fn chain_diagram_bilimit_is_the_top() {
    let o = dinf_at(&["bilimit", "--format", "json"], "chain-diagram");
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["apex_size"], 4);
}

#[test]
fn partial_diagram_from_the_empty_poset() {
    let o = dinf_at(&["bilimit", "--format", "json"], "partial-empty-start");
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["mode"], "partial");
    assert_eq!(v["apex_size"], 1);
}

#[test]
fn broken_functoriality_is_rejected() {
    let o = dinf_at(&["bilimit"], "broken-functoriality");
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("functoriality"));
    let o = dinf_at(&["check"], "broken-functoriality");
    assert_eq!(code(&o), 2);
}

#[test]
fn mode_mismatch_is_a_usage_error() {
    let o = dinf_at(&["bilimit", "--mode", "total"], "partial-empty-start");
    assert_eq!(code(&o), 1);
}

#[test]
fn internal_fixture_bilimit_passes() {
    let o = dinf_at(&["bilimit", "--format", "json"], "internal/partial-support");
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(json(&o)["pass"], true);
}

#[test]
fn verify_with_no_cases() {
    let o = dinf(&["verify", "--count", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["count"], 0);
}

#[test]
fn verify_small_objects_and_single_case() {
    let o = dinf(&["verify", "--seed", "3", "--count", "20", "--max-object", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["passed"], 20);
    let o = dinf(&["verify", "--mode", "partial", "--seed", "3", "--case", "7"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["cases"][0]["case"], 7);
}

#[test]
fn verify_output_is_deterministic() {
    let a = dinf(&["verify", "--mode", "partial", "--seed", "9", "--count", "10"]);
    let b = dinf(&["verify", "--mode", "partial", "--seed", "9", "--count", "10"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn solve_lift_chain() {
    let o = dinf_at(&["solve", "--format", "json"], "equations/lift.eq");
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["sizes"], serde_json::json!([0, 1, 2, 3, 4]));
    assert_eq!(v["pass"], true);
}

#[test]
fn solve_depth_flag_overrides_file() {
    let o = dinf_at(&["solve", "--depth", "2", "--format", "json"], "equations/lift.eq");
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["sizes"], serde_json::json!([0, 1, 2]));
}

#[test]
fn solve_function_space_over_sierpinski() {
    let o = dinf_at(&["solve"], "equations/arrow-sierpinski.eq");
    assert_eq!(code(&o), 0);
    let rows: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| l.trim_start().starts_with(|c: char| c.is_ascii_digit()))
        .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
        .collect();
    assert_eq!(rows, ["2", "3", "10"]);
}

#[test]
fn solve_without_a_starting_ep_fails() {
    let o = dinf_at(&["solve"], "equations/arrow-empty.eq");
    assert_eq!(code(&o), 2);
}

#[test]
fn omegabar_passes() {
    let o = dinf(&["omegabar", "--depth", "4"]);
    assert_eq!(code(&o), 0);
    assert!(!stdout(&o).contains("FAIL"));
    let o = dinf(&["omegabar", "--mode", "total"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn export_formats() {
    let o = dinf_at(&["export", "--format", "dot"], "chain3.poset");
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("digraph"));
    let o = dinf_at(&["export", "--format", "json"], "chain2.poset");
    assert_eq!(json(&o)["elements"].as_array().unwrap().len(), 2);
    let o = dinf_at(&["export", "--format", "json"], "chain-diagram");
    assert_eq!(code(&o), 0);
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("dinf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("apex.json");
    let o = dinf_at(&["bilimit", "--format", "json", "--out", out.to_str().unwrap()], "single");
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["apex_size"], 3);
    std::fs::remove_dir_all(&dir).ok();
}

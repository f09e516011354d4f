use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

use koszul_perturb::connection::CurvatureInput;
use koszul_perturb::rng::stream;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_koszul-perturb")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("koszul-perturb-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn verify_passing_suite() {
    let out = run(&["verify", "koszul", "--d", "2", "--e", "1", "--m", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["overall"], Value::Bool(true));
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(v["checks"][0].get("elapsed_ms").is_none());
}

#[test]
fn verify_output_is_reproducible() {
    let a = run(&["verify", "combinatorics", "--d", "1", "--e", "1", "--m", "2"]);
    let b = run(&["verify", "combinatorics", "--d", "1", "--e", "1", "--m", "2"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_failing_suite_exits_one() {
    let out = run(&["verify", "todd", "--d", "2", "--e", "2", "--m", "3", "--text"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS todd.main_theorem"));
    assert!(text.contains("FAIL todd.single_step"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "koszul", "--d", "9"]).status.code(), Some(2));
    assert_eq!(run(&["todd", "--input", "/nonexistent/r.json"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn todd_routes_agree() {
    let r = CurvatureInput::random_integrable(2, 3, &mut stream(11, "cli"));
    let input = temp_file("r.json", &r.to_json());
    let out = run(&["todd", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["routes_agree"], Value::Bool(true));
    assert_eq!(v["terms"][0]["c"], Value::String("1/1".into()));
    let exp = json_of(&run(&["todd", "--input", input.to_str().unwrap(), "--route", "exp"]));
    assert_eq!(exp["terms"], v["terms"]);
    assert!(exp.get("routes_agree").is_none());
}

#[test]
fn todd_rejects_large_models() {
    let input = temp_file("big.json", r#"{"d":4,"e":1,"entries":[]}"#);
    assert_eq!(run(&["todd", "--input", input.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn qsigma_on_top_form() {
    let r = CurvatureInput::random_integrable(2, 2, &mut stream(4, "cli"));
    let input = temp_file("q.json", &r.to_json());
    let eta = temp_file("eta.json", r#"[{"w":[],"s":[],"a":[],"b":[1,2],"c":"1"}]"#);
    let out = run(&["qsigma", "--input", input.to_str().unwrap(), "--eta", eta.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["asserted"], Value::Bool(true));
    assert_eq!(v["equal"], Value::Bool(true));
    assert_eq!(v["q_of_eta"], v["todd_contract_eta"]);

    let low = temp_file("low.json", r#"[{"w":[],"s":[],"a":[],"b":[1],"c":"1"}]"#);
    let v = json_of(&run(&["qsigma", "--input", input.to_str().unwrap(), "--eta", low.to_str().unwrap()]));
    assert_eq!(v["asserted"], Value::Bool(false));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("koszul-perturb-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = run(&["verify", "combinatorics", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["suite"], Value::String("combinatorics".into()));
}

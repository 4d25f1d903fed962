use std::process::{Command, Output};

use serde_json::Value;

const QUADRANT: &str = r#"{"dim": 2, "generators": [["1", "0"], ["0", "1"]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conecalc")).args(args).env_remove("CONECALC_SEED").output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn verify_passes_on_a_quadrant() {
    let o = run(&["verify", "--identity", "langlands_1", "--cone", QUADRANT, "--samples", "200"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 1);
}

#[test]
fn malformed_cone_exits_with_two() {
    let o = run(&["verify", "--identity", "euler", "--cone", r#"{"dim": 2, "inequalities": [["1"]]}"#]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("row of length 1"));
    let o = run(&["verify", "--identity", "euler", "--cone", "/no/such/file.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["verify", "--identity", "nonsense", "--cone", QUADRANT]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn transform_value_and_monte_carlo() {
    let o = run(&["transform", "--cone", QUADRANT, "--lambda", "-1,-2", "--mc", "--samples", "200000"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["value"]["exact"], "1/2");
    assert_eq!(v["agrees"], true);
}

#[test]
fn fan_figures_suite_writes_both_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["suite", "fan-figures", "--out-dir", out]);
    assert_eq!(o.status.code(), Some(0));
    for f in ["fig6.svg", "fig7.svg"] {
        let s = std::fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(s.starts_with("<svg"));
    }
    assert_eq!(json(&o)["passed"], true);
    assert_eq!(run(&["suite", "nope"]).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_stable() {
    let a = run(&["figure", "fig3", "--output", "svg"]);
    let b = run(&["figure", "fig3", "--output", "svg"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let a = run(&["suite", "eisenstein"]);
    let b = run(&["suite", "eisenstein"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(!String::from_utf8_lossy(&a.stdout).contains("elapsed_ms"));
    let t = run(&["--timing", "suite", "roots"]);
    assert!(String::from_utf8_lossy(&t.stdout).contains("elapsed_ms"));
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_conecalc"))
        .args(["verify", "--identity", "bgs_angle", "--cone", QUADRANT, "--samples", "100"])
        .env("CONECALC_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(json(&o)["seed"], 77);
    let o = Command::new(env!("CARGO_BIN_EXE_conecalc"))
        .args(["verify", "--identity", "bgs_angle", "--cone", QUADRANT, "--samples", "100", "--seed", "5"])
        .env("CONECALC_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(json(&o)["seed"], 5);
}

#[test]
fn period_on_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let form = dir.path().join("form.json");
    std::fs::write(&form, r#"{"cells": {"({1},{2})": [{"lambda_re": ["-5/2"]}]}}"#).unwrap();
    let f = form.to_str().unwrap();
    let o = run(&["period", "--config", "gl1_in_gl2_corner", "--form", f, "--expansion", "--check-integrability"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    // μ = −5/2 + 1/2 = −2 on the positive ray
    assert_eq!(v["value"]["exact"], "1/2");
    assert_eq!(v["integrable"], true);
    assert_eq!(v["constant_term_matches"], true);
    assert_eq!(v["agrees"], true);
    std::fs::write(&form, r#"{"cells": {"({1},{2})": [{"lambda_re": ["-1/2"]}]}}"#).unwrap();
    let o = run(&["period", "--config", "gl1_in_gl2_corner", "--form", f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not xi-regular"));
}

#[test]
fn eisenstein_poles() {
    let o = run(&["eisenstein", "--config", "gl2_diag_in_gl2xgl2", "--c", "1", "--T", "1, -1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["poles"], serde_json::json!(["0"]));
    assert_eq!(v["terms"][0]["c_q"], "1/2");
}

#[test]
fn fan_report_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("fan.svg");
    let js = dir.path().join("fan.json");
    let o = run(&[
        "fan",
        "--config",
        "gl2_in_gl3_corner",
        "--emit-svg",
        svg.to_str().unwrap(),
        "--emit-json",
        js.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["cells"].as_array().unwrap().len(), 8);
    assert_eq!(std::fs::read(&js).unwrap(), o.stdout);
    assert!(std::fs::read_to_string(&svg).unwrap().contains("</svg>"));
    let o = run(&["figure", "fig3", "--cone", r#"{"dim": 3, "generators": [["1","0","0"]]}"#, "--T", "1,0,0"]);
    assert_eq!(o.status.code(), Some(2));
}

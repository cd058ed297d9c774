//! Exit-code contract, JSON report shape, and round-trip of the shipped
//! instance files.

use std::process::Command;

use skewclifford::instance::{self, InstanceFile};

const BIN: &str = env!("CARGO_BIN_EXE_skewclifford");

fn root() -> String {
    format!("{}/../..", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn inst(name: &str) -> String {
    format!("{}/instances/{name}.json", root())
}

#[test]
fn validate_exit_codes() {
    let (code, out, _) = run(&["validate", &inst("example_lambda1")]);
    assert_eq!(code, 0);
    assert!(out.contains("valid: true"));

    // mu12 * mu21 != 1
    let bad = format!("{}/bad_mu.json", std::env::temp_dir().display());
    std::fs::write(
        &bad,
        r#"{"field": "rationals", "n": 2,
            "mu": [["1", "3"], ["2", "1"]],
            "matrices": [[["0","1"],["2","0"]], [["2","0"],["0","2"]]]}"#,
    )
    .unwrap();
    let (code, out, _) = run(&["validate", &bad]);
    assert_eq!(code, 1, "invalid instance must exit 1");
    assert!(out.contains("valid: false"));

    let (code, _, err) = run(&["validate", "/nonexistent/file.json"]);
    assert_eq!(code, 2, "unreadable file must exit 2");
    assert!(!err.is_empty());

    let garbled = format!("{}/garbled.json", std::env::temp_dir().display());
    std::fs::write(&garbled, "{ not json").unwrap();
    let (code, _, _) = run(&["validate", &garbled]);
    assert_eq!(code, 2, "malformed JSON must exit 2");
}

#[test]
fn negative_verdicts_exit_zero() {
    let (code, out, _) = run(&["bpf", &inst("example_lambda0")]);
    assert_eq!(code, 0, "a computed negative verdict is not an error");
    assert!(out.contains("base_point_free: false"));
    assert!(out.contains("witness: ((0,1),(0,1))"));
}

#[test]
fn json_reports_are_wrapped_and_parse() {
    for sub in ["validate", "quadrics", "normalize", "bpf", "hilbert", "analyze"] {
        let (code, out, _) = run(&[sub, &inst("example_lambda1"), "--output", "json"]);
        assert_eq!(code, 0, "{sub} failed");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["tool"], "skewclifford");
        assert_eq!(v["command"], sub);
        assert!(v["report"].is_object(), "{sub} report missing");
        assert!(v["timing_ms"].is_number());
    }
}

#[test]
fn json_reports_deterministic_modulo_timing() {
    let strip = |out: String| -> serde_json::Value {
        let mut v: serde_json::Value = serde_json::from_str(&out).unwrap();
        v.as_object_mut().unwrap().remove("timing_ms");
        v
    };
    let (_, a, _) = run(&["analyze", &inst("example_lambda1"), "--output", "json"]);
    let (_, b, _) = run(&["analyze", &inst("example_lambda1"), "--output", "json"]);
    assert_eq!(strip(a), strip(b));
}

#[test]
fn shipped_instances_round_trip() {
    for name in [
        "example_lambda0",
        "example_lambda1",
        "example_lambda2",
        "example_lambda_m1",
    ] {
        let text = std::fs::read_to_string(inst(name)).unwrap();
        let file: InstanceFile = serde_json::from_str(&text).unwrap();
        let printed = serde_json::to_string_pretty(&file).unwrap();
        let reparsed: InstanceFile = serde_json::from_str(&printed).unwrap();
        assert_eq!(file, reparsed, "round trip failed for {name}");
        instance::resolve_instance(&file).unwrap();
    }
}

#[test]
fn analyze_flag_overrides() {
    let (code, out, _) = run(&[
        "analyze",
        &inst("example_lambda1"),
        "--max-degree",
        "4",
        "--bpf-mode",
        "scan:7",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("hilbert dims: 1,2,3,4,5"));
    assert!(out.contains("scan"));
}

#[test]
fn hilbert_presentation_inputs() {
    let (code, out, _) = run(&[
        "hilbert",
        &inst("poly3"),
        "--presentation",
        "--max-degree",
        "5",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("hilbert dims: 1,3,6,10,15,21"));

    let (code, out, _) = run(&["hilbert", &inst("free2"), "--presentation"]);
    assert_eq!(code, 0);
    assert!(out.contains("1,2,4,8,16,32,64"));
    assert!(out.contains("exponential"));
}

#[test]
fn precedence_flag_changes_leading_terms() {
    // K[x1,x2]: the Hilbert data must not depend on the precedence
    let (_, a, _) = run(&["hilbert", &inst("poly2"), "--presentation"]);
    let (_, b, _) = run(&["hilbert", &inst("poly2"), "--presentation", "--precedence", "2,1"]);
    assert_eq!(a, b);
}

#[test]
fn search_grid_summary() {
    let (code, out, _) = run(&["search", &format!("{}/instances/grid.json", root())]);
    assert_eq!(code, 0);
    assert!(out.contains("summary:"));
    assert!(out.contains("normalizing=true, bpf=true: 6"));
    assert!(out.contains("normalizing=true, bpf=false: 3"));

    let (code, out, _) = run(&[
        "search",
        &format!("{}/instances/grid.json", root()),
        "--output",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["report"]["points"].as_array().unwrap().len(), 9);
}

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semifeq")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_z3() {
    let (code, v) = run_json(&["analyze", path(&data("z3.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["manifest"]["command"], "analyze");
    let r = &v["result"];
    assert_eq!(r["compatibility"]["compatible"], true);
    assert_eq!(r["involutive_automorphisms"].as_array().unwrap().len(), 2);
    assert_eq!(r["characters"].as_array().unwrap().len(), 4);
}

#[test]
fn analyze_nilpotent_monoid_reports_witness_failure() {
    let (code, v) = run_json(&["analyze", path(&data("monoid_1p0.json"))]);
    assert_eq!(code, 0);
    let c = &v["result"]["compatibility"];
    assert_eq!(c["compatible"], false);
    assert_eq!(c["prime_ideals"][0]["ideal"], serde_json::json!([1, 2]));
    assert_eq!(c["prime_ideals"][0]["witnesses"]["1"], Value::Null);
}

#[test]
fn analyze_trivial_and_bad_input() {
    let (code, v) = run_json(&["analyze", path(&data("trivial.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["characters"].as_array().unwrap().len(), 2);

    let out = run(&["analyze", path(&data("nonassoc.json"))]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(1·0)·1"), "{err}");

    let out = run(&["analyze", "/nonexistent/file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_then_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let ctx = data("z3_inversion.context.json");
    for d in ["g3.descriptor.json", "g1.descriptor.json", "f2.descriptor.json"] {
        let sol = dir.path().join(format!("{d}.out"));
        let (code, v) =
            run_json(&["generate", path(&ctx), path(&data(d)), "--json-out", sol.to_str().unwrap()]);
        assert_eq!(code, 0, "{d}");
        assert_eq!(v["result"]["certificate"]["exact_zero"], true);
        let (code, v) = run_json(&["verify", path(&ctx), sol.to_str().unwrap()]);
        assert_eq!(code, 0, "{d}");
        assert_eq!(v["result"]["within_tol"], true);
        let expected = &d[..2].to_uppercase();
        assert_eq!(v["result"]["family"], expected.as_str(), "{d}");
    }
}

#[test]
fn g1_echoes_theta() {
    let (code, v) = run_json(&["generate", path(&data("z3_inversion.context.json")), path(&data("g1.descriptor.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["values"]["f"], v["result"]["descriptor"]["theta"]);
}

#[test]
fn bad_descriptor_exits_three() {
    let out = run(&["generate", path(&data("z3_inversion.context.json")), path(&data("f1.descriptor.json"))]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("k must vanish on S²"));
}

#[test]
fn corrupted_solution_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let ctx = data("z3_inversion.context.json");
    let (code, mut v) = run_json(&["generate", path(&ctx), path(&data("g3.descriptor.json"))]);
    assert_eq!(code, 0);
    v["result"]["values"]["g"][1] = Value::String("5".into());
    std::fs::write(&sol, serde_json::to_string(&v).unwrap()).unwrap();
    let out = run(&["verify", path(&ctx), sol.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at pair"));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["result"]["residual"]["worst"].is_array());
}

#[test]
fn verify_accepts_float_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let s3 = 3f64.sqrt() / 2.0;
    let text = format!(r#"{{"values": {{"k": [[0,0],[0,{s3}],[0,{}]], "l": [[1,0],[-0.5,0],[-0.5,0]]}}}}"#, -s3);
    std::fs::write(&sol, text).unwrap();
    let (code, v) = run_json(&["verify", path(&data("z3_inversion.context.json")), sol.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["family"], "F2");
    assert_eq!(v["result"]["within_tol"], true);
}

#[test]
fn solve_null_dimension() {
    let (code, v) = run_json(&["solve-null", path(&data("z3_inversion.context.json"))]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["dimension"], 1);
}

#[test]
fn enumerate_counts() {
    for (up_to, count) in [("raw", 113), ("isomorphism", 24), ("anti", 18)] {
        let (code, v) = run_json(&["enumerate", "--order", "3", "--up-to", up_to, "--counts-only"]);
        assert_eq!(code, 0);
        assert_eq!(v["result"]["count"], count, "{up_to}");
    }
    let out = run(&["enumerate", "--order", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn oracle_small_orders() {
    for order in ["1", "2"] {
        let (code, v) = run_json(&["oracle", "--order", order, "--attempts", "40"]);
        assert_eq!(code, 0, "order {order}");
        assert_eq!(v["result"]["totals"]["unclassified_on_compatible"], 0);
    }
    assert_eq!(run(&["oracle", "--order", "4"]).status.code(), Some(2));
    assert_eq!(run(&["oracle", "--order", "2", "--attempts", "0"]).status.code(), Some(2));
}

#[test]
fn oracle_is_deterministic() {
    let args = ["oracle", "--order", "2", "--attempts", "30", "--seed", "7"];
    let (_, a) = run_json(&args);
    let (_, b) = run_json(&args);
    assert_eq!(a["result"], b["result"]);
}

#[test]
fn oracle_on_single_context() {
    let (code, v) = run_json(&["oracle", "--context", path(&data("monoid_1p0.context.json")), "--attempts", "30"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["contexts"].as_array().unwrap().len(), 1);
    assert_eq!(v["result"]["contexts"][0]["compatible"], false);
}

#[test]
fn window_families() {
    let (code, v) = run_json(&["window", "--builtin", "lattice2d", "--radius", "3", "--family", "f3", "--c", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["residual"]["exact_zero"], true);
    assert_eq!(v["result"]["window_size"], 49);

    let (code, _) = run_json(&["window", "--builtin", "lattice2d", "--family", "g4", "--alpha", "1", "--beta", "2"]);
    assert_eq!(code, 0);
    let (code, _) = run_json(&["window", "--builtin", "line", "--radius", "5", "--lambda", "2/3", "--family", "g3"]);
    assert_eq!(code, 0);
    let out = run(&["window", "--builtin", "line", "--lambda", "0", "--family", "g3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn json_out_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let res = run(&["solve-null", path(&data("z3_inversion.context.json")), "--quiet", "--json-out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0));
    assert!(res.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["manifest"]["command"], "solve-null");
    assert_eq!(v["manifest"]["seed"], 0x5eed);
}

use std::process::{Command, Output};

use serde_json::Value;

fn prodcoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prodcoh")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = prodcoh(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn klein_quadric_is_not_productive() {
    let v = json(&["productive", "--group", "C2xC2", "--field", "2", "--expr", "x^2+x*y+y^2"]);
    assert_eq!(v["status"], "No");
    assert_eq!(v["witness"]["kind"], "residue");
    for key in ["command", "group", "field", "class", "status", "certified_degree", "witness"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn quaternion_witness() {
    let v = json(&["semiproductive", "--group", "Q8", "--field", "2^2:1,1,1", "--expr", "a*x+y", "--cap", "4"]);
    assert_eq!(v["status"], "No");
    assert_eq!(v["witness"]["v"]["expr"], "a^2*x+y");
}

#[test]
fn ring_dims() {
    let v = json(&["ring", "--group", "C2xC2", "--field", "2", "--cap", "5"]);
    assert_eq!(v["witness"]["dims"], serde_json::json!([1, 2, 3, 4, 5, 6]));
}

#[test]
fn obstruction_report() {
    let v = json(&["obstruction", "--group", "C2xC2", "--expr", "x+y"]);
    assert_eq!(v["vanishes"], true);
    let v = json(&["obstruction", "--group", "C2xC2", "--expr", "x^2+x*y+y^2"]);
    assert_eq!(v["vanishes"], false);
    assert_eq!(v["residue_coords"], serde_json::json!(["0", "0", "0", "1"]));
}

#[test]
fn coordinates_round_trip() {
    let v = json(&["sq", "--group", "C2xC2", "--field", "2^2:1,1,1", "--expr", "x+a*y"]);
    let sq = &v["witness"]["sq"];
    let coords: Vec<String> = sq["coords"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    let arg = format!("{}:{}", sq["degree"], coords.join(","));
    let w = json(&["sq", "--group", "C2xC2", "--field", "2^2:1,1,1", "--coords", &arg]);
    assert_eq!(w["class"], *sq);
    let e = json(&["sq", "--group", "C2xC2", "--field", "2^2:1,1,1", "--expr", sq["expr"].as_str().unwrap()]);
    assert_eq!(e["class"], *sq);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["obstruction", "--group", "C2xC2", "--expr", "x^2+x*y+y^2", "--json", "--seed", "5"];
    let a = prodcoh(&args);
    let b = prodcoh(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    let bad_expr = prodcoh(&["productive", "--group", "C2xC2", "--expr", "x+*y"]);
    assert_eq!(bad_expr.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_expr.stderr).contains("parse error at 2"));
    let small_cap = prodcoh(&["productive", "--group", "C2xC2", "--expr", "x^2", "--cap", "3"]);
    assert_eq!(small_cap.status.code(), Some(2));
    let budget = prodcoh(&["ring", "--group", "C2xC2", "--resolution", "bar", "--cap", "12"]);
    assert_eq!(budget.status.code(), Some(3));
    let undefined = prodcoh(&["massey", "--group", "C2xC2", "--expr", "x", "--expr", "y", "--expr", "x"]);
    assert_eq!(undefined.status.code(), Some(2));
    let unknown = prodcoh(&["ring", "--group", "C5xC7"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn corrupted_group_file() {
    let dir = std::env::temp_dir().join(format!("prodcoh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(&path, r#"{"order": 2, "table": [[0, 1], [1, 1]]}"#).unwrap();
    let out = prodcoh(&["ring", "--group-file", path.to_str().unwrap(), "--cap", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Latin square"));
    std::fs::write(&path, r#"{"order": 2, "table": [[0, 1], [1, 0]]}"#).unwrap();
    let v = json(&["ring", "--group-file", path.to_str().unwrap(), "--cap", "3"]);
    assert_eq!(v["witness"]["dims"], serde_json::json!([1, 1, 1, 1]));
}

#[test]
fn selftest_single_check() {
    let out = prodcoh(&["selftest", "--only", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("[PASS]  1"));
}

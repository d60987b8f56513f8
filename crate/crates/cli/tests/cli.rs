use std::process::{Command, Output};

use serde_json::Value;

fn cycov(args: &[&str]) -> (Output, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_cycov"))
        .arg("--json")
        .args(args)
        .output()
        .expect("binary runs");
    let doc = serde_json::from_slice(&out.stdout).expect("stdout is one JSON document");
    (out, doc)
}

fn strings(v: &Value) -> Vec<Vec<String>> {
    serde_json::from_value(v.clone()).unwrap()
}

#[test]
fn cover_reports_polynomial_and_deck() {
    let (out, doc) = cycov(&["cover", "--field", "p:7", "--poly", "x0^3+x1^3+x2^3"]);
    assert!(out.status.success());
    assert_eq!(doc["cover_poly"], "x0^3+x1^3+x2^3+6*x3^3");
    assert_eq!(doc["new_var"], "x3");
    let deck = strings(&doc["deck"]);
    assert_eq!(deck[3][3], "2");
    assert_eq!(deck[0], ["1", "0", "0", "0"]);
}

#[test]
fn cover_without_roots_of_unity_explains_why() {
    let (out, doc) = cycov(&["cover", "--field", "p:5", "--poly", "x0^3+x1^3+x2^3"]);
    assert!(out.status.success());
    let reason = doc["deck"]["unavailable_reason"].as_str().unwrap();
    assert!(reason.contains("degree 2"), "{reason}");
}

#[test]
fn galois_on_fermat_surface() {
    let (out, doc) = cycov(&["galois", "--field", "p:13", "--poly", "x0^3+x1^3+x2^3+x3^3", "--ext-max", "1"]);
    assert!(out.status.success());
    assert_eq!(doc["delta_lower_bound"], 4);
    assert_eq!(doc["bound"], 4);
    assert_eq!(doc["points"].as_array().unwrap().len(), 4);
}

#[test]
fn normalize_fermat_has_empty_tail() {
    let (out, doc) = cycov(&["normalize", "--field", "p:13", "--poly", "x0^3+x1^3+x2^3+x3^3"]);
    assert!(out.status.success());
    assert_eq!(doc["r"], 3);
    assert_eq!(doc["G"], "0");
}

#[test]
fn recover_round_trip_through_files() {
    let dir = std::env::temp_dir().join(format!("cycov-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("h.txt");
    std::fs::write(&path, "x0^3+2*x0*x1*x2+x1^3+x2^3-x3^3\n").unwrap();
    let (out, doc) = cycov(&["recover", "--field", "p:13", "--poly-file", path.to_str().unwrap(), "--hint", "0,0,0,1"]);
    assert!(out.status.success());
    assert_eq!(doc["base_poly"], "x0^3+2*x0*x1*x2+x1^3+x2^3");
    assert_eq!(doc["galois_point_used"], serde_json::json!(["0", "0", "0", "1"]));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn equiv_modes_agree() {
    let base = ["--field", "p:3", "--poly1", "x0^4+x1^4+x2^4", "--poly2", "x0^4+x1^4+2*x2^4"];
    let (_, brute) = cycov(&[&["equiv", "--mode", "brute"][..], &base[..]].concat());
    let (_, structured) = cycov(&[&["equiv", "--mode", "structured"][..], &base[..]].concat());
    assert_eq!(brute["verdict"], "equivalent");
    assert_eq!(structured["verdict"], "equivalent");
    assert!(structured["witness"].is_array());
}

#[test]
fn census_is_deterministic_and_clean() {
    let args = ["census", "--field", "p:13", "--d", "3", "--n", "1", "--trials", "10", "--seed", "42"];
    let (out, a) = cycov(&args);
    let (_, b) = cycov(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(a, b);
    assert_eq!(a["round_trip_pass"], a["retained"]);
    let (_, empty) = cycov(&["census", "--field", "p:13", "--trials", "0"]);
    assert_eq!(empty["retained"], 0);
    assert_eq!(empty["trials"], serde_json::json!([]));
}

#[test]
fn operational_errors_exit_with_one() {
    let (out, doc) = cycov(&["census", "--field", "p:7", "--d", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(doc["error"].as_str().unwrap().contains("divides"));
    let (out, doc) = cycov(&["parse", "--field", "p:7", "--poly", "x0^2 + y1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(doc["error"].as_str().unwrap().contains("position 7"));
}

#[test]
fn parse_reports_singular_points() {
    let (out, doc) = cycov(&["parse", "--field", "p:7", "--poly", "x0^3+x1^3", "--nvars", "3"]);
    assert!(out.status.success());
    assert_eq!(doc["canonical"], "x0^3+x1^3");
    assert_eq!(doc["smoothness"]["singular"][0]["point"], serde_json::json!(["0", "0", "1"]));
}

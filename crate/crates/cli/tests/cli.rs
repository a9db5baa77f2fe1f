use std::path::PathBuf;

use assert_cmd::Command;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn bin() -> Command {
    Command::cargo_bin("affine-qe").unwrap()
}

fn json_of(args: &[&str]) -> (Value, i32) {
    let out = bin().args(args).args(["--json", "-"]).output().unwrap();
    let code = out.status.code().unwrap();
    (serde_json::from_slice(&out.stdout).unwrap_or(Value::Null), code)
}

#[test]
fn qe_dim_example_b1() {
    let path = data("example_b1.json");
    let (report, code) = json_of(&["qe-dim", path.to_str().unwrap(), "--mu", "-3/5"]);
    assert_eq!(code, 0);
    assert_eq!(report["dim"], 2);
    assert_eq!(report["mu"], "-3/5");
    assert_eq!(report["stabilized"], true);
    assert_eq!(report["basepoint"], serde_json::json!(["0", "0", "0"]));
}

#[test]
fn qe_dim_several_eigenvalues_and_float_mode() {
    let path = data("example_b1.json");
    let (report, code) = json_of(&["qe-dim", path.to_str().unwrap(), "--mu", "-3/5,0", "--mu", "1"]);
    assert_eq!(code, 0);
    let dims: Vec<u64> = report.as_array().unwrap().iter().map(|r| r["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, [2, 1, 0]);
    let (report, _) = json_of(&["qe-dim", path.to_str().unwrap(), "--mu", "-3/5", "--mode", "float"]);
    assert_eq!(report["dim"], 2);
}

#[test]
fn input_errors_exit_two() {
    bin().args(["qe-dim", "missing.json", "--mu", "1"]).assert().code(2);
    bin().args(["curvature", data("asymmetric.json").to_str().unwrap()]).assert().code(2);
    bin().args(["qe-dim", data("example_b1.json").to_str().unwrap(), "--mu", "0.5"]).assert().code(2);
    bin().args(["qe-dim", data("tc2_2b.json").to_str().unwrap(), "--mu", "1", "--basepoint", "0,1"]).assert().code(2);
    bin().args(["classify", "--family", "typeC", "--mu", "1"]).assert().code(2);
    bin().args(["frobnicate"]).assert().code(2);
}

#[test]
fn excluded_origin_uses_seeded_basepoint() {
    let path = data("tc2_2b.json");
    let (a, code) = json_of(&["qe-dim", path.to_str().unwrap(), "--mu", "-1", "--seed", "3"]);
    assert_eq!(code, 0);
    assert_eq!(a["dim"], 3);
    let (b, _) = json_of(&["qe-dim", path.to_str().unwrap(), "--mu", "-1", "--seed", "3"]);
    assert_eq!(a, b);
}

#[test]
fn sweep_type_b_minus_one() {
    let out = bin().args(["sweep", "--family", "typeB", "--mu", "-1", "--n", "500", "--seed", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let (report, _) = json_of(&["sweep", "--family", "typeB", "--mu", "-1", "--n", "500", "--seed", "7"]);
    let rows = report["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 500);
    for r in rows {
        assert!([0, 1, 3].contains(&r["dim"].as_u64().unwrap()), "{r}");
        assert!(r["params"].is_array() && r["mu"] == "-1");
    }
    assert!(report["violations"].as_array().unwrap().is_empty());
}

#[test]
fn sweep_reports_are_byte_identical() {
    let args = ["sweep", "--family", "typeA", "--mu", "1/2,2", "--n", "12", "--seed", "5", "--json", "-"];
    let a = bin().args(args).output().unwrap().stdout;
    let b = bin().args(args).output().unwrap().stdout;
    let c = bin().args(args).arg("--sequential").output().unwrap().stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn classify_fixtures() {
    let (r, code) = json_of(&["classify", "--family", "exampleB2", "--params", "1,0,2,1/4", "--mu", "-1/2"]);
    assert_eq!(code, 0);
    assert_eq!(r["rows"][0]["computed"], 1);
    assert_eq!(r["rows"][0]["agree"], true);
    let (r, code) = json_of(&["classify", "--family", "tc3-2a+", "--params", "1", "--mu", "1/2,1"]);
    assert_eq!(code, 0);
    assert_eq!(r["rows"][0]["computed"], 2);
    assert_eq!(r["rows"][1]["computed"], 0);
    let (r, _) = json_of(&["classify", "--family", "typeA", "--params", "1,2,0,1,3,-1", "--mu", "0"]);
    assert_eq!(r["rows"][0]["predicted"], "not-covered");
}

#[test]
fn curvature_of_example_b1() {
    let (r, code) = json_of(&["curvature", data("example_b1.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["ricci"], serde_json::json!({"1,2": "5", "2,1": "5", "3,3": "10"}));
    assert_eq!(r["ricci_symmetric"], "holds");
    assert_eq!(r["flat"], "fails");
}

#[test]
fn deform_flat_plane() {
    let (r, code) = json_of(&["deform", data("flat_plane.json").to_str().unwrap(), "--omega", "x2,0"]);
    assert_eq!(code, 0);
    assert_eq!(r["strong"], "fails");
    assert_eq!(r["manifold"]["christoffel"]["1,1^1"], "2*x2");
    let doc = tempfile::NamedTempFile::new().unwrap();
    std::fs::write(doc.path(), r["manifold"].to_string()).unwrap();
    let (q, _) = json_of(&["qe-dim", doc.path().to_str().unwrap(), "--mu", "-1"]);
    assert_eq!(q["dim"], 0);
    bin().args(["deform", data("flat_plane.json").to_str().unwrap()]).assert().code(2);
}

#[test]
fn flatten_writes_chart() {
    let out = tempfile::NamedTempFile::new().unwrap();
    bin()
        .args(["flatten", data("tc2_2b.json").to_str().unwrap(), "--basepoint", "1,0", "--grid", "3"])
        .args(["--geodesics", "4", "--json", out.path().to_str().unwrap()])
        .assert()
        .code(0);
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out.path()).unwrap()).unwrap();
    assert_eq!(r["strongly_flat"], true);
    assert_eq!(r["chart"]["points"].as_array().unwrap().len(), 9);
    assert_eq!(r["chart"]["z"].as_array().unwrap().len(), 9);
    assert!(r["geodesic_deviation"].as_f64().unwrap() < 1e-6);
    let (r, code) = json_of(&["flatten", data("example_b1.json").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(r["strongly_flat"], false);
}

#[test]
fn extend_and_verify() {
    let b1 = data("example_b1.json");
    let b1 = b1.to_str().unwrap();
    let (r, code) = json_of(&["extend", b1, "--phi", "1,1=x1^2", "--phi", "2,3=x3", "--f", "x1*x3"]);
    assert_eq!(code, 0);
    assert_eq!(r["identities"]["ricci"], "holds");
    assert_eq!(r["metric"]["1,4"], "1");
    let (r, code) = json_of(&["extend", b1, "--f", "exp(3*x3)", "--mu", "-3/5"]);
    assert_eq!(code, 0);
    assert_eq!(r["quasi_einstein"]["mu_qe"], "-3/10");
    assert_eq!(r["quasi_einstein"]["residual"], "holds");
    bin().args(["extend", b1, "--phi", "1,4=x1"]).assert().code(2);
    bin().args(["verify", b1, "--mu", "-3/5", "--f", "x1*exp(3*x3)"]).assert().code(0);
    bin().args(["verify", b1, "--mu", "1", "--f", "x1"]).assert().code(1);
}

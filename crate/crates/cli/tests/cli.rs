use std::path::PathBuf;
use std::process::{Command, Output};

use assigncoh::builders::build_from_description;
use assigncoh::builders::presets::{cp2_description, s4_description};
use assigncoh::description::SpaceDescription;

fn data(name: &str) -> String {
    format!("{}/../../data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_assigncoh")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert_eq!(code(&o), 0, "{args:?}: {}", stderr(&o));
    stdout(&o)
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&run(&all))).unwrap()
}

#[test]
fn data_files_match_presets() {
    let read = |n: &str| SpaceDescription::from_json(&std::fs::read_to_string(data(n)).unwrap()).unwrap();
    assert_eq!(read("cp2.space"), cp2_description());
    assert_eq!(read("s4.space"), s4_description());
}

#[test]
fn assignments() {
    assert!(ok(&["assignments", &data("cp2.space")]).starts_with("dim A = 3\n"));
    assert!(ok(&["assignments", &data("s4.space")]).starts_with("dim A = 2\n"));
    assert_eq!(json(&["assignments", &data("s2cube.space")])["results"]["dim"], 5);
}

#[test]
fn schema_and_validation_errors() {
    let o = run(&["assignments", &data("empty.space")]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("no strata"));
    assert_eq!(code(&run(&["assignments", &data("malformed.space")])), 1);
    assert_eq!(code(&run(&["assignments", &data("missing.space")])), 1);
    assert_eq!(code(&run(&["cohomology", &data("cp2.space"), "--degree", "x"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    let v = json(&["assignments", &data("empty.space")]);
    assert_eq!(v["error"]["exit_code"], 2);
    assert_eq!(v["error"]["kind"], "validation");
}

#[test]
fn cohomology() {
    assert!(ok(&["cohomology", &data("s2cube.space"), "--degree", "1"]).starts_with("dim HA^1 = 1 "));
    let rel = ok(&["cohomology", &data("cp2.space"), "--relative", "fixed-points", "--degree", "1", "--complex", "both"]);
    assert!(rel.contains("dim HA^1(M,N) = 3 (reduced complex)"));
    assert!(rel.contains("dim HA^1(M,N) = 3 (full complex)"));
    assert!(rel.contains("full and reduced complexes agree"));
    let v = json(&["cohomology", &data("cp2.space"), "--relative", "p0,p1,p2", "--degree", "0"]);
    assert_eq!(v["results"]["reduced"]["dim"], 0);
    for file in ["cp2.space", "s4.space", "s2cube.space"] {
        for k in ["2", "3"] {
            let v = json(&["cohomology", &data(file), "--degree", k, "--complex", "both"]);
            assert_eq!(v["results"]["reduced"]["dim"], 0);
            assert_eq!(v["results"]["full"]["dim"], 0);
        }
    }
}

#[test]
fn unknown_relative_ids_exit_3() {
    let o = run(&["cohomology", &data("cp2.space"), "--relative", "p0,q7", "--degree", "1"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("\"q7\""));
    assert_eq!(code(&run(&["check", &data("cp2.space"), "--les", "nowhere"])), 3);
}

#[test]
fn build_sphere_product_merges_cells() {
    let out = tmp("s2cube.space");
    let text = ok(&["build", "sphere-product", "--n", "2", "--lambdas", "1,0;0,1;1,-1", "--out", out.to_str().unwrap()]);
    assert!(text.contains("input cells: 27"));
    assert!(text.contains("strata with stabilizer dimension 2: 8\n"));
    assert!(text.contains("strata with stabilizer dimension 1: 12\n"));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(data("s2cube.space")).unwrap());
}

#[test]
fn build_triangle_matches_cp2() {
    let out = tmp("triangle.space");
    ok(&["build", "polytope", "--triangle", "--out", out.to_str().unwrap()]);
    let built = SpaceDescription::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let (tri, _) = build_from_description(&built).unwrap();
    let (cp2, _) = build_from_description(&cp2_description()).unwrap();
    assert_eq!(tri.invariants(), cp2.invariants());
    assert!(ok(&["assignments", out.to_str().unwrap()]).starts_with("dim A = 3\n"));
}

#[test]
fn build_other_kinds() {
    let v = json(&["build", "linear-rep", "--weights", "1;-1"]);
    assert_eq!(v["results"]["strata"], 2);
    assert_eq!(v["results"]["description"]["torus_dim"], 1);
    let v = json(&["build", "product", &data("s4.space"), &data("cp2.space")]);
    assert_eq!(v["results"]["strata"], 35);
    assert_eq!(v["results"]["description"]["torus_dim"], 4);
    let v = json(&["build", "polytope", "--normals", "1,0;0,1;-1,0;0,-1"]);
    assert_eq!(v["results"]["strata"], 9);
    assert_eq!(code(&run(&["build", "linear-rep", "--weights", "1;a"])), 1);
    assert_eq!(code(&run(&["build", "sphere-product", "--n", "2", "--lambdas", "1,0,0"])), 2);
    assert_eq!(code(&run(&["build", "polytope", "--normals", "1,0;2,0;0,1"])), 2);
}

#[test]
fn check_euler_and_sequence() {
    let text = ok(&["check", &data("s2cube.space"), "--euler"]);
    assert!(text.contains("functor laws: pass"));
    assert!(text.contains("d^2 = 0 (reduced complex): pass"));
    assert!(text.contains("euler characteristic: 4"));
    let text = ok(&["check", &data("cp2.space"), "--les", "fixed-points", "--complex", "both"]);
    assert!(text.contains("long exact sequence (reduced complex): exact"));
    assert!(text.contains("long exact sequence (full complex): exact"));
    assert!(text.contains("  dims: 0, 3, 6, 3, 0, 0"));
}

#[test]
fn perturbed_projection_is_named() {
    let o = run(&["check", &data("perturbed.space")]);
    assert_eq!(code(&o), 2);
    let text = stdout(&o);
    assert!(text.contains("functor laws: FAIL"));
    assert!(text.contains("proj(c, d) proj(a, c) differs from proj(a, d)"));
    assert!(text.contains("verdict: FAIL"));
}

#[test]
fn extend() {
    let text = ok(&["extend", &data("cp2.space"), "--values", &data("cp2_values.json")]);
    assert!(text.contains("  e01 = [0]\n  e02 = [0]\n  e12 = [1]\n"));
    let zero = json(&["extend", &data("cp2.space"), "--values", &data("cp2_values_zero.json")]);
    for (_, v) in zero["results"]["assignment"].as_object().unwrap() {
        assert!(v.as_array().unwrap().iter().all(|x| x == "0"));
    }
    let o = run(&["extend", &data("cp2.space"), "--values", &data("cp2_values_incompatible.json")]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("\"p1\" and \"p2\" project to different values on \"e12\""));
    let v = json(&["extend", &data("cp2.space"), "--values", &data("cp2_values_incompatible.json")]);
    assert_eq!(v["error"]["details"], serde_json::json!({ "x1": "p1", "x2": "p2", "y": "e12" }));
    assert_eq!(code(&run(&["extend", &data("cp2.space"), "--values", &data("s4.space")])), 1);
}

#[test]
fn decompose() {
    let text = ok(&["decompose", "--weights", "1", "--psi", "[1] z1 zb1"]);
    assert_eq!(text, "moment condition: holds\nf1 = [1] zb1\ng1 = 0\nμ = −√−1 ( ([1] zb1) dz1 )\n");
    let text = ok(&["decompose", "--weights", "1;1", "--psi", "[1] z1 zb1 + [1] z2 zb2"]);
    assert!(text.contains("f1 = [1] zb1\nf2 = [1] zb2\ng1 = 0\ng2 = 0\n"));
    let text = ok(&["decompose", "--weights", "1;-1", "--psi", "[1] z1 z2"]);
    assert!(text.contains("f1 = [1] z2\nf2 = 0\ng1 = 0\ng2 = 0\n"));
    let o = run(&["decompose", "--weights", "0", "--psi", "[1] z1"]);
    assert_eq!(code(&o), 5);
    assert_eq!(stdout(&o), "moment condition: fails at z1\n");
    let o = run(&["decompose", "--weights", "1,0", "--psi", "[1/2 z1"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("column 6"));
}

#[test]
fn reports_are_deterministic() {
    for args in [
        vec!["--json", "cohomology", &data("s2cube.space"), "--degree", "0", "--complex", "both"],
        vec!["--json", "check", &data("cp2.space"), "--les", "fixed-points", "--euler"],
        vec!["build", "polytope", "--cube"],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(code(&a), code(&b));
    }
    let a = json(&["assignments", &data("cp2.space")]);
    let b = json(&["assignments", &data("s4.space")]);
    assert_ne!(a["input_digest"], b["input_digest"]);
}

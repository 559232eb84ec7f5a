use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bibranch::cli::{Certificate, PrimalSection, SetValue, VertexValue};
use bibranch::graph::text::{instance_digest, parse_instance};
use serde_json::Value;

const E1: &str = "p bibranch 4 4\ns 0 1\nt 2 3\na 0 1 1\na 1 2 2\na 0 3 4\na 2 3 1\n";
const INFEASIBLE: &str = "p bibranch 3 1\ns 0\nt 1 2\na 0 1 5\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bibranch")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, content: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(path: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn e1_lp_certificate() -> Certificate {
    let inst = parse_instance(E1).unwrap();
    let mut c = Certificate::new(&inst, "hand");
    let sv = |subset: Vec<usize>, value: &str| SetValue { subset, value: value.into() };
    c.primal_x = Some(PrimalSection::Support(vec![0, 1, 3]));
    c.dual_y = Some(vec![sv(vec![0], "1")]);
    c.dual_z = Some(vec![sv(vec![2], "2"), sv(vec![3], "1")]);
    c
}

#[test]
fn solve_certify_verify_e1() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "e1.txt", E1);
    let out = run(&["solve", "-i", &inst, "--method", "brute", "--certify"]);
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4");
    let cert = format!("{inst}.cert.json");
    let v = json(&cert);
    assert_eq!(v["meta"]["values"]["primal"], "4");
    assert_eq!(v["meta"]["values"]["dual"], "4");
    assert_eq!(v["primal_x"], serde_json::json!([0, 1, 3]));
    assert_eq!(code(&run(&["verify", "-i", &inst, "-c", &cert])), 0);
}

#[test]
fn every_method_prints_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "e1.txt", E1);
    for method in ["brute", "msf", "benders"] {
        let out = run(&["solve", "-i", &inst, "--method", method]);
        assert_eq!(code(&out), 0, "{method}");
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4", "{method}");
    }
}

#[test]
fn exit_codes_for_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let inf = write(dir.path(), "inf.txt", INFEASIBLE);
    for method in ["brute", "msf", "benders"] {
        assert_eq!(code(&run(&["solve", "-i", &inf, "--method", method])), 2, "{method}");
    }
    let bad = write(dir.path(), "bad.txt", "p bibranch 2\nbogus\n");
    assert_eq!(code(&run(&["solve", "-i", &bad])), 3);
    assert_eq!(code(&run(&["solve", "-i", "/nonexistent/file"])), 3);
    assert_eq!(code(&run(&["frobnicate"])), 3);
}

#[test]
fn edited_dual_is_rejected_with_named_arc() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "e1.txt", E1);
    let mut c = e1_lp_certificate();
    c.dual_y = None;
    c.dual_z = Some(vec![SetValue { subset: vec![2], value: "5".into() }]);
    c.primal_x = None;
    let cert = write(dir.path(), "c.json", &c.to_json());
    let out = run(&["verify", "-i", &inst, "-c", &cert]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dual infeasible at arc a2"));
}

#[test]
fn digest_mismatch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "e1.txt", E1);
    let other = write(dir.path(), "other.txt", &E1.replace("a 0 3 4", "a 0 3 5"));
    let cert = write(dir.path(), "c.json", &e1_lp_certificate().to_json());
    assert_eq!(code(&run(&["verify", "-i", &inst, "-c", &cert])), 0);
    assert_eq!(code(&run(&["verify", "-i", &other, "-c", &cert])), 3);
}

#[test]
fn translate_lp_to_msf_on_e1() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "e1.txt", E1);
    let cert = write(dir.path(), "lp.json", &e1_lp_certificate().to_json());
    let out: PathBuf = dir.path().join("msf.json");
    let out_s = out.to_string_lossy().into_owned();
    assert_eq!(code(&run(&["translate", "-i", &inst, "-c", &cert, "--direction", "lp2msf", "-o", &out_s])), 0);
    let c = Certificate::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let vv = |vertex, value| VertexValue { vertex, value };
    assert_eq!(c.flow_xi, Some(vec![1]));
    assert_eq!(c.potential_p, Some(vec![vv(0, -1), vv(1, 0)]));
    assert_eq!(c.potential_q, Some(vec![vv(2, 2), vv(3, 1)]));
    assert_eq!(c.primal_x, e1_lp_certificate().primal_x);
}

#[test]
fn translate_msf_to_lp_on_e1() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = write(dir.path(), "e1.txt", E1);
    let inst = parse_instance(E1).unwrap();
    let mut c = Certificate::new(&inst, "hand");
    let vv = |vertex, value| VertexValue { vertex, value };
    c.flow_xi = Some(vec![1]);
    c.potential_p = Some(vec![vv(0, -1), vv(1, 0)]);
    c.potential_q = Some(vec![vv(2, 2), vv(3, 1)]);
    let cert = write(dir.path(), "msf.json", &c.to_json());
    let out = dir.path().join("lp.json").to_string_lossy().into_owned();
    assert_eq!(code(&run(&["translate", "-i", &inst_path, "-c", &cert, "--direction", "msf2lp", "-o", &out])), 0);
    let v = json(&out);
    assert_eq!(v["meta"]["values"]["primal"], "4");
    assert_eq!(v["meta"]["digest"], format!("{:016x}", instance_digest(&inst)));
    assert_eq!(code(&run(&["verify", "-i", &inst_path, "-c", &out])), 0);
}

#[test]
fn translate_without_source_sections_fails() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = write(dir.path(), "e1.txt", E1);
    let inst = parse_instance(E1).unwrap();
    let cert = write(dir.path(), "empty.json", &Certificate::new(&inst, "hand").to_json());
    let out = dir.path().join("x.json").to_string_lossy().into_owned();
    for d in ["lp2msf", "msf2lp"] {
        assert_eq!(code(&run(&["translate", "-i", &inst_path, "-c", &cert, "--direction", d, "-o", &out])), 3);
    }
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt").to_string_lossy().into_owned();
    let b = dir.path().join("b.txt").to_string_lossy().into_owned();
    for p in [&a, &b] {
        assert_eq!(code(&run(&["gen", "--seed", "7", "--ns", "3", "--nt", "2", "--arcs", "8", "--wmax", "5", "-o", p])), 0);
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let inst = parse_instance(&text).unwrap();
    assert_eq!((inst.s_vertices().len(), inst.t_vertices().len(), inst.m()), (3, 2, 8));
}

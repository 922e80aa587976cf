use std::path::Path;
use std::process::{Command, Output};

use ruby_tcc::hamiltonian::{build_two_body, Couplings};
use ruby_tcc::lattice::build_ruby;
use ruby_tcc::spectral::{lowest_eigs, SolverOptions};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ruby-tcc"))
        .args(args)
        .env("RUBY_TCC_LOG", "off")
        .output()
        .unwrap()
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/report.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

fn report(args: &[&str], code: i32) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let errors: Vec<String> = validator().iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
    v
}

#[test]
fn ioms_report_lists_verified_faces() {
    let v = report(&["--task", "ioms", "--lx", "1", "--ly", "1"], 0);
    let data = &v["result"]["data"];
    assert_eq!(data["terms"], 36);
    assert_eq!(data["all_verified"], true);
    let faces = data["faces"].as_array().unwrap();
    assert_eq!(faces.len(), 3);
    for f in faces {
        assert_eq!(f["local_rank"], 2);
        assert_eq!(f["ab_equals_minus_c"], true);
        for l in ["a", "b", "c"] {
            assert_eq!(f[l]["check"]["commutes_with_all_terms"], true);
        }
    }
}

#[test]
fn toric_code_report() {
    let v = report(&["--task", "code", "--l", "4"], 0);
    let p = &v["result"]["data"]["report"]["parameters"];
    assert_eq!(p["k"], 2);
    assert_eq!(p["degeneracy"], 4);
    assert_eq!(v["config"]["lattice"]["type"], "square");
}

#[test]
fn every_cheap_task_validates_against_schema() {
    report(&["--task", "validate", "--lx", "2", "--ly", "1"], 0);
    report(&["--task", "validate", "--l", "6"], 0);
    report(&["--task", "logicals"], 0);
    report(&["--task", "code", "--lx", "2", "--ly", "1"], 0);
    report(
        &[
            "--task", "spectrum", "--jx", "0", "--jy", "0", "--jz", "1", "--eigs", "16",
        ],
        0,
    );
}

#[test]
fn zero_width_lattice_is_a_config_error() {
    let v = report(&["--task", "validate", "--lx", "0"], 2);
    assert_eq!(v["error"]["exit_code"], 2);
    assert!(v["error"]["message"]
        .as_str()
        .unwrap()
        .contains("Lx must be ≥ 1"));
}

#[test]
fn bad_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"task": "ioms", "bogus": 1}"#).unwrap();
    report(&["--config", path.to_str().unwrap()], 2);
    report(&["--task", "ioms", "--l", "4"], 2);
    report(&["--task", "spectrum", "--tol", "0"], 2);
    let out = run(&["--task", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_file_and_out_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out = dir.path().join("report.json");
    std::fs::write(
        &cfg,
        r#"{"task": "validate", "lattice": {"type": "ruby", "lx": 3, "ly": 1}}"#,
    )
    .unwrap();
    let status = run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--ly",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    assert!(status.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["lattice"]["lx"], 3);
    assert_eq!(v["config"]["lattice"]["ly"], 2);
    assert_eq!(v["result"]["data"]["ruby"]["sites"], 18 * 6);
}

#[test]
fn identical_configs_give_identical_bytes() {
    for args in [
        &["--task", "ioms", "--jx", "0.3", "--jy", "-0.2"][..],
        &["--task", "code", "--lx", "2", "--ly", "1"][..],
        &[
            "--task", "spectrum", "--jx", "0", "--jy", "0", "--eigs", "30", "--seed", "9",
        ][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn numbers_keep_full_precision() {
    let v = report(
        &[
            "--task", "spectrum", "--jx", "0", "--jy", "0", "--jz", "0.1", "--eigs", "4",
        ],
        0,
    );
    let h = build_two_body(
        &build_ruby(1, 1).unwrap(),
        &Couplings::new(0.0, 0.0, 0.1).unwrap(),
    );
    let direct = lowest_eigs(&h, 4, &SolverOptions::default()).unwrap();
    let printed: Vec<f64> =
        serde_json::from_value(v["result"]["data"]["eigenvalues"].clone()).unwrap();
    assert_eq!(printed, direct.eigenvalues);
}

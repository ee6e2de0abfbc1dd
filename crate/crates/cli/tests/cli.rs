//! End-to-end tests of the `fusionmod` binary.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    run_env(args, &[])
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fusionmod"));
    cmd.args(args).env_remove("FUSIONMOD_WORKERS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn hom_of_two_frobenius_algebras() {
    let (code, out, _) = run(&["hom", "HI-Z2xZ2", "1+a1*r", "1+a2*r"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1");
}

#[test]
fn dimension_in_d_notation() {
    let (code, out, _) = run(&["dim", "4442", "Lambda*(1+x)"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "3+3d");
}

#[test]
fn unknown_ring_is_a_usage_error() {
    let (code, out, err) = run(&["ring", "show", "nosuch"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("nosuch"));
}

#[test]
fn bad_expression_is_a_usage_error() {
    let (code, _, err) = run(&["dim", "4442", "Lambda*("]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
}

#[test]
fn ring_list_names_the_catalog() {
    let (code, out, _) = run(&["ring", "list"]);
    assert_eq!(code, 0);
    for name in ["HI-Z4", "HI-Z2xZ2", "4442", "2D2", "C2"] {
        assert!(out.lines().any(|l| l.starts_with(&format!("{name}\t"))), "{name} missing");
    }
}

#[test]
fn ring_json_round_trips_through_check() {
    let (code, json, _) = run(&["ring", "show", "2D2", "--json"]);
    assert_eq!(code, 0);
    let path = std::env::temp_dir().join(format!("fusionmod-cli-ring-{}.json", std::process::id()));
    std::fs::write(&path, &json).unwrap();
    let (code, out, _) = run(&["ring", "check", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("valid"));

    std::fs::write(&path, json.replacen("\"unit\": 0", "\"unit\": 1", 1)).unwrap();
    let (code, _, _) = run(&["ring", "check", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn enumerate_then_read_back_modules() {
    let path = std::env::temp_dir().join(format!("fusionmod-cli-mods-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["enumerate", "2D2", "--format", "json", "--out", p]);
    assert_eq!(code, 0);
    assert!(out.starts_with("7 modules"));
    let (code, from_file, _) = run(&["algebras", "2D2", "--modules", p]);
    assert_eq!(code, 0);
    let (_, direct, _) = run(&["algebras", "2D2"]);
    assert_eq!(from_file, direct);
    assert_eq!(direct.lines().count(), 7);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn module_index_is_one_based() {
    let (code, _, _) = run(&["dual", "2D2", "--module", "0"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["dual", "2D2", "--module", "8"]);
    assert_eq!(code, 2);
    let (code, out, _) = run(&["dual", "2D2", "--module", "7"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("candidate 1"));
}

#[test]
fn dual_json_is_parseable() {
    let (code, out, _) = run(&["dual", "2D2", "--module", "3", "--json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(!v.as_array().unwrap().is_empty());
}

#[test]
fn restrict_splits_into_components() {
    let (code, out, _) = run(&["restrict", "4442", "--module", "17", "--subring", "0,1,2"]);
    assert_eq!(code, 0);
    assert!(out.lines().count() >= 2);
    assert!(out.lines().all(|l| l.starts_with("component")));
}

#[test]
fn workers_env_is_validated_only_without_flag() {
    let (code, _, _) = run_env(&["algebras", "2D2"], &[("FUSIONMOD_WORKERS", "zero")]);
    assert_eq!(code, 2);
    let (code, _, _) = run_env(&["algebras", "2D2", "--workers", "1"], &[("FUSIONMOD_WORKERS", "zero")]);
    assert_eq!(code, 0);
}

#[test]
fn quick_suite_passes_with_json_on_stdout() {
    let (code, out, err) = run(&["verify", "--suite", "quick", "--json"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(err.contains("A4"));
}

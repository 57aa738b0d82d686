use std::process::{Command, Output};

use prym_core::fixtures::appendix_a_params;
use serde_json::Value;

fn prym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prym"))
        .args(args)
        .env_remove("PRYM_PRIMES")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

/// Drops every `elapsed_ms` field.
fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.remove("elapsed_ms");
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(xs) => xs.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn class_table_matches() {
    let o = prym(&["class"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("c1(D) = 8778 lambda"));
    assert!(out.contains("8 + 2/3023656976381"));
}

#[test]
fn plus_sign_fails_with_diagnosis() {
    let o = prym(&["class", "--paper-sign-omega2", "plus", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["status"], "fail");
    assert!(!v["diagnosis"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn class_json_fields() {
    let v = json(&prym(&["class", "--json"]));
    assert_eq!(v["status"], "pass");
    assert_eq!(v["classes"]["c1(I_2)"]["lambda"], "7/1");
    assert_eq!(v["slope"]["excess_over_eight"], "2/3023656976381");
    assert_eq!(v["closure"]["unknown_remainder"], true);
}

#[test]
fn verify_g20_passes() {
    let o = prym(&["verify-g20"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("(r0, r1, r2) = (38, 108, 171), r2 - r1 = 63"));
}

#[test]
fn verify_g20_with_other_prime() {
    let o = prym(&["verify-g20", "--primes", "137"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("mod 137"));
}

#[test]
fn verify_g20_corrupted_parameters_fail() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("params.json");
    let mut v = appendix_a_params().to_json();
    // Make component 2 equal to component 1.
    v["a"][1] = v["a"][0].clone();
    std::fs::write(&path, v.to_string()).unwrap();
    let src = format!("file:{}", path.display());
    let o = prym(&["verify-g20", "--params", &src, "--json"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let r = json(&o);
    let failures = r["diagnosis"]["failures"].as_array().unwrap();
    assert!(failures[0]
        .as_str()
        .unwrap()
        .contains("expected [38, 108, 171]"));
}

#[test]
fn genus_six_has_no_quadrics() {
    let o = prym(&["surjectivity", "--genus-range", "6..7", "--seed", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("g=6: r0=10 r1=10 r2=10 rank mu=0 of 35 (I2 = 0, nothing to map)"));
}

#[test]
fn empty_genus_range_is_a_usage_error() {
    assert_eq!(
        prym(&["surjectivity", "--genus-range", "9..3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        prym(&["surjectivity", "--genus-range", "4..8"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn reports_are_reproducible() {
    let args = [
        "surjectivity",
        "--genus-range",
        "8..9",
        "--seed",
        "5",
        "--json",
    ];
    let mut a = json(&prym(&args));
    let mut b = json(&prym(&args));
    strip_timing(&mut a);
    strip_timing(&mut b);
    assert_eq!(a, b);
    let gs: Vec<u64> = a["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["g"].as_u64().unwrap())
        .collect();
    assert_eq!(gs, vec![8, 9]);
}

#[test]
fn primes_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_prym"))
        .args(["surjectivity", "--genus-range", "8", "--json"])
        .env("PRYM_PRIMES", "139,149")
        .output()
        .unwrap();
    let v = json(&o);
    assert_eq!(
        v["reports"][0]["certificates"][0]["per_prime"][0]["prime"],
        139
    );
}

#[test]
fn induction_rejects_small_genus() {
    let o = prym(&["induction", "--genus-range", "19"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn induction_random_parameters_pass() {
    let o = prym(&[
        "induction",
        "--genus-range",
        "20",
        "--params",
        "random",
        "--seed",
        "7",
        "--json",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v = json(&o);
    assert_eq!(v["reports"][0]["rank_x"], 45);
    assert_eq!(v["reports"][0]["params_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn appendix_b_short_scan() {
    let o = prym(&["appendix-b", "--k-range", "10..300"]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn appendix_b_detects_planted_zero() {
    let o = prym(&[
        "appendix-b",
        "--k-range",
        "10..40",
        "--extra-poly",
        "-15,1",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    let extra = v["reports"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(extra["zeros"], serde_json::json!([15]));
}

#[test]
fn appendix_b_rejects_small_k() {
    assert_eq!(
        prym(&["appendix-b", "--k-range", "5..100"]).status.code(),
        Some(2)
    );
}

#[test]
fn dump_z_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.csv");
    let o = prym(&[
        "dump-matrix",
        "--what",
        "z",
        "--genus",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("16,21"));
    assert_eq!(text.lines().count(), 17);
}

#[test]
fn dump_basis_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("basis.json");
    let o = prym(&[
        "dump-matrix",
        "--what",
        "basis",
        "--genus",
        "9",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["vectors"].as_array().unwrap().len(), 28 - 16);
    assert_eq!(v["pairs"][0], serde_json::json!([1, 2]));
}

#[test]
fn report_file_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let o = prym(&["class", "--report", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "class");
}

#[test]
fn default_surjectivity_range_passes() {
    let o = prym(&["surjectivity", "--json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v = json(&o);
    for r in v["reports"].as_array().unwrap() {
        assert_eq!(r["surjective"], true);
        assert_eq!(r["rank_mu"], 7 * r["g"].as_u64().unwrap() - 7);
    }
}

#[test]
fn composite_prime_is_an_error() {
    let o = prym(&["verify-g20", "--primes", "133", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["status"], "error");
}

use std::path::PathBuf;
use std::process::Command;

use anderson_core::fq::Fq;
use anderson_core::group::{AbelianGroup, GroupRing};
use anderson_core::io::series_from_json;
use anderson_core::series::SeriesRing;
use anderson_core::Ring;
use serde_json::Value;

fn anderson(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_anderson")).args(args).output().expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().expect("exited normally"),
    )
}

fn json(args: &[&str]) -> Value {
    let (out, err, code) = anderson(args);
    assert_eq!(code, 0, "{args:?} failed: {err}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn zeta_over_f2() {
    let v = json(&["zeta", "--q", "2", "--precision", "4"]);
    assert_eq!(v["schema_version"], 1);
    let s = &v["series"];
    assert_eq!(s["var"], "theta^-1");
    assert_eq!(s["lead"], 0);
    assert_eq!(s["precision"], 4);
    // 1 + θ^-2 + θ^-3 + θ^-4
    assert_eq!(s["coeffs"], serde_json::json!([1, 0, 1, 1, 1]));
}

#[test]
fn zeta_degree_sums_add_up() {
    let v = json(&["zeta", "--q", "3", "--precision", "5", "--z", "poly"]);
    let f = Fq::prime(3).unwrap();
    let s = SeriesRing::new(f.clone(), 5);
    let total = json(&["zeta", "--q", "3", "--precision", "5"]);
    let total = series_from_json(&s, &total["series"]).unwrap();
    let mut sum = s.zero();
    for part in v["degree_sums"].as_array().unwrap() {
        sum = s.add(&sum, &series_from_json(&s, part).unwrap());
    }
    assert_eq!(s.canonical(sum), s.canonical(total));
}

#[test]
fn carlitz_preset_reproduces_zeta() {
    let l = json(&["lfun", "--preset", "carlitz-A", "--q", "3", "--precision", "5"]);
    let z = json(&["zeta", "--q", "3", "--precision", "5"]);
    let f = Fq::prime(3).unwrap();
    let trivial = SeriesRing::new(GroupRing::new(f.clone(), AbelianGroup::trivial(3).into()), 5);
    let plain = series_from_json(&trivial, &l["plain"]).unwrap();
    let zeta = series_from_json(&SeriesRing::new(f, 5), &z["series"]).unwrap();
    let as_group: Vec<Vec<u32>> = trivial.canonical(plain.clone()).coeffs;
    assert_eq!(as_group.iter().map(|c| c[0]).collect::<Vec<_>>(), zeta.coeffs);
    assert_eq!((plain.lead, plain.prec), (zeta.lead, zeta.prec));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["zeta", "--max-deg", "0"],
        vec!["lfun", "--max-deg", "-3"],
        vec!["lfun", "--precision", "0"],
        vec!["verify", "no-such-suite"],
        vec!["zeta", "--q", "6"],
        vec!["zeta", "--q", "2", "--p", "2"],
        vec!["lfun", "--preset", "no-such-preset"],
        vec!["zeta", "--z", "eval=7", "--q", "5"],
        vec!["zeta", "--format", "xml"],
    ] {
        let (_, err, code) = anderson(&args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn seeded_runs_are_reproducible() {
    let a = anderson(&["verify", "nuclear-props", "--seed", "7"]);
    let b = anderson(&["verify", "nuclear-props", "--seed", "7"]);
    let c = anderson(&["verify", "nuclear-props", "--seed", "8"]);
    assert_eq!(a, b);
    assert_eq!(a.2, 0);
    assert_ne!(a.0, c.0);
}

#[test]
fn failing_check_reports_coefficients() {
    // primes of degree ≤ 2 miss the monic polynomials of degree 3
    let (out, _, code) = anderson(&["verify", "carlitz-zeta", "--q", "2", "--precision", "6", "--max-deg", "2"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], false);
    let check = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "euler-product-equals-monic-sum").unwrap();
    assert_eq!(check["passed"], false);
    let first = &check["mismatches"][0];
    assert!(first["at"].as_str().unwrap().starts_with("theta^-"));
    assert_ne!(first["expected"], first["actual"]);
}

#[test]
fn module_file_matches_preset() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/artin-schreier-3.toml");
    let from_file = json(&["lfun", "--module-file", path.to_str().unwrap(), "--precision", "3", "--max-deg", "3"]);
    let preset = json(&["lfun", "--preset", "artin-schreier", "--p", "3", "--precision", "3", "--max-deg", "3"]);
    for key in ["plain", "deformed", "factors"] {
        assert_eq!(from_file[key], preset[key], "{key}");
    }
}

#[test]
fn all_suites_pass_by_default() {
    for suite in ["carlitz-zeta", "artin-schreier", "detg-bridge", "nuclear-props", "lattice-index", "z-deform"] {
        let (out, err, code) = anderson(&["verify", suite, "--format", "text"]);
        assert_eq!(code, 0, "{suite}:\n{out}{err}");
    }
}

fn golden(name: &str, args: &[&str]) {
    let (out, err, code) = anderson(args);
    assert_eq!(code, 0, "{err}");
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &out).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    assert_eq!(out, expected, "output drifted from {name}; rerun with UPDATE_GOLDEN=1 after checking the change");
}

const TWISTED: [&str; 9] = ["lfun", "--preset", "artin-schreier", "--p", "3", "--precision", "4", "--max-deg", "4"];

#[test]
fn golden_twisted_json() {
    golden("artin-schreier-3.json", &[&TWISTED[..], &["--format", "json"]].concat());
}

#[test]
fn golden_twisted_csv() {
    golden("artin-schreier-3.csv", &[&TWISTED[..], &["--format", "csv", "--z", "poly"]].concat());
}

#[test]
fn golden_twisted_text() {
    golden("artin-schreier-3.txt", &[&TWISTED[..], &["--format", "text", "--z", "eval=2"]].concat());
}

#[test]
fn golden_twisted_schema() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/artin-schreier-3.json");
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["module"]["group"], "Z/3");
    // the factor at θ + 1 is (θ+1)·1 − 2·s^2
    let f = v["factors"].as_array().unwrap().iter().find(|f| f["prime"] == "theta + 1").unwrap();
    assert_eq!(f["symbol"], "2");
    assert_eq!(f["frobenius"], "(2)");
}

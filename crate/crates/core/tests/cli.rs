//! The `ltk` binary end to end: outputs, provenance, files and exit codes.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ltk(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ltk"));
    c.args(args).env_remove("LTK_CAP_OVERRIDE");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().expect("ltk runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ltk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn moment_of_a_point_mass() {
    let v = json(&ltk(&["measure", "moment", "--k", "3", "--dirac", "5", "--ring", "zp", "--p", "7"], &[]));
    assert_eq!(v["command"], "measure moment");
    assert_eq!(v["result"]["moment"]["coords"][0], 125);
    let prov = &v["provenance"];
    assert_eq!(prov["inputs_sha256"].as_str().unwrap().len(), 64);
    assert_eq!(prov["caps"]["D"], 32);
    assert_eq!(prov["caps"]["from_env"], false);
    assert!(prov["achieved_precision"]["N_eff"].as_u64().unwrap() >= 1);
}

#[test]
fn provenance_hash_tracks_inputs() {
    let a = json(&ltk(&["norm-op", "--p", "3", "--deg", "10", "--seed", "1"], &[]));
    let b = json(&ltk(&["norm-op", "--p", "3", "--deg", "10", "--seed", "1"], &[]));
    let c = json(&ltk(&["norm-op", "--p", "3", "--deg", "10", "--seed", "2"], &[]));
    assert_eq!(a["provenance"]["inputs_sha256"], b["provenance"]["inputs_sha256"]);
    assert_ne!(a["provenance"]["inputs_sha256"], c["provenance"]["inputs_sha256"]);
    assert_eq!(a["result"]["methods_agree"], true);
}

#[test]
fn omega_reports_the_factorization() {
    let v = json(&ltk(&["omega", "--p", "2", "--pi-sq", "-2", "--n", "2", "--prec", "12"], &[]));
    let f = &v["result"]["factorization"];
    assert_eq!(f["matches"], true);
    assert_eq!(f["degree"], 4);
    assert_eq!(v["result"]["plus"].as_array().unwrap().len(), 4);
}

#[test]
fn cap_override_is_applied_and_can_exhaust() {
    let v = json(&ltk(&["tower", "--p", "3", "--depth", "2"], &[("LTK_CAP_OVERRIDE", "12")]));
    assert_eq!(v["provenance"]["caps"]["D"], 12);
    assert_eq!(v["provenance"]["caps"]["from_env"], true);
    let degrees: Vec<u64> = v["result"]["levels"].as_array().unwrap().iter().map(|l| l["degree"].as_u64().unwrap()).collect();
    assert_eq!(degrees, [2, 6]);

    let out = ltk(&["tower", "--p", "3", "--depth", "2"], &[("LTK_CAP_OVERRIDE", "8")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    let out = ltk(&["omega", "--p", "2", "--n", "2", "--prec", "12"], &[("LTK_CAP_OVERRIDE", "4")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(ltk(&["bogus"], &[]).status.code(), Some(1));
    assert_eq!(ltk(&["group", "--prec", "0"], &[]).status.code(), Some(1));
    assert_eq!(ltk(&["group"], &[("LTK_CAP_OVERRIDE", "many")]).status.code(), Some(1));
    assert_eq!(ltk(&["char", "--matrix", "/nonexistent/m.json"], &[]).status.code(), Some(1));
    assert_eq!(ltk(&["--help"], &[]).status.code(), Some(0));
}

#[test]
fn char_reads_both_matrix_forms() {
    let compact = scratch("m.json");
    std::fs::write(&compact, r#"{"ring":{"p":3,"N":8,"kind":"zp"},"D":16,"entries":[[[3],[0]],[[1,1],[-3,1]]]}"#).unwrap();
    let v = json(&ltk(&["char", "--matrix", compact.to_str().unwrap()], &[]));
    assert_eq!((v["result"]["mu"].clone(), v["result"]["lambda"].clone()), (Value::from(1), Value::from(1)));

    // the full form, as written by the library
    use ltk::iwasawa::LambdaPresentation;
    use ltk::{RingSpec, TruncSeries};
    let s = RingSpec::ramified(3, 8, -3).unwrap();
    let pi = TruncSeries::constant(&s.uniformizer(), 16);
    let pres = LambdaPresentation::diagonal(&[pi, TruncSeries::from_ints(&s, &[0, 1], 16)]).unwrap();
    let full = scratch("full.json");
    std::fs::write(&full, serde_json::to_string(&pres.to_json()).unwrap()).unwrap();
    let v = json(&ltk(&["char", "--matrix", full.to_str().unwrap()], &[]));
    assert_eq!(v["result"]["mu"], "1/2");
    assert_eq!(v["result"]["lambda"], 1);
}

#[test]
fn coleman_files_chain() {
    let sys = scratch("sys.json");
    let out = ltk(&["coleman", "system", "--p", "3", "--depth", "2", "--teichmuller", "2", "--deg", "24", "--out", sys.to_str().unwrap()], &[]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v = json(&ltk(&["coleman", "interpolate", "--system", sys.to_str().unwrap()], &[]));
    // the Teichmuller lift of 2 in Z_3 is -1
    let c0 = &v["result"]["series"]["coeffs"][0];
    assert_eq!(c0[0], 3u64.pow(8) - 1);
    assert_eq!(c0[1], 0);

    let fp = scratch("fp.json");
    let out = ltk(&["coleman", "system", "--p", "3", "--ring", "zp", "--variant", "multiplicative", "--depth", "1", "--deg", "24", "--out", fp.to_str().unwrap()], &[]);
    assert!(out.status.success());
    let v = json(&ltk(&["coleman", "mu0", "--system", fp.to_str().unwrap()], &[]));
    assert_eq!(v["result"]["measure"]["tag"], "zp_units");

    // ramified fixed points have non-integral tilde-log: a precision-class failure
    let ram = scratch("ram.json");
    assert!(ltk(&["coleman", "system", "--p", "3", "--depth", "1", "--deg", "24", "--out", ram.to_str().unwrap()], &[]).status.success());
    let out = ltk(&["coleman", "mu0", "--system", ram.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integrality"));
}

#[test]
fn measure_files_and_okp_points() {
    let v = json(&ltk(&["measure", "tilde", "--dirac", "1,1", "--p", "3"], &[]));
    let m = scratch("mu.json");
    std::fs::write(&m, serde_json::to_string(&v["result"]["measure"]).unwrap()).unwrap();
    let v = json(&ltk(&["measure", "coset", "--measure", m.to_str().unwrap(), "--p", "3", "--level", "1"], &[]));
    let masses = v["result"]["masses"].as_array().unwrap();
    assert_eq!(masses.len(), 6);
    let ones = masses.iter().filter(|x| x["mass"]["coords"] == serde_json::json!([1, 0])).count();
    assert_eq!(ones, 1);
}

#[test]
fn elliptic_values() {
    let v = json(&ltk(&["elliptic", "theta", "--lattice", "0.3,1.1,1,0", "--z", "0.2,0.1"], &[]));
    let t = v["result"]["theta"].as_array().unwrap();
    assert!((t[0].as_f64().unwrap() - 0.0117839036).abs() < 1e-9);
    let v = json(&ltk(&["elliptic", "psi", "--lattice", "0,1,1,0", "--sublattice", "-1,2,2,1", "--z", "0.13,0.07"], &[]));
    assert_eq!(v["result"]["index"], 5);
    let out = ltk(&["elliptic", "theta", "--lattice", "1,0,0,1", "--z", "0,0"], &[]);
    assert_eq!(out.status.code(), Some(1));
}

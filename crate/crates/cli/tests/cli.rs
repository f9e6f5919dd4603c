use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strichartz")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn certify_at_threshold() {
    let out = run(&["certify", "--C", "36/85", "--lcut", "50"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["result"]["verdict"], "certified");
    let certs = v["result"]["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 2);
    let f0 = &certs[0];
    assert_eq!(f0["block"], "F0");
    assert_eq!(f0["rows"][0]["l"], 2);
    assert_eq!(f0["rows"][0]["margin"]["exact"], "0");
    assert_eq!(f0["tail"]["poly"], serde_json::json!(["1221", "268", "67"]));
    assert_eq!(f0["tail"]["criterion"], "all-coeffs-positive");
    assert_eq!(f0["tail"]["identity_residual"], "0");
    let f1 = &certs[1];
    let base = f1["rows"].as_array().unwrap().iter().find(|r| r["kind"] == "base").unwrap();
    let [lo, hi] = [base["margin"]["interval"][0].as_f64().unwrap(), base["margin"]["interval"][1].as_f64().unwrap()];
    assert!(0.0 < lo && lo <= hi);
}

#[test]
fn certify_above_threshold_names_binding_row() {
    let out = run(&["certify", "--C", "1/2"]);
    assert_eq!(out.status.code(), Some(1));
    let msg = stderr(&out);
    assert!(msg.contains("F0 row (l=2, m1=0)"), "{msg}");
    assert_eq!(json(&out)["result"]["verdict"], "falsified");
}

#[test]
fn certify_below_threshold_has_positive_margins() {
    let out = run(&["certify", "--C", "1/4"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for cert in v["result"]["certificates"].as_array().unwrap() {
        for row in cert["rows"].as_array().unwrap() {
            assert!(row["value"].as_f64().unwrap() > 0.0, "{row}");
        }
    }
}

#[test]
fn certify_rejects_bad_constants() {
    assert_eq!(run(&["certify", "--C", "3/2"]).status.code(), Some(2));
    assert_eq!(run(&["certify", "--C", "abc"]).status.code(), Some(2));
}

#[test]
fn gap_values_and_monotonicity() {
    let coarse = json(&run(&["gap", "--lmax", "10", "--mmax", "10"]));
    let fine = json(&run(&["gap", "--lmax", "200", "--mmax", "10"]));
    let rows = |v: &Value| v["result"]["blocks"].as_array().unwrap().clone();
    let (coarse, fine_rows) = (rows(&coarse), rows(&fine));
    assert_eq!(coarse.len(), 22);
    for (a, b) in coarse.iter().zip(&fine_rows) {
        assert_eq!((&a["block"], &a["m1"]), (&b["block"], &b["m1"]));
        let (x, y) = (a["lambda_min"].as_f64().unwrap(), b["lambda_min"].as_f64().unwrap());
        assert!(y <= x + 1e-12);
        assert!(y >= 36.0 / 85.0);
    }
    let min = &fine["result"]["minimum"];
    assert_eq!((min["block"].as_str(), min["m1"].as_u64()), (Some("F1"), Some(1)));
}

#[test]
fn gap_rejects_empty_block() {
    let out = run(&["gap", "--mmax", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("empty block"));
}

#[test]
fn zero_knobs_are_usage_errors() {
    for args in [&["gap", "--lmax", "0"][..], &["deficit", "--taylor", "--nT", "0"], &["certify", "--lcut", "0"]] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains("must be positive"));
    }
}

#[test]
fn deficit_of_profiles() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", r#"{"kind": "maximiser", "component": "f0"}"#);
    let out = run(&["deficit", "--profile", &m]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let d = json(&out)["result"]["deficit"].as_f64().unwrap();
    assert!(d.abs() < 1e-10, "{d}");

    let b = write(dir.path(), "b.json", r#"{"kind": "bump", "component": "f0", "params": {"amplitude": 1, "radius": 2}}"#);
    let v = json(&run(&["deficit", "--profile", &b]));
    assert!(v["result"]["deficit"].as_f64().unwrap() > 0.0);

    let both = write(
        dir.path(),
        "v.json",
        r#"{"kind": "gaussian", "component": "f1", "params": {"amplitude": 0.5, "width": 1.5}}"#,
    );
    let v = json(&run(&["deficit", "--profile", &m, "--profile", &both]));
    assert!(v["result"]["deficit"].as_f64().unwrap() > 0.0);
}

#[test]
fn deficit_rejects_malformed_profile() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", r#"{"kind": "rational", "component": "f0", "params": {"amplitude": 1, "power": 2}}"#);
    let out = run(&["deficit", "--profile", &p]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("scale"), "{}", stderr(&out));

    let p = write(dir.path(), "q.json", r#"{"kind": "gaussian", "component": "f0", "params": {"amplitude": 1, "width": -1}}"#);
    assert_eq!(run(&["deficit", "--profile", &p]).status.code(), Some(2));
}

#[test]
fn deficit_taylor_default_direction() {
    let out = run(&["deficit", "--taylor"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json(&out)["result"];
    assert!((r["q_ratio"].as_f64().unwrap() - 0.6).abs() < 1e-12);
    assert!(r["slope"].as_f64().unwrap() >= 2.7);
    let last = r["points"].as_array().unwrap().last().unwrap();
    assert!((last["sandwich_ratio"].as_f64().unwrap() - 0.3).abs() < 0.02);
}

#[test]
fn deficit_taylor_from_state_file() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "g.json",
        r#"{"f0": {"lmax": 4, "entries": [{"l": 3, "m": [0,0,0,0], "value": 0.2}]},
            "f1": {"lmax": 4, "entries": [{"l": 2, "m": [0,0,0,0], "value": 0.1}]}}"#,
    );
    let out = run(&["deficit", "--taylor", "--state", &s, "--eps", "0.1,0.05"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["config"]["eps"], serde_json::json!([0.1, 0.05]));
    assert!(v["result"]["q_form"].as_f64().unwrap() > 0.0);

    let bad = write(dir.path(), "h.json", r#"{"f0": {"lmax": 2, "entries": [{"l": 1, "m": [3,0,0,0], "value": 1}]}, "f1": {"lmax": 2, "entries": []}}"#);
    let out = run(&["deficit", "--state", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("f0.entries[0]"), "{}", stderr(&out));
}

#[test]
fn audit_passes_and_detects_perturbation() {
    let out = run(&["audit"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let names: Vec<&str> = v["result"]["suites"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["orthonormality", "recurrence", "coupling", "dual-path"]);

    let out = run(&["audit", "--perturb-norm", "1e-6"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("orthonormality"));
}

#[test]
fn reports_are_byte_stable_and_carry_provenance() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["certify"][..], &["gap", "--lmax", "40"], &["audit", "--seed", "99"], &["deficit", "--taylor"]] {
        let a = dir.path().join("a.out");
        let b = dir.path().join("b.out");
        for p in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--out", p.to_str().unwrap()]);
            let out = run(&full);
            assert!(out.stdout.is_empty());
        }
        let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
        assert_eq!(x, y, "{args:?}");
        let v: Value = serde_json::from_slice(&x).unwrap();
        assert_eq!(v["tool"], "strichartz");
        assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
        assert!(v["config"].is_object());
        assert!(v["seed"].is_u64());
    }
}

#[test]
fn csv_output() {
    let out = run(&["gap", "--lmax", "20", "--mmax", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "block,m1,lmax,dimension,lambda_min,residual");
    assert_eq!(lines.len(), 5);
    let out = run(&["certify", "--block", "f0", "--lcut", "10", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("block,C,l,m1,kind,exact,lo,hi,value\nF0,36/85,2,0,bottom,0,,,"));
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SMALL: &str = r#"{"stages": 2, "stageRadii": [0.4, 0.6], "coverRadius": 0.6, "fit": {"maxDegree": 64},
  "grids": {"fitStep": 0.01, "verifyStep": 0.005}, "verify": {"densitySamples": 20000, "vacuitySamples": 100000}}"#;

const CONSTANT: &str = r#"{"stages": 1, "stageRadii": [0.5], "coverRadius": 0.5, "fit": {"maxDegree": 16},
  "grids": {"fitStep": 0.01, "verifyStep": 0.005},
  "boundary": {"pieces": [{"arcStartRad": 0, "arcEndRad": 6.283185307179586, "type": "const", "payload": 2.5}],
               "jumps": [], "continuitySet": [[0, 6.283185307179586]]},
  "verify": {"probes": [0.3, 2.0], "densitySamples": 20000, "vacuitySamples": 50000}}"#;

fn carleman(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carleman")).args(args).env("CARLEMAN_THREADS", "2").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn build(tmp: &TempDir, name: &str, config: &str) -> (Output, String) {
    let cfg = tmp.path().join(format!("{name}.json"));
    fs::write(&cfg, config).unwrap();
    let out = tmp.path().join(name);
    let o = carleman(&["build", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    (o, out.to_str().unwrap().to_owned())
}

fn with_json(s: &str, edit: impl FnOnce(&mut Value)) -> String {
    let mut v: Value = serde_json::from_str(s).unwrap();
    edit(&mut v);
    v.to_string()
}

#[test]
fn constant_boundary_single_stage() {
    let tmp = TempDir::new().unwrap();
    let (o, run) = build(&tmp, "c", CONSTANT);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for f in ["config.json", "chaplet.json", "polynomial.json", "run.json"] {
        assert!(Path::new(&run).join(f).exists(), "{f}");
    }
    let v = carleman(&["verify", "--run", &run]);
    assert_eq!(code(&v), 0, "{}", stderr(&v));
    let r = carleman(&["report", "--run", &run]);
    assert_eq!(code(&r), 0);
    assert!(stdout(&r).trim_end().ends_with("CERTIFIED (finite-stage)"), "{}", stdout(&r));
}

#[test]
fn tiny_tolerance_is_infeasible() {
    let tmp = TempDir::new().unwrap();
    let cfg = with_json(SMALL, |v| v["gauge"] = serde_json::json!({"eps0": 1e-9}));
    let (o, run) = build(&tmp, "tiny", &cfg);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
    let r = stdout(&carleman(&["report", "--run", &run]));
    assert!(r.contains("INFEASIBLE stages: 1, 2"), "{r}");
    assert!(!r.contains("CERTIFIED (finite-stage)"));
}

#[test]
fn malformed_config_reports_location() {
    let tmp = TempDir::new().unwrap();
    let (o, _) = build(&tmp, "bad", "{\"stages\": 2,\n  \"seed\": }");
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn invalid_field_is_named() {
    let tmp = TempDir::new().unwrap();
    let (o, _) = build(&tmp, "inv", r#"{"coverFraction": 0.9}"#);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("coverFraction"), "{}", stderr(&o));
}

#[test]
fn missing_artifacts_are_hard_errors() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("empty");
    fs::create_dir(&dir).unwrap();
    let d = dir.to_str().unwrap();
    assert_eq!(code(&carleman(&["verify", "--run", d])), 1);
    assert_eq!(code(&carleman(&["report", "--run", d])), 1);
}

#[test]
fn small_run_verifies_and_detects_tampering() {
    let tmp = TempDir::new().unwrap();
    let (o, run) = build(&tmp, "small", SMALL);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    // a jump angle as a probe is reported but never judged
    let v = carleman(&["verify", "--run", &run, "--probes", "0,1.2,3.141592653589793,4.7"]);
    assert_eq!(code(&v), 0, "{}", stderr(&v));
    let density = fs::read_to_string(Path::new(&run).join("density.csv")).unwrap();
    assert!(density.starts_with("point_theta,radius,good_ratio,bad_ratio,stderr,bound\n"));
    let approach = fs::read_to_string(Path::new(&run).join("approach.csv")).unwrap();
    assert!(approach.starts_with("point_theta,band_index,band_inner_r,sup_error,budget\n"));
    let rj: Value = serde_json::from_str(&fs::read_to_string(Path::new(&run).join("run.json")).unwrap()).unwrap();
    let probes = rj["verification"]["probes"].as_array().unwrap();
    assert_eq!(probes.len(), 4);
    assert_eq!(probes[0]["certified"], false);
    assert_eq!(probes[2]["certified"], false);
    assert_eq!(probes[1]["certified"], true);

    let poly = Path::new(&run).join("polynomial.json");
    let mut p: Value = serde_json::from_str(&fs::read_to_string(&poly).unwrap()).unwrap();
    let c = &mut p["terms"][0]["coefficients"][0][0];
    *c = Value::from(c.as_f64().unwrap() + 0.1);
    fs::write(&poly, p.to_string()).unwrap();
    let v = carleman(&["verify", "--run", &run]);
    assert_eq!(code(&v), 3);
    let r = stdout(&carleman(&["report", "--run", &run]));
    assert!(r.contains("exceeds its telescoped bound"), "{r}");
    assert!(!r.contains("CERTIFIED (finite-stage)"));
}

#[test]
fn runs_are_deterministic() {
    let tmp = TempDir::new().unwrap();
    let mut runs = Vec::new();
    for (name, threads) in [("a", "1"), ("b", "3")] {
        let (o, run) = build(&tmp, name, SMALL);
        assert_eq!(code(&o), 0);
        let v = carleman(&["--threads", threads, "verify", "--run", &run]);
        assert_eq!(code(&v), 0, "{}", stderr(&v));
        runs.push(run);
    }
    for f in ["run.json", "density.csv", "approach.csv", "polynomial.json"] {
        let a = fs::read(Path::new(&runs[0]).join(f)).unwrap();
        let b = fs::read(Path::new(&runs[1]).join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

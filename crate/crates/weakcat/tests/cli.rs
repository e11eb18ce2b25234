use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn weakcat(args: &[&str]) -> Output {
    weakcat_env(args, None)
}

fn weakcat_env(args: &[&str], seed: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_weakcat"));
    cmd.args(args).env_remove("WEAKCAT_SEED");
    if let Some(s) = seed {
        cmd.env("WEAKCAT_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn observable<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["observables"].as_array().unwrap().iter().find(|o| o["name"] == name).unwrap()
}

#[test]
fn cheshire_json_report() {
    let out = weakcat(&["run", "cheshire-cat", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let r = json(&out);
    assert_eq!(r["schema"], "weakcat/1");
    assert_eq!(r["interpretation"], "literal");
    let pl = &observable(&r, "PL")["weak_value"];
    assert_eq!(pl["re"].as_f64().unwrap(), 1.0);
    assert_eq!(pl["im"].as_f64().unwrap(), 0.0);
    assert!(text.contains("\"im\": 0.0,\n"), "fixed float format");
    let keys: Vec<&String> = r.as_object().unwrap().keys().collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn literal_helicity_sign_reports_deviation_and_succeeds() {
    let out = weakcat(&["run", "helicity-sign", "--interpretation", "literal", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let p3 = observable(&r, "P3");
    assert_eq!(p3["claimed"]["re"].as_f64(), Some(1.0));
    assert_eq!(p3["claimed"]["im"].as_f64(), Some(0.0));
    assert!(p3["deviation"].as_f64().unwrap() > 0.5);
    assert!(p3["claim_ref"].as_str().unwrap().contains("path 3"));
    assert_eq!(r["helicity_verdict"], "negative");
}

#[test]
fn exit_codes() {
    let missing = weakcat(&["weak", "missing.sdl", "--observable", "P3"]);
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("file not found"));

    assert_eq!(weakcat(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(weakcat(&["run", "cheshire-cat", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(weakcat(&["--help"]).status.code(), Some(0));

    let infeasible = weakcat(&["run", "helicity-reversing"]);
    assert_eq!(infeasible.status.code(), Some(1));
    assert_eq!(json(&infeasible)["feasible"], false);
    assert!(stderr(&infeasible).contains("post-selection impossible"));

    let unknown = weakcat(&["weak", "cheshire-cat", "--observable", "nope"]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn diagnostics_go_to_stderr_with_positions() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.sdl");
    std::fs::write(&path, "basis path = 1 2\nstate pre = |3>\nstate post = |1>\n").unwrap();
    let out = weakcat(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err = stderr(&out);
    assert!(err.contains("bad.sdl:2:14: error: unknown level `3`"), "{err}");
}

#[test]
fn exported_builtin_runs_like_the_builtin() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["helicity-sign", "helicity-preserving", "cheshire-cat"] {
        let export = weakcat(&["export", name]);
        assert_eq!(export.status.code(), Some(0));
        let path = dir.path().join(format!("{name}.sdl"));
        std::fs::write(&path, &export.stdout).unwrap();
        for interp in ["literal", "evolved"] {
            let a = json(&weakcat(&["run", name, "--interpretation", interp]));
            let b = json(&weakcat(&["run", path.to_str().unwrap(), "--interpretation", interp]));
            assert_eq!(a["scenario"], b["scenario"]);
            for (x, y) in a["observables"].as_array().unwrap().iter().zip(b["observables"].as_array().unwrap()) {
                for part in ["re", "im"] {
                    let (p, q) = (x["weak_value"][part].as_f64().unwrap(), y["weak_value"][part].as_f64().unwrap());
                    assert!((p - q).abs() <= 1e-12, "{name} {interp}");
                }
            }
        }
    }
}

#[test]
fn weak_pointer_sweep_and_audit() {
    let w = json(&weakcat(&["weak", "helicity-sign", "--observable", "P1", "--interpretation", "evolved"]));
    assert!((w["weak_value"]["re"].as_f64().unwrap() - (2.0 - 2f64.sqrt())).abs() < 1e-12);

    let p = json(&weakcat(&["pointer", "cheshire-cat", "--observable", "PL", "--g", "0.005", "--sigma", "1"]));
    let ratio = p["mean_position_shift"].as_f64().unwrap() / 0.005;
    assert!((ratio - 1.0).abs() < 1e-3, "{ratio}");

    let out =
        weakcat(&["sweep", "cheshire-cat", "--observable", "PL", "--g-from", "0.001", "--g-to", "0.1", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("g,position_shift,momentum_shift"));
    assert!(lines[1].starts_with("0.1,"));

    let too_strong = weakcat(&["pointer", "cheshire-cat", "--observable", "PL", "--g", "100"]);
    assert_eq!(too_strong.status.code(), Some(1));
    assert!(stderr(&too_strong).contains("overflow"));

    let audit = json(&weakcat(&["audit", "helicity-sign"]));
    let findings = audit["findings"].as_array().unwrap();
    let arm2 = findings.iter().find(|f| f["check"] == "orthogonality:arm2").unwrap();
    assert_eq!(arm2["value"].as_f64(), Some(0.0));
    assert_eq!(audit["passed"], true);
}

#[test]
fn sampling_is_seeded() {
    let args = ["sample", "helicity-sign", "--observable", "P3", "--interpretation", "evolved", "--shots", "2000"];
    let a = weakcat_env(&args, Some("7"));
    let b = weakcat_env(&args, Some("7"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = weakcat_env(&args, Some("8"));
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(weakcat_env(&args, None).stdout, weakcat_env(&args, Some("0")).stdout);
    assert_eq!(weakcat_env(&args, Some("x")).status.code(), Some(2));
    let v = json(&a);
    let total: u64 = v["outcomes"].as_array().unwrap().iter().map(|o| o["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 2000);
}

#[test]
fn list_and_check() {
    let out = weakcat(&["list"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("helicity-sign"));

    let builtin_file = Path::new(env!("CARGO_MANIFEST_DIR")).join("builtins/cheshire-cat.sdl");
    let out = weakcat(&["check", builtin_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("cheshire-cat: ok"));
}

#[test]
fn csv_matches_json_digits() {
    let j = json(&weakcat(&["run", "helicity-sign", "--interpretation", "evolved"]));
    let c =
        String::from_utf8(weakcat(&["run", "helicity-sign", "--interpretation", "evolved", "--format", "csv"]).stdout)
            .unwrap();
    let mut lines = c.lines();
    assert_eq!(lines.next(), Some("observable,re,im,claimed_re,claimed_im,deviation"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let o = observable(&j, f[0]);
        assert_eq!(f[1], o["weak_value"]["re"].to_string());
        assert_eq!(f[2], o["weak_value"]["im"].to_string());
        if !o["deviation"].is_null() {
            assert_eq!(f[5], o["deviation"].to_string());
            assert_eq!(f[3], o["claimed"]["re"].to_string());
        }
    }
}

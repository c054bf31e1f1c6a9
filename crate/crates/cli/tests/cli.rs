use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const QUADRATIC: &str = "; s = ([a,a], b)
(obj A (atoms a))
(obj B (atoms b))
(let s (lit !A B (((bag a a) b))))
s
";

fn write(name: &str, src: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, src).unwrap();
    path
}

fn cohtaylor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohtaylor"))
        .args(args)
        .env_remove("COHTAYLOR_DEFAULT_MODEL")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(o: &Output) -> Value {
    assert_eq!(code(o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn models_listed() {
    let out = json(&cohtaylor(&["--format", "json", "models"]));
    let names: Vec<&str> = out.as_array().unwrap().iter().map(|m| m["model"].as_str().unwrap()).collect();
    for m in ["rel", "wrel-bool", "wrel-nat", "wrel-rat", "wcs", "coh", "nucs", "pcoh"] {
        assert!(names.contains(&m), "{m} missing from {names:?}");
    }
}

#[test]
fn quadratic_taylor_contrast() {
    let f = write("quad.ctl", QUADRATIC);
    let f = f.to_str().unwrap();
    let entries = |model: &str| {
        let out = json(&cohtaylor(&["--model", model, "--bang-degree", "2", "--s-degree", "2", "--format", "json", "taylor", f]));
        out["entries"].as_array().unwrap().len()
    };
    // COH keeps only equal degrees: (0,0) and (1,1); WCS also has (0,1), (0,2)
    assert_eq!(entries("coh"), 2);
    assert_eq!(entries("wcs"), 4);
}

#[test]
fn json_output_is_deterministic() {
    let f = write("det.ctl", QUADRATIC);
    let args = ["--model", "wrel-rat", "--format", "json", "taylor", f.to_str().unwrap()];
    let a = cohtaylor(&args);
    let b = cohtaylor(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn homog_recovers_literal() {
    let f = write(
        "homog.ctl",
        "(model wrel-rat :bang-degree 2 :s-degree 2)
         (obj A (atoms a))
         (lit !A A (((bag) a 1/3) ((bag a) a 2) ((bag a a) a 1/2)))",
    );
    let out = json(&cohtaylor(&["--format", "json", "homog", f.to_str().unwrap(), "2"]));
    let entries = out["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0][2], "1/2");
}

#[test]
fn env_model_is_a_default() {
    let f = write("env.ctl", QUADRATIC);
    let out = Command::new(env!("CARGO_BIN_EXE_cohtaylor"))
        .args(["--format", "json", "--s-degree", "2", "taylor", f.to_str().unwrap()])
        .env("COHTAYLOR_DEFAULT_MODEL", "coh")
        .output()
        .unwrap();
    assert_eq!(json(&out)["entries"].as_array().unwrap().len(), 2);
}

#[test]
fn csv_output() {
    let f = write("csv.ctl", QUADRATIC);
    let out = cohtaylor(&["--model", "wrel-nat", "--format", "csv", "eval", f.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2, "{text}");
}

#[test]
fn not_summable_exits_3() {
    let f = write(
        "sum.ctl",
        "(model coh) (obj A (atoms a b)) (let f (lit A A ((a a) (b b)))) (sum f f)",
    );
    let out = cohtaylor(&["eval", f.to_str().unwrap()]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn type_errors_exit_2_with_position() {
    let f = write(
        "type.ctl",
        "(obj A (atoms a))\n(compose (der A) (id A))",
    );
    let out = cohtaylor(&["eval", f.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("2:1"), "{}", stderr(&out));

    let f = write("parse.ctl", "(taylor");
    let out = cohtaylor(&["eval", f.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("1:1"), "{}", stderr(&out));
}

#[test]
fn missing_file_exits_1() {
    let out = cohtaylor(&["eval", "/nonexistent/file.ctl"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn lawcheck_reports() {
    let out = json(&cohtaylor(&["--format", "json", "lawcheck", "--suite", "NEGATIVE_NUCS", "--suite", "SEMIRING"]));
    assert_eq!(out["failed"], 0);
    assert!(out["passed"].as_u64().unwrap() > 0);
    let suites: Vec<&str> = out["reports"].as_array().unwrap().iter().map(|r| r["suite"].as_str().unwrap()).collect();
    assert!(suites.contains(&"NEGATIVE_NUCS") && suites.contains(&"SEMIRING"));

    let out = cohtaylor(&["lawcheck", "--suite", "NO_SUCH_SUITE"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn fun_on_pcoh() {
    let f = write(
        "pgf.ctl",
        "(model pcoh :bang-degree 3)
         (obj U (atoms u) (witness (u 1)))
         (obj V (atoms v) (witness (v 1)))
         (lit !U V (((bag) v 1/4) ((bag u) v 1/4) ((bag u u) v 1/2)))",
    );
    let out = json(&cohtaylor(&["--format", "json", "fun", f.to_str().unwrap(), r#"[["u","1/2"]]"#]));
    // 1/4 + 1/4 * 1/2 + 1/2 * 1/4
    assert_eq!(out["coords"], serde_json::json!([["v", "1/2"]]));
}

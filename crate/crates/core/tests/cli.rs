mod common;

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minisol-iv"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .env("MINISOL_IV_NO_COLOR", "1")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_temp(name: &str, source: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("minisol-iv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, source).unwrap();
    path
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["tests/fixtures/corpus"]).status.code(), Some(1));
    assert_eq!(run(&["tests/fixtures/patched"]).status.code(), Some(0));
    assert_eq!(run(&["tests/fixtures/extra/empty.sol"]).status.code(), Some(0));
    assert_eq!(run(&["--fail-on", "info", "tests/fixtures/patched"]).status.code(), Some(1));
    assert_eq!(run(&["--fail-on", "error", "tests/fixtures/corpus/division_by_zero.sol"]).status.code(), Some(0));
    assert_eq!(run(&["tests/fixtures/missing.sol"]).status.code(), Some(2));
    assert_eq!(run(&["--detectors", "d7", "tests/fixtures/corpus"]).status.code(), Some(2));
    assert_eq!(run(&["--widen-delay", "0", "tests/fixtures/corpus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn input_errors_are_located() {
    let path = write_temp("broken.sol", "contract C {\n  function f() public { uint x = ; }\n}\n");
    let o = run(&[path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("broken.sol:2:") && err.contains("error: parse error"), "{err}");
    std::fs::remove_dir_all(path.parent().unwrap()).unwrap();
}

#[test]
fn json_report_shape() {
    let o = run(&["--format", "json", "tests/fixtures/corpus/unmatched_type.sol"]);
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["summary"], serde_json::json!({"error": 0, "warning": 1, "info": 0}));
    let d = &v["files"][0]["diagnostics"][0];
    assert_eq!(d["detector"], "D6-unmatched-type");
    assert_eq!((d["line"].as_u64(), d["column"].as_u64()), (Some(6), Some(9)));
    // key order is part of the format
    let keys = ["\"detector\"", "\"severity\"", "\"line\"", "\"column\"", "\"endLine\"", "\"endColumn\"", "\"message\"", "\"evidence\""];
    let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{text}");
    assert!(text.contains(r#""evidence":{"option":"[0, max]","enumRange":"[0, 2]"}"#), "{text}");
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["--format", "json", "tests/fixtures/corpus", "tests/fixtures/patched", "tests/fixtures/extra"];
    let (a, b) = (run(&args), run(&args));
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn text_report_lines() {
    let o = run(&["tests/fixtures/corpus/tautology.sol"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("tests/fixtures/corpus/tautology.sol:6:9: error[D1-tautology-contradiction]: "), "{text}");
    assert!(lines[1].starts_with("tests/fixtures/corpus/tautology.sol:12:9: warning[D1-tautology-contradiction]: "), "{text}");
    assert!(lines[2].starts_with("1 files, 1 errors, 1 warnings, 0 info"), "{text}");
    assert!(!text.contains('\x1b'));
}

#[test]
fn directory_inputs_are_sorted_and_filtered() {
    let o = run(&["--format", "json", "tests/fixtures/corpus"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let paths: Vec<&str> = v["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap()).collect();
    let mut sorted = paths.clone();
    sorted.sort();
    assert_eq!(paths, sorted);
    assert_eq!(paths.len(), 6);
    assert!(paths.iter().all(|p| Path::new(p).extension().unwrap() == "sol"));
}

#[test]
fn detector_selection_and_severity_override() {
    let o = run(&["--detectors", "d2,d3", "--format", "json", "tests/fixtures/corpus"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"], serde_json::json!({"error": 0, "warning": 1, "info": 1}));

    let o = run(&["--severity", "d3=error", "tests/fixtures/corpus/division_remainder.sol"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("error[D3-division-remainder]"));
}

#[test]
fn dumps() {
    let o = run(&["--dump-cfg", "tests/fixtures/extra/bounded_loop.sol"]);
    let text = stdout(&o);
    assert!(text.contains("// tests/fixtures/extra/bounded_loop.sol BoundedLoop\nfunction count:\nB0:\n"), "{text}");
    assert!(text.contains("B1->B2 [true]\nB1->B3 [false]\n"), "{text}");

    let o = run(&["--dump-states", "tests/fixtures/extra/bounded_loop.sol"]);
    let text = stdout(&o);
    assert!(text.contains("    i ∈ [0, 10]"), "{text}");
    assert!(text.contains("  end:\n"), "{text}");
}

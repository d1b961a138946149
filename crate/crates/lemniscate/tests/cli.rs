//! End-to-end tests of the binary: exit codes, byte determinism, and the
//! echoed-input round trip.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lemniscate"))
}

fn write_temp(name: &str, content: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join("lemniscate-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const QUARTIC: &str = r#"{"coeffs": [[4,0],[0,0],[-5,0],[0,0],[1,0]]}"#;
const FIG1_LEFT: &str = r#"{"coeffs": [[-1,0],[0,0],[1,0]], "q": {"coeffs": [[1,0],[0,0],[1,0]]}}"#;
const FIG1_RIGHT: &str = r#"{"coeffs": [[-4,0],[0,0],[1,0]], "q": {"coeffs": [[1,0],[0,0],[1,0]]}}"#;

#[test]
fn analyze_success_and_content() {
    let input = write_temp("quartic.json", QUARTIC);
    let out = run(&["analyze", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["graph"]["vertex_count"], 3);
    assert_eq!(report["graph"]["component_count"], 3);
    assert_eq!(report["connectivity"]["connected"], false);
    assert_eq!(report["faces"]["circle"], 5);
    assert_eq!(report["faces"]["ring"], 2);
    assert_eq!(report["teichmuller"]["all_pass"], true);
}

#[test]
fn analyze_connected_verdict() {
    let input = write_temp("fig1_left.json", FIG1_LEFT);
    let out = run(&["analyze", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["connectivity"]["connected"], true);
}

#[test]
fn deterministic_bytes_and_echoed_input_roundtrip() {
    let input = write_temp("det.json", QUARTIC);
    let a = run(&["analyze", "--input", input.to_str().unwrap()]);
    let b = run(&["analyze", "--input", input.to_str().unwrap()]);
    assert_eq!(a.stdout, b.stdout);

    // the echoed input reproduces the identical report
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let echoed = serde_json::to_string(&report["input"]).unwrap();
    let echo_file = write_temp("det_echo.json", &echoed);
    let c = run(&["analyze", "--input", echo_file.to_str().unwrap()]);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn usage_errors_exit_64() {
    // malformed JSON
    let bad = write_temp("bad.json", "this is not json");
    let out = run(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));

    // constant polynomial: degree precondition
    let constant = write_temp("const.json", r#"{"coeffs": [[3,0]]}"#);
    let out = run(&["analyze", "--input", constant.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(64));

    // unknown flag
    let out = run(&["analyze", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(64));

    // missing file
    let out = run(&["analyze", "--input", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn fingerprint_exit_codes() {
    // z^3: proper, residual tiny, exit 0
    let cube = write_temp("cube.json", r#"{"coeffs": [[0,0],[0,0],[0,0],[1,0]]}"#);
    let out = run(&["fingerprint", "--input", cube.to_str().unwrap(), "--samples", "256"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["residual"].as_f64().unwrap() < 1e-12);

    // an impossible tolerance forces the verification exit code
    let quad = write_temp("quad.json", r#"{"coeffs": [[-0.25,0],[0,0],[1,0]]}"#);
    let out = run(&[
        "fingerprint",
        "--input",
        quad.to_str().unwrap(),
        "--samples",
        "256",
        "--tol-fingerprint",
        "1e-18",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // non-smooth level names the offending critical value
    let critical = write_temp("crit.json", r#"{"coeffs": [[-1,0],[0,0],[1,0]]}"#);
    let out = run(&["fingerprint", "--input", critical.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("critical"));
}

#[test]
fn render_svg_counts() {
    let input = write_temp("fig1l.json", FIG1_LEFT);
    let out = run(&["render", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.contains(r#""vertices":2"#));
    assert!(svg.contains(r#""edges":4"#));
    assert!(svg.contains(r#""connected":true"#));
    assert!(svg.contains(r#""circle_faces":4"#));
    assert_eq!(svg.matches(r#"class="edge""#).count(), 4);

    let input = write_temp("fig1r.json", FIG1_RIGHT);
    let out = run(&["render", "--input", input.to_str().unwrap()]);
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.contains(r#""connected":false"#));
    assert!(svg.contains(r#""components":2"#));

    // deterministic bytes
    let again = run(&["render", "--input", input.to_str().unwrap()]);
    assert_eq!(again.stdout.as_slice(), svg.as_bytes());
}

#[test]
fn render_with_level_overlay() {
    let input = write_temp("ring.json", r#"{"coeffs": [[1.3333333333333333,0],[0,0],[-1.6666666666666667,0],[0,0],[0.3333333333333333,0]]}"#);
    let out = run(&["render", "--input", input.to_str().unwrap(), "--level", "1.0"]);
    assert_eq!(out.status.code(), Some(0));
    let svg = String::from_utf8(out.stdout).unwrap();
    // level 1 sits between the critical moduli 0.75 and 4/3: two overlay
    // components in the ring domains
    assert_eq!(svg.matches(r#"class="level""#).count(), 2);
}

#[test]
fn verify_subcommand() {
    let input = write_temp("verify.json", FIG1_LEFT);
    let out = run(&["verify", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["all_pass"], true);
    assert!(report["items"].as_array().unwrap().len() >= 8);
}

#[test]
fn stdin_input() {
    let mut child = bin()
        .args(["analyze", "--input", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(QUARTIC.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

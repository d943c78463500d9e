use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

const G111: &str = r#"{"dim": 2, "gamma": [{"indices": [1, 1, 1], "poly": "x2"}]}"#;
const FLAT: &str = r#"{"dim": 2, "gamma": []}"#;

fn chart_file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(chart: &NamedTempFile, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fedosov"))
        .arg("--chart")
        .arg(chart.path())
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn flat_star_product() {
    let out = run(&chart_file(FLAT), &["star", "x1", "x2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("f * g = x1 x2 + (1/2 I) h\n"));
}

#[test]
fn hamiltonian_at_degree_five() {
    let out = run(&chart_file(G111), &["hamiltonian", "--degree", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(
        stdout(&out).starts_with("H(t) = -(1/6) x2 y1^3 - (1/24) y1^3 y2 - (1/240) x2 t y1^5\n")
    );
}

#[test]
fn verify_passes() {
    let out = run(&chart_file(G111), &["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(!text.contains("FAIL"));
    assert!(text.trim_end().ends_with("checks passed"));
}

#[test]
fn frame_and_exterior() {
    let chart = chart_file(G111);
    let out = run(&chart, &["frame"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("lambda1 = x2\nlambda2 = -x1\n"));
    let out = run(&chart, &["exterior", "x1 x2", "--wedge", "1: x2; 2: x1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("PASS d_star_squared"));
}

#[test]
fn trivialize_round_trips() {
    let chart = chart_file(G111);
    for extra in [&[][..], &["--inverse"][..]] {
        let mut args = vec!["trivialize", "x1^2 x2"];
        args.extend_from_slice(extra);
        let out = run(&chart, &args);
        assert_eq!(out.status.code(), Some(0));
        assert!(stdout(&out).contains("PASS round_trip"));
    }
}

#[test]
fn json_output() {
    let out = run(&chart_file(FLAT), &["--format", "json", "star", "x1", "x2"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["query"], "star x1 x2");
    assert_eq!(doc["parameters"]["n_work"], 6);
    assert!(doc["result_terms"].as_array().unwrap().len() == 2);
    assert_eq!(doc["checks"][0]["passed"], true);
}

#[test]
fn output_is_deterministic() {
    let chart = chart_file(G111);
    let a = run(&chart, &["--format", "json", "verify"]);
    let b = run(&chart, &["--format", "json", "verify"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_file() {
    let chart = chart_file(FLAT);
    let dest = NamedTempFile::new().unwrap();
    let out = run(
        &chart,
        &["--out", dest.path().to_str().unwrap(), "star", "x2", "x1"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read_to_string(dest.path()).unwrap();
    assert!(written.starts_with("f * g = x1 x2 - (1/2 I) h\n"));
}

#[test]
fn bad_input_exits_two() {
    for text in [
        r#"{"dim": 3, "gamma": []}"#,
        "{\"dim\": 2,\n  \"gamma\": [}",
        r#"{"dim": 2, "gamma": [{"indices": [0, 1, 1], "poly": "x1"}]}"#,
        r#"{"dim": 2, "gamma": [{"indices": [1, 1, 1], "poly": "x1 +"}]}"#,
    ] {
        let out = run(&chart_file(text), &["verify"]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    }
    let out = run(&chart_file(FLAT), &["star", "x1 ^", "x2"]);
    assert_eq!(out.status.code(), Some(2));
}

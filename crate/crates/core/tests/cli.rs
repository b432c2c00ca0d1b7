use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_verify-fe"))
}

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn verify(form: &str, a: &str, level: &str, extra: &[&str]) -> Output {
    let f = fixture(form);
    let mut args = vec!["--form", f.as_str(), "--a", a, "--p", "5", "--level", level];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn headline_passes_with_json_report() {
    let out = verify("11a1.json", "11", "1", &[]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["summary"]["pass"], true);
    assert_eq!(v["header"]["classification"]["P1"], serde_json::json!([11]));
    assert_eq!(v["records"].as_array().unwrap().len(), 5);
}

#[test]
fn alternative_convention_fails_identity() {
    let out = verify("p2_synthetic.json", "2", "1", &["--twist-convention", "paper-text", "--format", "text"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn low_precision_is_reported_as_such() {
    for prec in ["1", "2"] {
        let out = verify("11a1.json", "11", "2", &["--precision", prec]);
        assert_eq!(out.status.code(), Some(2), "precision {prec}");
    }
}

#[test]
fn bad_input_exits_with_three() {
    assert_eq!(verify("11a1.json", "10", "1", &[]).status.code(), Some(3));
    assert_eq!(verify("11a1.json", "1", "1", &[]).status.code(), Some(3));
    assert_eq!(run(&["--form", "/nonexistent.json", "--a", "2", "--p", "5", "--level", "1"]).status.code(), Some(3));
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"label":"x","weight":3,"level":11,"coefficients":{},"special":{}}"#).unwrap();
    let out = run(&["--form", bad.to_str().unwrap(), "--a", "2", "--p", "5", "--level", "1"]);
    assert_eq!(out.status.code(), Some(3));
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["--form", bad.to_str().unwrap(), "--a", "2", "--p", "5", "--level", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    for p in &paths {
        let out = verify("p1_delta_minus.json", "2", "2", &["--report", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&paths[0]).unwrap();
    let b = std::fs::read(&paths[1]).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn inflation_check_is_consistent() {
    let out = verify("11a1.json", "11", "1", &["--check-inflation"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["inflation"]["consistent"], true);
    assert_eq!(v["inflation"]["to_level"], 2);
}

#[test]
fn frobenius_shift_does_not_change_outcome() {
    let out = verify("11a1.json", "11", "2", &["--frobenius-shift", "7"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn subcommands_run() {
    let out = run(&["irreps", "--p", "3", "--level", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("theta"));

    let out = run(&["lemma-check", "--p", "5", "--level", "2", "--q", "7", "--x", "1/11"]);
    assert_eq!(out.status.code(), Some(0));

    let out =
        run(&["eval-charelem", "--p", "5", "--level", "1", "--q", "2", "--x", "3", "--kind", "m", "--char", "trivial"]);
    assert_eq!(out.status.code(), Some(0));

    let f = fixture("11a1.json");
    let out = run(&["euler", "--p", "5", "--level", "1", "--form", &f, "--q", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["classify", "--p", "5", "--level", "1", "--form", &f, "--a", "11"]);
    assert_eq!(out.status.code(), Some(0));

    let out = run(&["count-points", "--curve", "0", "-1", "1", "-10", "-20", "--q", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("-2"));
    let out = run(&["count-points", "--curve", "0", "-1", "1", "-10", "-20", "--q", "11"]);
    assert_eq!(out.status.code(), Some(3));
}

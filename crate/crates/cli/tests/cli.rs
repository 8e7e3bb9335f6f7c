use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_corrdyn"))
}

fn cfg(name: &str) -> String {
    format!("{}/../../configs/{name}.toml", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn describe_prints_degrees() {
    let out = bin().args(["describe", &cfg("ecm2")]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("correspondence f = graph(phi)  degrees (2, 3, 4)"), "{text}");
}

#[test]
fn degrees_and_spectra_accept_expressions() {
    let out = bin().args(["degrees", &cfg("ecm2"), "f", "--k", "1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("recurrence order 2 [3, -2]"), "{text}");
    let out = bin().args(["spectra", &cfg("ecm"), "graph(phi)"]).output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("H^2"));
}

#[test]
fn exit_codes() {
    let ok =
        bin().args(["check", &cfg("e2"), "--suite", "semisimple", "--seed", "1", "--samples", "3"]).status().unwrap();
    assert_eq!(ok.code(), Some(0));
    let bad_suite = bin().args(["check", &cfg("e2"), "--suite", "nope"]).status().unwrap();
    assert_eq!(bad_suite.code(), Some(2));
    let missing = bin().args(["describe", "/nonexistent.toml"]).status().unwrap();
    assert_eq!(missing.code(), Some(2));
    let bad_expr = bin().args(["degrees", &cfg("e2"), "graph("]).status().unwrap();
    assert_eq!(bad_expr.code(), Some(2));
}

#[test]
fn report_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    for (path, format) in [(&json, "json"), (&csv, "csv")] {
        let status = bin()
            .args(["report", &cfg("e"), "--suite", "castelnuovo_severi", "--seed", "9", "--samples", "5"])
            .args(["--format", format, "--no-timing", "--out"])
            .arg(path)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 5);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 6);
}

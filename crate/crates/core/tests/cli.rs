use std::path::Path;
use std::process::Command;

use semispray::cli::{Report, Status};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semispray"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn report(path: &Path) -> Report {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_prints_text_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "p.json", r#"{"n": 2, "G": ["y2", "-y2^2/2"]}"#);
    let json = dir.path().join("r.json");
    let out = bin().args(["analyze", "--file", &file, "--json-out"]).arg(&json).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Phi (R^i_j)"));
    let r = report(&json);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.analysis.unwrap().jacobi, vec![vec!["0", "y2"], vec!["0", "0"]]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"n": 2, "G": ["x1", "0"], "theta": {"theta0": "(y1^2 + y2^2)/2", "theta": ["y1", "y2"]}}"#,
    );
    let json = dir.path().join("r.json");
    let code = bin().args(["check-theta", "--file", &bad, "--json-out"]).arg(&json).status().unwrap();
    assert_eq!(code.code(), Some(2));
    assert_eq!(report(&json).status, Status::Failed);

    let inc = write(dir.path(), "inc.json", r#"{"n": 3, "G": ["x2*y1^2 + t*y3", "x1*x3*y2", "y1*y2 - x2^2"], "theta": {"theta0": "1", "theta": ["0", "0", "0"]}}"#);
    let code = bin().args(["check-theta", "--file", &inc, "--json-out"]).arg(&json).status().unwrap();
    assert_eq!(code.code(), Some(3));
    assert_eq!(report(&json).status, Status::Inconclusive);

    let missing = write(dir.path(), "m.json", r#"{"n": 1, "G": ["0"], "typo": 1}"#);
    let out = bin().args(["analyze", "--file", &missing]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));

    assert_eq!(bin().arg("nonsense").status().unwrap().code(), Some(1));
    assert_eq!(bin().arg("--help").status().unwrap().code(), Some(0));
}

#[test]
fn geodesic_and_symbol_table() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "osc.json", r#"{"n": 1, "G": ["x1/2"], "config": {"step": 0.01, "steps": 50}}"#);
    let out = bin().args(["geodesic", "--file", &file, "--start", "0,1,0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2 + 51);

    let json = dir.path().join("s.json");
    let out = bin().args(["symbol-dims", "--n-max", "4", "--json-out"]).arg(&json).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let rows = report(&json).symbol.unwrap();
    assert_eq!(rows.iter().map(|r| r.dim_k).collect::<Vec<_>>(), vec![0, 3, 12, 30]);
}

#[test]
fn identical_runs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "l.json", r#"{"n": 2, "L": "exp(t)*(y1^2 + y2^2)/2 - x1*x2"}"#);
    let mut bytes = Vec::new();
    for k in 0..2 {
        let json = dir.path().join(format!("r{k}.json"));
        let code = bin()
            .args(["check-lagrangian", "--file", &file, "--seed", "42", "--json-out"])
            .arg(&json)
            .status()
            .unwrap();
        assert_eq!(code.code(), Some(0));
        bytes.push(std::fs::read(&json).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
}

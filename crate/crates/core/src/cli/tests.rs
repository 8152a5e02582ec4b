use super::*;

struct Run {
    code: i32,
    out: String,
    err: String,
    report: Option<Report>,
}

fn run_with(problem: Option<&str>, args: &[&str]) -> Run {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("report.json");
    let file = dir.path().join("problem.json");
    let mut argv: Vec<String> = vec!["semispray".into()];
    argv.extend(args.iter().map(|s| s.to_string()));
    if let Some(p) = problem {
        std::fs::write(&file, p).unwrap();
        argv.push("--file".into());
        argv.push(file.display().to_string());
    }
    argv.push("--json-out".into());
    argv.push(json.display().to_string());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    let report = std::fs::read_to_string(&json)
        .ok()
        .map(|s| serde_json::from_str(&s).unwrap());
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
        report,
    }
}

#[test]
fn problem_file_rejects_unknown_keys() {
    assert!(ProblemFile::from_json(r#"{"n": 1, "G": ["0"], "extra": 1}"#).is_err());
    assert!(ProblemFile::from_json(r#"{"n": 1, "G": ["0"], "config": {"sed": 1}}"#).is_err());
    assert!(matches!(ProblemFile::from_json(r#"{"n": 0}"#), Err(ProblemError::ZeroDimension)));
    assert!(matches!(
        ProblemFile::from_json(r#"{"n": 1, "G": ["x2"]}"#),
        Err(ProblemError::Semispray(_))
    ));
    let p = ProblemFile::from_json(r#"{"n": 2, "G": ["y2", "-y2^2/2"], "config": {"seed": 7, "box": [0.5, 1.0]}}"#)
        .unwrap();
    let mut c = ResolvedConfig::default();
    c.merge(p.config.as_ref().unwrap());
    assert_eq!(c.seed, 7);
    assert_eq!(c.sample_box, [0.5, 1.0]);
}

#[test]
fn analyze_example_three() {
    let r = run_with(Some(r#"{"n": 2, "G": ["y2", "-y2^2/2"]}"#), &["analyze"]);
    assert_eq!(r.code, 0, "{}", r.err);
    let a = r.report.unwrap().analysis.unwrap();
    assert_eq!(a.jacobi[0][1], "y2");
    assert_eq!(a.jacobi[1][0], "0");
    assert!(!a.classification.is_flat);
    assert!(!a.classification.is_isotropic);
    assert!(!a.classification.notes.is_empty());
    assert!(r.out.contains("flat: false"));
}

#[test]
fn analyze_free_particle_and_errors() {
    let r = run_with(Some(r#"{"n": 2, "G": ["0", "0"]}"#), &["analyze"]);
    assert_eq!(r.code, 0);
    assert!(r.report.unwrap().analysis.unwrap().classification.is_flat);

    let r = run_with(Some(r#"{"n": 2}"#), &["analyze"]);
    assert_eq!(r.code, 1);
    let rep = r.report.unwrap();
    assert_eq!(rep.status, Status::Error);
    assert!(rep.error.unwrap().contains("G"));

    let r = run_with(Some("{\"n\": 1,\n \"G\": [\"y1 +\"]}"), &["analyze"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("position"));
    let r = run_with(Some("{\"n\": 1,\n \"G\": [\"0\"],}"), &["analyze"]);
    assert_eq!(r.code, 1);
    assert!(r.err.contains("line 2"));
}

#[test]
fn usage_errors_exit_one() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    assert_eq!(run(["semispray", "frobnicate"], &mut out, &mut err), 1);
    assert_eq!(run(["semispray", "analyze"], &mut out, &mut err), 1);
    assert_eq!(run(["semispray", "symbol-dims", "--n-max", "0"], &mut out, &mut err), 1);
}

#[test]
fn check_theta_cases() {
    let free = r#"{"n": 2, "G": ["0", "0"], "theta": {"theta0": "(y1^2 + y2^2)/2", "theta": ["y1", "y2"]}}"#;
    let r = run_with(Some(free), &["check-theta"]);
    assert_eq!(r.code, 0, "{}", r.out);
    let h = r.report.unwrap().helmholtz.unwrap();
    assert_eq!(h.verdict, Verdict::LagrangianConfirmed);
    assert!(r.out.contains("L = "));

    let one = r#"{"n": 1, "G": ["x1*y1^3"], "theta": {"theta0": "x1", "theta": ["t"]}}"#;
    let r = run_with(Some(one), &["check-theta"]);
    assert!(r.report.unwrap().helmholtz.unwrap().details[0].contains("n = 1"));

    let bad = r#"{"n": 2, "G": ["x1", "0"], "theta": {"theta0": "(y1^2 + y2^2)/2", "theta": ["y1", "y2"]}}"#;
    let r = run_with(Some(bad), &["check-theta"]);
    assert_eq!(r.code, 2);
    assert_eq!(r.report.unwrap().helmholtz.unwrap().verdict, Verdict::HelmholtzFails);

    let r = run_with(Some(r#"{"n": 1, "G": ["0"]}"#), &["check-theta"]);
    assert_eq!(r.code, 1);
}

#[test]
fn check_lagrangian_cases() {
    let r = run_with(Some(r#"{"n": 2, "L": "(y1^2 + y2^2)/2"}"#), &["check-lagrangian"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.contains("derived G = [0, 0]"));

    let osc = r#"{"n": 2, "L": "(y1^2 + y2^2)/2 - (x1^2 + 4*x2^2)/2"}"#;
    let r = run_with(Some(osc), &["check-lagrangian"]);
    assert_eq!(r.code, 0, "{}", r.out);
    let el = r.report.unwrap().euler_lagrange.unwrap();
    assert!(el.passed && el.max_residual.unwrap() <= 1e-6);
    assert_eq!(el.residuals.len(), EL_TRAJECTORIES);

    let r = run_with(Some(r#"{"n": 1, "L": "y1"}"#), &["check-lagrangian"]);
    assert_eq!(r.code, 2);
    assert!(r.report.unwrap().error.unwrap().contains("singular"));
}

#[test]
fn symbol_dims_table() {
    let r = run_with(None, &["symbol-dims", "--n-max", "3"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("2\t9\t18\t(6,3,0)\t3\ttrue\ttrue"));
    assert!(r.out.contains("1\t4\t6\t(2,0)\t0\ttrue\ttrue"));
    assert_eq!(r.report.unwrap().symbol.unwrap().len(), 3);
}

#[test]
fn geodesic_export() {
    let osc = r#"{"n": 1, "G": ["x1/2"]}"#;
    let r = run_with(Some(osc), &["geodesic", "--start", "0,1,0", "--step", "0.01", "--steps", "100"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.starts_with("# method=rk4 n=1"));
    let g = r.report.unwrap().geodesic.unwrap();
    assert_eq!(g.samples, 101);
    assert!((g.end[1] - 1f64.cos()).abs() < 1e-8);

    let blow = r#"{"n": 1, "G": ["-1/(2*(1 - t))"]}"#;
    let r = run_with(Some(blow), &["geodesic", "--start", "0,0,0", "--step", "0.25", "--steps", "8"]);
    assert_eq!(r.code, 2);
    assert!(r.out.contains("status=truncated"));

    let r = run_with(Some(osc), &["geodesic", "--start", "0,1"]);
    assert_eq!(r.code, 1);
}

#[test]
fn reports_are_reproducible_and_round_trip() {
    let p = r#"{"n": 2, "G": ["x2*y1", "t*y2^2"], "theta": {"theta0": "y1*y2", "theta": ["y2", "y1"]}}"#;
    let a = run_with(Some(p), &["check-theta", "--seed", "11"]);
    let b = run_with(Some(p), &["check-theta", "--seed", "11"]);
    let (a, b) = (a.report.unwrap(), b.report.unwrap());
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.config.seed, 11);
    let back: Report = serde_json::from_str(&a.to_json()).unwrap();
    assert_eq!(back, a);

    let r = run_with(Some(p), &["analyze", "--timings"]);
    assert!(r.report.unwrap().timings.is_some());
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported as FAIL but do not fail
//! the run; any other failure, or a known failure that starts passing, exits 1.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semispray::expr::{parse, Expr, Point, Var, ZeroTestConfig};
use semispray::forms::oracle::{contraction_oracle, d_r_oracle};
use semispray::forms::{d_h, d_j, d_phi, d_r, dtheta_matrix, poincare_cartan, Lagrangian, SemiBasicOneForm};
use semispray::geometry::oracle::Oracle;
use semispray::geometry::{classify, structure_identities, Semispray};
use semispray::helmholtz::{is_first_order_solution, semispray_from_lagrangian, verify_lagrangian, Verdict};
use semispray::numeric::{
    euler_lagrange_residual, fd_check, integrate_geodesic, numeric_rank, SamplePlan, RANK_THRESHOLD,
};
use semispray::spencer::symbol_dims;

const SYMBOL_BUDGET_SECS: f64 = 60.0;
const ZERO_TOL: f64 = 1e-9;
const ORACLE_TOL: f64 = 1e-4;
const ORACLE_POINTS: usize = 20;
const EL_TOL: f64 = 1e-6;
const EL_STEP: f64 = 1e-3;
const EL_STEPS: usize = 1000;
const EL_TRAJECTORIES: u64 = 10;
const FD_TOL: f64 = 1e-5;
const FD_EXPRESSIONS: usize = 200;
const RK4_RATIO: (f64, f64) = (12.0, 20.0);
const SEED: u64 = 0x5eed;

/// The displayed Jacobi component of the first worked example is off by a
/// factor 2 in its `g` term; the code computes the correct value.
const KNOWN_FAILURES: &[usize] = &[3];

fn cfg() -> ZeroTestConfig {
    ZeroTestConfig {
        tolerance: ZERO_TOL,
        seed: SEED,
        ..ZeroTestConfig::default()
    }
}

fn zero(e: &Expr, n: usize) -> bool {
    e.is_zero(n, &cfg()).unwrap_or(false)
}

fn same(e: &Expr, text: &str, n: usize) -> bool {
    zero(&(e - parse(text, n).unwrap()), n)
}

fn sp(n: usize, g: &[&str]) -> Semispray {
    Semispray::parse(n, g).unwrap()
}

fn lag(text: &str, n: usize) -> Lagrangian {
    Lagrangian::parse(text, n).unwrap()
}

fn form(n: usize, t0: &str, t: &[&str]) -> SemiBasicOneForm {
    SemiBasicOneForm::parse(n, t0, t).unwrap()
}

type Outcome = (bool, String);

fn criterion1() -> Outcome {
    let start = Instant::now();
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 1..=6 {
        let d = symbol_dims(n, 1);
        let row_ok = d.dim_g1 == (n + 1).pow(2)
            && d.dim_g2 == (n + 1).pow(2) * (n + 2) / 2
            && d.chain == d.chain_expected
            && d.chain_sum == d.dim_g2
            && d.symbol_entries;
        ok &= row_ok;
        rows.push(format!("n={n}: g1={} g2={} chain={:?}", d.dim_g1, d.dim_g2, d.chain));
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < SYMBOL_BUDGET_SECS;
    (ok, format!("{}; {secs:.1}s", rows.join("; ")))
}

fn criterion2() -> Outcome {
    let mut ok = true;
    let mut rows = Vec::new();
    for n in 1..=5 {
        let d = symbol_dims(n, 1);
        let c = (n + 1) * n * (n - 1) / 6;
        ok &= d.dim_k == 3 * c && d.exactness.tau_sigma2_zero && d.exactness.rank_sigma2 == d.exactness.kernel_tau;
        rows.push(format!(
            "n={n}: K={} tau.sigma2=0:{} rank={} ker tau={}",
            d.dim_k, d.exactness.tau_sigma2_zero, d.exactness.rank_sigma2, d.exactness.kernel_tau
        ));
    }
    (ok, rows.join("; "))
}

/// `ẍ¹ + f(t, ẋ²) = 0`, `ẍ² + g(t) = 0`.
fn example1(f: &str, g: &str) -> Semispray {
    sp(2, &[&format!("({f})/2"), &format!("({g})/2")])
}

fn criterion3() -> Outcome {
    let n = 2;
    let (f, g) = ("t*y2^2", "t");
    let r12 = example1(f, g).jacobi()[0][1].clone();
    let fe = parse(f, n).unwrap();
    let ge = parse(g, n).unwrap();
    let f_ty = fe.diff(Var::T).diff(Var::y(1));
    let f_yy = fe.diff(Var::y(1)).diff(Var::y(1));
    let displayed = Expr::ratio(-1, 2) * &f_ty + &ge * &f_yy;
    let corrected = Expr::ratio(-1, 2) * &f_ty + Expr::ratio(1, 2) * &ge * &f_yy;
    let matches_displayed = zero(&(&r12 - &displayed), n);
    let matches_corrected = zero(&(&r12 - &corrected), n);

    // Under the displayed condition f_ty = 2 g f_yy this fixture should be flat.
    let flips = !classify(&example1(f, g), &cfg()).unwrap().is_flat
        && classify(&example1("t^2*y2^2", g), &cfg()).unwrap().is_flat;
    let corrected_flat = classify(&example1("(y2 + t^2/2)^2", g), &cfg()).unwrap().is_flat;
    (
        matches_displayed && flips,
        format!(
            "R12 = {r12}; displayed value matches: {matches_displayed}; \
             -f_ty/2 + g f_yy/2 matches: {matches_corrected}; flip fixture flat: {flips}; \
             fixture with f_ty = g f_yy flat: {corrected_flat}"
        ),
    )
}

fn criterion4() -> Outcome {
    let n = 2;
    let mut ok = true;
    let mut notes = Vec::new();
    for f in ["sin(t*x2)", "x2^3 + t", "-x2"] {
        let s = sp(n, &[&format!("({f})/2"), "t/2"]);
        let df = parse(f, n).unwrap().diff(Var::x(1)).to_string();
        let phi = s.jacobi();
        let conn_zero = s.connection().spatial.iter().flatten().all(|e| zero(e, n));
        let phi_ok = same(&phi[0][1], &df, n) && same(&phi[0][0], "0", n) && same(&phi[1][0], "0", n) && same(&phi[1][1], "0", n);
        ok &= conn_zero && phi_ok;
        notes.push(format!("f={f}: N^i_j = 0 {conn_zero}, Phi {phi_ok}"));
    }
    let s = sp(n, &["y2", "-y2^2/2"]);
    let phi = s.jacobi();
    let phi_ok = same(&phi[0][1], "y2", n) && same(&phi[0][0], "0", n) && same(&phi[1][0], "0", n) && same(&phi[1][1], "0", n);
    let conn = &s.connection().spatial;
    let conn_ok = same(&conn[0][1], "1", n) && same(&conn[1][1], "-y2", n) && same(&conn[0][0], "0", n) && same(&conn[1][0], "0", n);
    ok &= phi_ok && conn_ok;
    notes.push(format!("third example: N {conn_ok}, Phi {phi_ok}"));
    (ok, notes.join("; "))
}

fn arbitrary_forms(n: usize) -> Vec<SemiBasicOneForm> {
    match n {
        1 => vec![
            form(1, "x1*y1^3", &["sin(y1)"]),
            form(1, "exp(t)*y1^2/2 - x1^2", &["exp(t)*y1"]),
            form(1, "t", &["x1*y1"]),
        ],
        2 => vec![
            form(2, "x1*y2^3", &["t*y1", "exp(y2)"]),
            form(2, "(y1^2 + y2^2)/2", &["y1", "y2"]),
            form(2, "sin(x2)*y1", &["x1", "y2^2"]),
        ],
        _ => vec![
            form(3, "y1*y2*y3", &["x2", "t*y3", "y1^2"]),
            form(3, "(y1^2 + y2^2 + y3^2)/2", &["y1", "y2", "y3"]),
        ],
    }
}

fn criterion5() -> Outcome {
    let c = cfg();
    let mut ok = true;
    let mut notes = Vec::new();

    let flat = [
        sp(2, &["0", "0"]),
        sp(2, &["sin(t)/2", "t/2"]),
        sp(3, &["0", "t", "exp(t)"]),
        sp(2, &["(y2 + t^2/2)^2/2", "t/2"]),
    ];
    let mut count = 0;
    for s in &flat {
        ok &= classify(s, &c).unwrap().is_flat;
        for th in arbitrary_forms(s.n()) {
            ok &= d_r(&th, s).unwrap().is_zero(&c).unwrap_or(false);
            count += 1;
        }
    }
    notes.push(format!("flat: {count} pairs"));

    let one = [sp(1, &["x1*y1^3 + exp(t*y1)"]), sp(1, &["sin(x1)*y1"]), sp(1, &["t*x1^2"])];
    count = 0;
    for s in &one {
        for th in arbitrary_forms(1) {
            ok &= d_r(&th, s).unwrap().is_zero(&c).unwrap_or(false);
            count += 1;
        }
    }
    notes.push(format!("n=1: {count} pairs"));

    count = 0;
    for (text, n) in [
        ("exp(t)*y1^2/2 - x1^2", 1),
        ("(y1^2 + y2^2)/2 - t^2*(x1^2 + x2^2)/2", 2),
        ("(y1^2 + y2^2 + y3^2)/2 - t^2*(x1^2 + x2^2 + x3^2)/2", 3),
        ("exp(t)*(y1^2 + y2^2)/2 - exp(t)*(x1^2 + x2^2)", 2),
    ] {
        let l = lag(text, n);
        let s = semispray_from_lagrangian(&l, &c).unwrap();
        let th = poincare_cartan(&l);
        let class = classify(&s, &c).unwrap();
        ok &= class.is_isotropic || class.is_flat;
        ok &= is_first_order_solution(&th, &s, &c).unwrap();
        ok &= d_r(&th, &s).unwrap().is_zero(&c).unwrap_or(false);
        count += 1;
    }
    notes.push(format!("isotropic with P theta = 0: {count}"));

    count = 0;
    for s in [sp(2, &["y2", "-y2^2/2"]), sp(2, &["x2*y1", "t*y2^2"]), sp(2, &["x1*x2", "sin(y1)"])] {
        for l in ["y1^2*x2 + y1*y2 + t*y2^2", "(y1^2 + y2^2)/2 - x1^2*x2", "exp(y1)*x2"] {
            // θ_i = ∂θ₀/∂yⁱ, so d_Jθ has no dt-part.
            let th = poincare_cartan(&lag(l, 2));
            let dr = d_r(&th, &s).unwrap();
            let wedge = d_phi(&th, &s).unwrap().wedge_dt();
            let diff: Vec<Expr> = dr.components().zip(wedge.components()).map(|(a, b)| a + b).collect();
            ok &= dr.components().count() == wedge.components().count();
            ok &= diff.iter().all(|e| zero(e, 2));
            count += 1;
        }
    }
    notes.push(format!("n=2 d_R = -d_Phi^dt: {count} pairs"));
    (ok, notes.join("; "))
}

fn criterion6() -> Outcome {
    let c = cfg();
    let mut ok = true;
    let mut worst: f64 = 0.0;
    let mut notes = Vec::new();
    for (text, n) in [
        ("(y1^2 + y2^2)/2 - x1*x2 + t*y1", 2),
        ("exp(t)*y1^2/2 - x1^2", 1),
        ("(1 + x1^2)*y1^2/2 + y1*y2 + y2^2 - x2^3", 2),
        ("(y1^2 + y2^2 + y3^2)/2 + x1*y2 - x2*y1 + t*x3", 3),
        ("exp(t)*(y1^2 + 2*y2^2 + y1*y2)/2 - x1*x2", 2),
    ] {
        let l = lag(text, n);
        let s = semispray_from_lagrangian(&l, &c).unwrap();
        let r = verify_lagrangian(&l, &s, &c).unwrap();
        let confirmed = r.verdict == Verdict::LagrangianConfirmed;

        let th = poincare_cartan(&l);
        let w = dtheta_matrix(&th, &s).unwrap();
        let mut exprs: Vec<&Expr> = w.iter().flatten().collect();
        exprs.extend(s.coefficients());
        let points = SamplePlan::from(&c).points(&exprs, n).unwrap();
        let full_rank = points.iter().all(|p| {
            let m: Vec<Vec<f64>> = w.iter().map(|row| row.iter().map(|e| e.eval(p).unwrap()).collect()).collect();
            numeric_rank(&m, RANK_THRESHOLD) == 2 * n
        });

        let gexprs: Vec<&Expr> = s.coefficients().iter().collect();
        let mut el_ok = true;
        for k in 0..EL_TRAJECTORIES {
            let start = c.usable_point(&gexprs, n, 1000 + k).unwrap();
            let tr = integrate_geodesic(&s, &start, EL_STEP, EL_STEPS);
            let res = euler_lagrange_residual(&l.l, &tr);
            el_ok &= tr.truncated.is_none() && res <= EL_TOL;
            worst = worst.max(res);
        }
        ok &= confirmed && full_rank && el_ok;
        notes.push(format!("{text}: {:?}, rank 2n {full_rank}, EL {el_ok}", r.verdict));
    }
    notes.push(format!("max EL residual {worst:.2e}"));
    (ok, notes.join("; "))
}

fn random_polynomial(rng: &mut ChaCha8Rng, n: usize) -> String {
    let vars: Vec<String> = std::iter::once("t".to_string())
        .chain((1..=n).map(|i| format!("x{i}")))
        .chain((1..=n).map(|i| format!("y{i}")))
        .collect();
    let terms: Vec<String> = (0..rng.random_range(2..=4))
        .map(|_| {
            let c = rng.random_range(-2i32..=2);
            let c = if c == 0 { 1 } else { c };
            let factors: Vec<String> = (0..rng.random_range(1..=3))
                .map(|_| vars[rng.random_range(0..vars.len())].clone())
                .collect();
            format!("{c}*{}/4", factors.join("*"))
        })
        .collect();
    terms.join(" + ")
}

fn criterion7() -> Outcome {
    let c = cfg();
    let plan = SamplePlan {
        count: ORACLE_POINTS,
        ..SamplePlan::from(&c)
    };
    let mut worst = [0.0f64; 5];
    let mut ok = true;
    let fixtures: Vec<(Semispray, SemiBasicOneForm)> = vec![
        (sp(1, &["x1*y1^2/4"]), form(1, "x1*y1^3", &["sin(y1)"])),
        (sp(2, &["y2", "-y2^2/2"]), form(2, "x1*y2^3", &["t*y1", "exp(y2/2)"])),
        (sp(2, &["x2*y1/2", "t*y2^2/4"]), form(2, "y1*y2", &["y2", "x1"])),
        (sp(2, &["sin(t*x2)/2", "t/2"]), form(2, "(y1^2 + y2^2)/2", &["y1", "y2"])),
        (sp(3, &["x2*y1^2/4 + t*y3/2", "x1*x3*y2/4", "y1*y2/4 - x2^2/4"]), form(3, "y1*y2*y3", &["x2", "t*y3", "y1^2"])),
    ];
    for (s, th) in &fixtures {
        let n = s.n();
        let dj = d_j(th, s).unwrap();
        let dh = d_h(th, s).unwrap();
        let dr = d_r(th, s).unwrap();
        let mut exprs: Vec<&Expr> = dj.components().chain(dh.components()).chain(dr.components()).collect();
        exprs.extend(s.coefficients());
        exprs.push(&th.theta0);
        exprs.extend(&th.theta);
        for p in plan.points(&exprs, n).unwrap() {
            let (oj, oh) = contraction_oracle(th, s, &p).unwrap();
            worst[0] = worst[0].max(dj.eval(&p).unwrap().distance(&oj));
            worst[1] = worst[1].max(dh.eval(&p).unwrap().distance(&oh));
            if n >= 2 {
                worst[2] = worst[2].max(dr.eval(&p).unwrap().distance(&d_r_oracle(th, s, &p).unwrap()));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut random = Vec::new();
    for n in [2, 2, 2, 3, 3, 3] {
        let g: Vec<String> = (0..n).map(|_| random_polynomial(&mut rng, n)).collect();
        random.push(Semispray::parse(n, &g).unwrap());
    }
    for s in fixtures.iter().map(|(s, _)| s).chain(&random) {
        let n = s.n();
        let o = Oracle::new(s);
        let curv = s.curvature();
        let mut exprs: Vec<&Expr> = s.coefficients().iter().collect();
        exprs.extend(curv.phi.iter().flatten());
        exprs.extend(curv.r3.iter().flatten().flatten());
        for p in plan.points(&exprs, n).unwrap() {
            let hh = o.half_hh(&p).unwrap();
            for a in 0..n {
                for b in 0..n {
                    worst[3] = worst[3].max((hh.phi[a][b] - curv.phi[a][b].eval(&p).unwrap()).abs());
                    for k in 0..n {
                        worst[3] = worst[3].max((hh.r3[a][b][k] - curv.r3[a][b][k].eval(&p).unwrap()).abs());
                    }
                }
            }
            worst[3] = worst[3].max(hh.horizontal_leak).max(hh.vertical_leak);
        }
    }
    for s in &random {
        let exprs: Vec<&Expr> = s.coefficients().iter().collect();
        for p in plan.points(&exprs, s.n()).unwrap() {
            worst[4] = worst[4].max(Oracle::new(s).j_phi_defect(&p).unwrap());
        }
    }
    for w in worst {
        ok &= w <= ORACLE_TOL;
    }
    (
        ok,
        format!(
            "max |d_J - oracle| {:.1e}, d_h {:.1e}, d_R {:.1e}, curvature {:.1e}, [J,Phi] - 3R - Phi^dt {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn criterion8() -> Outcome {
    let c = cfg();
    let fixtures = [
        sp(1, &["x1*y1^2/4"]),
        sp(2, &["0", "0"]),
        sp(2, &["y2", "-y2^2/2"]),
        sp(2, &["t*y2^2/2", "t/2"]),
        sp(2, &["sin(t*x2)/2", "t^2/2"]),
        sp(3, &["x2*y1^2/4 + t*y3/2", "x1*x3*y2/4", "y1*y2/4 - x2^2/4"]),
    ];
    let mut ok = true;
    let mut failed = Vec::new();
    for s in &fixtures {
        let r = structure_identities(s, &c).unwrap();
        for check in &r.checks {
            if !check.passed {
                failed.push(format!("{} on {:?}", check.name, s.coefficients()));
            }
        }
        ok &= r.all_passed();
    }
    let names = structure_identities(&fixtures[0], &c).unwrap().checks.len();
    (ok, format!("{} fixtures x {names} identities; failures: {:?}", fixtures.len(), failed))
}

fn random_expr(rng: &mut ChaCha8Rng, depth: usize, n: usize) -> Expr {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..4) {
            0 => Expr::t(),
            1 => Expr::x(rng.random_range(0..n)),
            2 => Expr::y(rng.random_range(0..n)),
            _ => Expr::ratio(rng.random_range(-5..=5), rng.random_range(1..=3)),
        };
    }
    let a = random_expr(rng, depth - 1, n);
    match rng.random_range(0..8) {
        0 => &a + &random_expr(rng, depth - 1, n),
        1 => &a - &random_expr(rng, depth - 1, n),
        2 => &a * &random_expr(rng, depth - 1, n),
        3 => &a / &(Expr::int(2) + random_expr(rng, depth - 1, n).cos()),
        4 => a.sin(),
        5 => a.cos(),
        6 => a.sin().exp(),
        _ => a.pow(rng.random_range(2..=3)),
    }
}

fn report_bytes(args: &[&str], problem: &str) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    let json = dir.path().join("r.json");
    std::fs::write(&file, problem).unwrap();
    let mut argv: Vec<String> = vec!["semispray".into()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.extend(["--file".into(), file.display().to_string(), "--json-out".into(), json.display().to_string()]);
    semispray::cli::run(argv, &mut Vec::new(), &mut Vec::new());
    std::fs::read(json).unwrap()
}

fn criterion9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let plan = SamplePlan::from(&cfg());
    let mut fd_worst: f64 = 0.0;
    for _ in 0..FD_EXPRESSIONS {
        let e = random_expr(&mut rng, 6, 2);
        let r = fd_check(&e, 2, &SamplePlan { count: 5, ..plan.clone() });
        fd_worst = fd_worst.max(r.map_or(f64::INFINITY, |r| r.max_error));
    }

    let osc = sp(1, &["x1/2"]);
    let err = |h: f64, steps: usize| {
        let tr = integrate_geodesic(&osc, &Point::new(0.0, vec![1.0], vec![0.0]), h, steps);
        (tr.samples.last().unwrap().x[0] - 1f64.cos()).abs()
    };
    let ratio = err(0.1, 10) / err(0.05, 20);

    let problem = r#"{"n": 2, "G": ["x2*y1/2", "t*y2^2/4"], "theta": {"theta0": "y1*y2", "theta": ["y2", "y1"]}}"#;
    let lagr = r#"{"n": 2, "L": "(y1^2 + y2^2)/2 - x1*x2"}"#;
    let mut identical = true;
    for (args, p) in [
        (&["analyze", "--seed", "7"][..], problem),
        (&["check-theta", "--seed", "7"][..], problem),
        (&["check-lagrangian", "--seed", "7"][..], lagr),
    ] {
        let a = report_bytes(args, p);
        identical &= !a.is_empty() && a == report_bytes(args, p);
    }
    let ok = fd_worst <= FD_TOL && (RK4_RATIO.0..=RK4_RATIO.1).contains(&ratio) && identical;
    (
        ok,
        format!("max diff-vs-FD error {fd_worst:.1e} over {FD_EXPRESSIONS} expressions; RK4 ratio {ratio:.2}; byte-identical reports {identical}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("symbol dimensions and quasi-regular chain, n = 1..6", criterion1),
        ("cokernel dimension and exactness, n = 1..5", criterion2),
        ("first worked example: Jacobi component and flatness flip", criterion3),
        ("second and third worked examples: N and Phi", criterion4),
        ("obstruction vanishing theorems", criterion5),
        ("Lagrangian round trip", criterion6),
        ("oracle equivalence", criterion7),
        ("structure identities", criterion8),
        ("expression engine, RK4 order, reproducibility", criterion9),
    ];
    let mut unexpected = 0;
    for (k, (title, f)) in criteria.iter().enumerate() {
        let id = k + 1;
        let start = Instant::now();
        let (ok, detail) = f();
        let known = KNOWN_FAILURES.contains(&id);
        let tag = match (ok, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (expected FAIL)",
        };
        if ok == known {
            unexpected += 1;
        }
        println!("criterion {id}: {tag}: {title} [{:.1}s] {detail}", start.elapsed().as_secs_f64());
    }
    if unexpected > 0 {
        std::process::exit(1);
    }
}

use proptest::prelude::*;

use super::*;

fn p(s: &str) -> Expr {
    parse(s, 3).unwrap()
}

fn pt() -> Point {
    Point::new(0.7, vec![0.3, 1.2, 0.9], vec![0.45, 0.8, 1.3])
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn precedence() {
    let e = p("-x1^2");
    assert_eq!(e.eval(&pt()).unwrap(), -0.09);
    assert!(close(p("2^3^2").eval(&pt()).unwrap(), 512.0, 1e-15));
    assert!(close(p("x1^-1").eval(&pt()).unwrap(), 1.0 / 0.3, 1e-15));
    assert!(close(p("1 - 2 - 3").eval(&pt()).unwrap(), -4.0, 0.0));
    assert!(close(p("8/2/4").eval(&pt()).unwrap(), 1.0, 0.0));
    assert!(close(p("2*-y1").eval(&pt()).unwrap(), -0.9, 1e-15));
}

#[test]
fn decimals_are_exact() {
    let e = p("0.1 + 0.2").simplify();
    assert_eq!(e, Expr::ratio(3, 10).simplify());
    assert_eq!(p("1.5").simplify(), Expr::ratio(3, 2).simplify());
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse("x1 + x4", 3).unwrap_err();
    assert_eq!(e.position, 5);
    assert!(matches!(e.kind, ParseErrorKind::IndexOutOfRange { .. }));
    let e = parse("x1 + z", 3).unwrap_err();
    assert!(matches!(e.kind, ParseErrorKind::UnknownIdentifier(_)));
    assert_eq!(e.position, 5);
    let e = parse("x1^(1/2)", 3).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::NonIntegerExponent);
    assert!(matches!(parse("(x1", 3).unwrap_err().kind, ParseErrorKind::Syntax(_)));
    assert!(matches!(parse("x1 $", 3).unwrap_err().kind, ParseErrorKind::Syntax(_)));
    assert!(matches!(parse("", 3).unwrap_err().kind, ParseErrorKind::Syntax(_)));
    assert!(matches!(parse("x0", 3).unwrap_err().kind, ParseErrorKind::IndexOutOfRange { .. }));
}

#[test]
fn normal_form_collects() {
    let a = p("x1*y2 + y2*x1 - 2*x1*y2").simplify();
    assert!(a.is_zero_literal());
    let b = p("(x1 + 1)^2 - x1^2 - 2*x1").simplify();
    assert!(b.is_one_literal());
    assert_eq!(p("x1*x1/x1").simplify(), Expr::x(0).simplify());
    assert_eq!(p("ln(exp(y1))").simplify(), Expr::y(0).simplify());
    assert_eq!(p("sqrt(9/4)").simplify(), Expr::ratio(3, 2).simplify());
    assert_eq!(p("sqrt(x1)^2").simplify(), Expr::x(0).simplify());
}

#[test]
fn derivatives() {
    let e = p("sin(x1*y2) + exp(t)*y1^3");
    let d = e.diff(Var::Y(1));
    assert_eq!(d, p("3*exp(t)*y1^2").simplify());
    let d = e.diff(Var::X(1));
    assert_eq!(d, p("y2*cos(x1*y2)").simplify());
    assert_eq!(p("ln(x1)").diff(Var::X(1)), p("1/x1").simplify());
    assert_eq!(p("sqrt(y1)").diff(Var::Y(1)), p("1/(2*sqrt(y1))").simplify());
    assert!(p("x2").diff(Var::T).is_zero_literal());
}

#[test]
fn printing_round_trips() {
    for s in [
        "x1 - 2*y1^3/(3*t) + sin(-x2)",
        "(x1 + y1)^-3",
        "-1/2*t - (y1 - 1)^2",
        "x1/(y1*y2) - 1/t^2",
        "(-3)^2*exp(2/3*x1)",
    ] {
        let e = p(s).simplify();
        let back = parse(&e.to_string(), 3).unwrap().simplify();
        assert_eq!(back, e, "{s} -> {e}");
    }
    assert_eq!(p("x1 - y1").simplify().to_string(), "x1 - y1");
}

#[test]
fn zero_test() {
    let cfg = ZeroTestConfig::default();
    assert!(p("sin(x1)^2 + cos(x1)^2 - 1").is_zero(3, &cfg).unwrap());
    assert!(!p("sin(x1)^2 - cos(x1)^2").is_zero(3, &cfg).unwrap());
    assert!(p("exp(x1)*exp(y1) - exp(x1 + y1)").is_zero(3, &cfg).unwrap());
    assert!(!Expr::ratio(1, 1_000_000).is_zero(3, &cfg).unwrap());
    let bad = ZeroTestConfig {
        sample_box: SampleBox { lo: -2.0, hi: -1.0 },
        ..cfg.clone()
    };
    assert!(matches!(
        p("ln(x1) + x1").is_zero(3, &bad),
        Err(ZeroTestError::Inconclusive { .. })
    ));
}

#[test]
fn sample_points_are_reproducible() {
    let b = SampleBox::default();
    assert_eq!(b.point(3, 7, 4, 0), b.point(3, 7, 4, 0));
    assert_ne!(b.point(3, 7, 4, 0), b.point(3, 7, 5, 0));
    assert_ne!(b.point(3, 7, 4, 0), b.point(3, 7, 4, 1));
}

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (-5i64..6).prop_map(Expr::int),
        (1i64..5, 1i64..5).prop_map(|(a, b)| Expr::ratio(a, b)),
        Just(Expr::t()),
        (0usize..2).prop_map(Expr::x),
        (0usize..2).prop_map(Expr::y),
    ]
}

fn arb_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::raw(Node::Add(vec![a, b]))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::raw(Node::Mul(vec![a, b]))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::raw(Node::Add(vec![a, Expr::raw(Node::Neg(b))]))),
            (inner.clone(), 0i32..4).prop_map(|(a, k)| Expr::raw(Node::Pow(a, k))),
            inner.clone().prop_map(|a| Expr::raw(Node::Func(Func::Sin, a))),
            inner.clone().prop_map(|a| Expr::raw(Node::Func(Func::Exp, a))),
            inner.prop_map(|a| Expr::raw(Node::Func(Func::Cos, a))),
        ]
    })
}

fn point2() -> Point {
    Point::new(0.37, vec![0.61, -0.44], vec![0.83, 0.29])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplify_preserves_value(e in arb_expr()) {
        let q = point2();
        if let Ok(a) = e.eval(&q) {
            prop_assume!(a.abs() < 1e6);
            let b = e.simplify().eval(&q).unwrap();
            prop_assert!(close(a, b, 1e-9), "{e}: {a} vs {b}");
        }
    }

    #[test]
    fn simplify_is_idempotent(e in arb_expr()) {
        let s = e.simplify();
        prop_assert_eq!(s.simplify(), s.clone());
        prop_assert_eq!(Expr::raw(s.node().clone()).simplify(), s);
    }

    #[test]
    fn print_parse_round_trip(e in arb_expr()) {
        let s = e.simplify();
        let back = parse(&s.to_string(), 2).unwrap().simplify();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn raw_print_parse_round_trip(e in arb_expr()) {
        let q = point2();
        let back = parse(&e.to_string(), 2).unwrap();
        if let (Ok(a), Ok(b)) = (e.eval(&q), back.eval(&q)) {
            prop_assume!(a.abs() < 1e6);
            prop_assert!(close(a, b, 1e-9));
        }
    }

    #[test]
    fn diff_is_linear(a in arb_expr(), b in arb_expr(), c in -3i64..4) {
        let v = Var::Y(1);
        let lhs = (&a * Expr::int(c) + &b).diff(v);
        let rhs = a.diff(v) * Expr::int(c) + b.diff(v);
        let cfg = ZeroTestConfig { samples: 5, ..Default::default() };
        prop_assert!((lhs - rhs).is_zero(2, &cfg).unwrap());
    }

    #[test]
    fn mixed_partials_commute(e in arb_expr()) {
        let ab = e.diff_n(&[Var::X(1), Var::Y(2)]);
        let ba = e.diff_n(&[Var::Y(2), Var::X(1)]);
        let cfg = ZeroTestConfig { samples: 5, ..Default::default() };
        prop_assert!((ab - ba).is_zero(2, &cfg).unwrap());
    }

    #[test]
    fn diff_matches_finite_differences(e in arb_expr()) {
        let q = point2();
        let h = 1e-6;
        let mut plus = q.clone();
        plus.y[0] += h;
        let mut minus = q.clone();
        minus.y[0] -= h;
        if let (Ok(f1), Ok(f0)) = (e.eval(&plus), e.eval(&minus)) {
            prop_assume!(f1.abs() < 1e3 && f0.abs() < 1e3);
            let fd = (f1 - f0) / (2.0 * h);
            let exact = e.diff(Var::Y(1)).eval(&q).unwrap();
            prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()), "{e}: {fd} vs {exact}");
        }
    }
}

use num_bigint::BigInt;
use num_rational::BigRational;

use super::simplify::{add, mul, pow};
use super::{Expr, Func, Node, Var};

impl Expr {
    /// Exact partial derivative with respect to `v`, in normal form.
    pub fn diff(&self, v: Var) -> Expr {
        d(&self.simplify(), v)
    }

    /// Applies [`Expr::diff`] once per variable in `vars`, left to right.
    pub fn diff_n(&self, vars: &[Var]) -> Expr {
        vars.iter().fold(self.simplify(), |e, v| d(&e, *v))
    }
}

fn konst(i: i64) -> Expr {
    Expr::normal(Node::Const(BigRational::from_integer(BigInt::from(i))))
}

fn is_zero(e: &Expr) -> bool {
    e.as_const().is_some_and(|c| *c == BigRational::from_integer(0.into()))
}

/// Derivative of a normalized tree.
fn d(e: &Expr, v: Var) -> Expr {
    if !e.depends_on(v) {
        return konst(0);
    }
    match e.node() {
        Node::Const(_) => konst(0),
        Node::Var(w) => konst((*w == v) as i64),
        Node::Add(ts) => add(ts.iter().map(|t| d(t, v)).collect()),
        Node::Mul(fs) => {
            let mut terms = Vec::new();
            for (i, f) in fs.iter().enumerate() {
                let df = d(f, v);
                if is_zero(&df) {
                    continue;
                }
                let mut factors = fs.clone();
                factors[i] = df;
                terms.push(mul(factors));
            }
            add(terms)
        }
        Node::Pow(b, k) => mul(vec![konst(*k as i64), pow(b.clone(), k - 1), d(b, v)]),
        Node::Func(f, u) => {
            let du = d(u, v);
            let outer = match f {
                Func::Sin => Expr::normal(Node::Func(Func::Cos, u.clone())),
                Func::Cos => mul(vec![konst(-1), Expr::normal(Node::Func(Func::Sin, u.clone()))]),
                Func::Exp => e.clone(),
                Func::Ln => pow(u.clone(), -1),
                Func::Sqrt => mul(vec![
                    Expr::normal(Node::Const(BigRational::new(1.into(), 2.into()))),
                    pow(e.clone(), -1),
                ]),
            };
            mul(vec![outer, du])
        }
        // Raw nodes never reach here: callers normalize first.
        Node::Div(..) | Node::Neg(_) => d(&e.simplify(), v),
    }
}

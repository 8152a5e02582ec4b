use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{Expr, Node};

// Binding strength of the printed form; a child is parenthesized when its
// strength is below what the parent position requires.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self).0)
    }
}

fn wrap(e: &Expr, min: u8) -> String {
    let (s, p) = render(e);
    if p < min {
        format!("({s})")
    } else {
        s
    }
}

fn render_const(c: &BigRational) -> (String, u8) {
    if c.is_integer() {
        let s = c.numer().to_string();
        let p = if c.is_negative() { UNARY } else { ATOM };
        (s, p)
    } else {
        (format!("{}/{}", c.numer(), c.denom()), PRODUCT)
    }
}

/// Negative leading coefficient of a term, if any.
fn negative_part(e: &Expr) -> Option<Expr> {
    match e.node() {
        Node::Const(c) if c.is_negative() => Some(Expr::constant(-c)),
        Node::Neg(a) => Some(a.clone()),
        Node::Mul(fs) => match fs.first()?.node() {
            Node::Const(c) if c.is_negative() => {
                let mut rest = fs.clone();
                rest[0] = Expr::constant(-c);
                Some(Expr::raw(Node::Mul(rest)))
            }
            _ => None,
        },
        _ => None,
    }
}

fn render(e: &Expr) -> (String, u8) {
    match e.node() {
        Node::Const(c) => render_const(c),
        Node::Var(v) => (v.to_string(), ATOM),
        Node::Add(ts) => {
            let mut s = String::new();
            for (i, t) in ts.iter().enumerate() {
                if i == 0 {
                    s.push_str(&wrap(t, PRODUCT));
                } else if let Some(neg) = negative_part(t) {
                    s.push_str(" - ");
                    s.push_str(&wrap(&neg, PRODUCT));
                } else {
                    s.push_str(" + ");
                    s.push_str(&wrap(t, PRODUCT));
                }
            }
            (s, SUM)
        }
        Node::Mul(fs) => render_product(fs),
        Node::Pow(_, k) if *k < 0 => render_product(std::slice::from_ref(e)),
        Node::Pow(b, k) => (format!("{}^{}", wrap(b, ATOM), k), POWER),
        Node::Div(a, b) => (format!("{}/{}", wrap(a, PRODUCT), wrap(b, UNARY)), PRODUCT),
        Node::Neg(a) => (format!("-{}", wrap(a, UNARY)), UNARY),
        Node::Func(f, a) => (format!("{}({})", f.name(), render(a).0), ATOM),
    }
}

fn render_product(fs: &[Expr]) -> (String, u8) {
    let mut negative = false;
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    for (i, f) in fs.iter().enumerate() {
        match f.node() {
            Node::Const(c) if i == 0 => {
                negative = c.is_negative();
                let c = c.abs();
                if !c.numer().is_one() {
                    num.push(c.numer().to_string());
                }
                if !c.denom().is_one() {
                    den.push(c.denom().to_string());
                }
            }
            Node::Pow(b, k) if *k < 0 => {
                if *k == -1 {
                    den.push(wrap(b, ATOM));
                } else {
                    den.push(format!("{}^{}", wrap(b, ATOM), -(*k as i64)));
                }
            }
            _ => num.push(wrap(f, PRODUCT)),
        }
    }
    let mut s = String::new();
    if negative {
        s.push('-');
    }
    if num.is_empty() {
        s.push('1');
    } else {
        s.push_str(&num.join("*"));
    }
    if !den.is_empty() {
        s.push('/');
        if den.len() == 1 {
            s.push_str(&den[0]);
        } else {
            s.push('(');
            s.push_str(&den.join("*"));
            s.push(')');
        }
    }
    (s, PRODUCT)
}

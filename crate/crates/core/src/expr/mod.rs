//! Immutable symbolic expressions over the jet coordinates `(t, x1..xn, y1..yn)`.
//!
//! An [`Expr`] is a cheaply clonable handle to a shared tree. Trees built by
//! the arithmetic operators, [`Expr::diff`] and [`Expr::simplify`] are kept in
//! a canonical normal form (flattened sums and products, collected like terms,
//! exact rational coefficients), so syntactically equal inputs compare equal.
//! Trees returned by [`parse`] are raw until simplified.

mod diff;
mod eval;
mod parse;
mod print;
mod simplify;
mod zero;

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use eval::{EvalError, Point};
pub use parse::{parse, ParseError, ParseErrorKind};
pub use zero::{all_zero, SampleBox, Witness, ZeroTestConfig, ZeroTestError};

/// A jet coordinate. Spatial indices are 1-based, as in the text syntax.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    X(u16),
    Y(u16),
}

impl Var {
    /// Position coordinate for a 0-based spatial index.
    pub fn x(i: usize) -> Var {
        Var::X(i as u16 + 1)
    }

    /// Velocity coordinate for a 0-based spatial index.
    pub fn y(i: usize) -> Var {
        Var::Y(i as u16 + 1)
    }

    /// 1-based spatial index, `None` for time.
    pub fn index(self) -> Option<usize> {
        match self {
            Var::T => None,
            Var::X(i) | Var::Y(i) => Some(i as usize),
        }
    }

    /// All `2n + 1` coordinates in the order `t, x1..xn, y1..yn`.
    pub fn all(n: usize) -> Vec<Var> {
        let mut v = Vec::with_capacity(2 * n + 1);
        v.push(Var::T);
        v.extend((0..n).map(Var::x));
        v.extend((0..n).map(Var::y));
        v
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => write!(f, "t"),
            Var::X(i) => write!(f, "x{i}"),
            Var::Y(i) => write!(f, "y{i}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree node. `Div` and `Neg` only occur in raw (parsed) trees;
/// the normal form expresses them through `Mul` and negative `Pow`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(BigRational),
    Var(Var),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Expr, i32),
    Div(Expr, Expr),
    Neg(Expr),
    Func(Func, Expr),
}

struct Inner {
    node: Node,
    normal: bool,
}

#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl Expr {
    pub(crate) fn raw(node: Node) -> Expr {
        let normal = matches!(node, Node::Const(_) | Node::Var(_));
        Expr(Arc::new(Inner { node, normal }))
    }

    pub(crate) fn normal(node: Node) -> Expr {
        Expr(Arc::new(Inner { node, normal: true }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn is_normal(&self) -> bool {
        self.0.normal
    }

    pub fn constant(c: BigRational) -> Expr {
        Expr::raw(Node::Const(c))
    }

    pub fn int(i: i64) -> Expr {
        Expr::constant(BigRational::from_integer(BigInt::from(i)))
    }

    pub fn ratio(num: i64, den: i64) -> Expr {
        Expr::constant(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(v: Var) -> Expr {
        Expr::raw(Node::Var(v))
    }

    pub fn t() -> Expr {
        Expr::var(Var::T)
    }

    /// `x_{i+1}` for a 0-based index.
    pub fn x(i: usize) -> Expr {
        Expr::var(Var::x(i))
    }

    /// `y_{i+1}` for a 0-based index.
    pub fn y(i: usize) -> Expr {
        Expr::var(Var::y(i))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    /// True when the tree is literally the constant 0 (after normalization).
    pub fn is_zero_literal(&self) -> bool {
        self.simplify().as_const().is_some_and(|c| c.is_zero())
    }

    pub fn is_one_literal(&self) -> bool {
        self.simplify().as_const().is_some_and(|c| c.is_one())
    }

    pub fn pow(&self, k: i32) -> Expr {
        simplify::pow(self.simplify(), k)
    }

    pub fn recip(&self) -> Expr {
        self.pow(-1)
    }

    pub fn apply(&self, f: Func) -> Expr {
        simplify::func(f, self.simplify())
    }

    pub fn sin(&self) -> Expr {
        self.apply(Func::Sin)
    }

    pub fn cos(&self) -> Expr {
        self.apply(Func::Cos)
    }

    pub fn exp(&self) -> Expr {
        self.apply(Func::Exp)
    }

    pub fn ln(&self) -> Expr {
        self.apply(Func::Ln)
    }

    pub fn sqrt(&self) -> Expr {
        self.apply(Func::Sqrt)
    }

    pub fn scale(&self, c: &BigRational) -> Expr {
        simplify::mul(vec![Expr::constant(c.clone()), self.simplify()])
    }

    /// Sum of a list of expressions, normalized.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        simplify::add(terms.into_iter().map(|e| e.simplify()).collect())
    }

    /// Product of a list of expressions, normalized.
    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        simplify::mul(factors.into_iter().map(|e| e.simplify()).collect())
    }

    /// Largest spatial index mentioned in the tree (0 if none).
    pub fn max_index(&self) -> usize {
        let mut m = 0;
        self.visit(&mut |e| {
            if let Node::Var(v) = e.node() {
                m = m.max(v.index().unwrap_or(0));
            }
        });
        m
    }

    /// True if `v` occurs anywhere in the tree.
    pub fn depends_on(&self, v: Var) -> bool {
        let mut hit = false;
        self.visit(&mut |e| {
            if let Node::Var(w) = e.node() {
                hit |= *w == v;
            }
        });
        hit
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut k = 0;
        self.visit(&mut |_| k += 1);
        k
    }

    /// Top-level summands (the expression itself when it is not a sum).
    pub fn summands(&self) -> Vec<Expr> {
        match self.node() {
            Node::Add(ts) => ts.clone(),
            _ => vec![self.clone()],
        }
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self.node() {
            Node::Const(_) | Node::Var(_) => {}
            Node::Add(xs) | Node::Mul(xs) => xs.iter().for_each(|x| x.visit(f)),
            Node::Pow(b, _) | Node::Neg(b) | Node::Func(_, b) => b.visit(f),
            Node::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
        }
    }
}

pub(crate) fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        if c.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.node() == other.node()
    }
}

impl Eq for Expr {}

impl PartialOrd for Expr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Expr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.node().cmp(other.node())
    }
}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.node().hash(state)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Expr {
        Expr::var(v)
    }
}

impl From<i64> for Expr {
    fn from(i: i64) -> Expr {
        Expr::int(i)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl std::ops::$tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(&self, rhs)
            }
        }
        impl std::ops::$tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, &rhs)
            }
        }
        impl std::ops::$tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(&Expr, &Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| simplify::add(vec![a.simplify(), b.simplify()]));
binop!(Sub, sub, |a, b| simplify::add(vec![
    a.simplify(),
    simplify::negate(b.simplify())
]));
binop!(Mul, mul, |a, b| simplify::mul(vec![a.simplify(), b.simplify()]));
binop!(Div, div, |a, b| simplify::mul(vec![
    a.simplify(),
    simplify::pow(b.simplify(), -1)
]));

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        simplify::negate(self.simplify())
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        simplify::negate(self.simplify())
    }
}

#[cfg(test)]
mod tests;

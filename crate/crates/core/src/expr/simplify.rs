//! Normal-form constructors.
//!
//! Every function here takes normalized operands and returns a normalized
//! tree. Sums are keyed by monomial with exact coefficients, products by
//! base with summed integer exponents, and products of sums are distributed
//! while the expansion stays below [`EXPAND_LIMIT`] terms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{Expr, Func, Node};

/// Maximum number of terms an expansion of a product of sums may produce.
const EXPAND_LIMIT: usize = 2048;
/// Largest positive power of a sum that is expanded.
const EXPAND_POW: i32 = 8;
/// Largest |exponent| folded for rational constants.
const FOLD_POW: i32 = 256;

impl Expr {
    /// Canonical simplification: constant folding, 0/1 elimination, flattening,
    /// like-term and like-base collection, distribution of products over sums.
    pub fn simplify(&self) -> Expr {
        if self.is_normal() {
            return self.clone();
        }
        match self.node() {
            Node::Const(_) | Node::Var(_) => self.clone(),
            Node::Add(ts) => add(ts.iter().map(Expr::simplify).collect()),
            Node::Mul(fs) => mul(fs.iter().map(Expr::simplify).collect()),
            Node::Pow(b, k) => pow(b.simplify(), *k),
            Node::Div(a, b) => mul(vec![a.simplify(), reciprocal(b)]),
            Node::Neg(a) => negate(a.simplify()),
            Node::Func(f, a) => func(*f, a.simplify()),
        }
    }
}

/// Normalized `1/e`, inverting powers before expanding them so that
/// `1/(a + b)^3` and `(a + b)^-3` agree.
fn reciprocal(e: &Expr) -> Expr {
    match e.node() {
        Node::Pow(b, k) if !e.is_normal() && *k != i32::MIN => pow(b.simplify(), -k),
        Node::Mul(fs) if !e.is_normal() => mul(fs.iter().map(reciprocal).collect()),
        _ => pow(e.simplify(), -1),
    }
}

fn rat(i: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(i))
}

fn konst(c: BigRational) -> Expr {
    Expr::normal(Node::Const(c))
}

pub(crate) fn negate(e: Expr) -> Expr {
    mul(vec![konst(rat(-1)), e])
}

/// Splits a normalized term into `(coefficient, monomial)`.
fn split_coef(term: &Expr) -> (BigRational, Expr) {
    match term.node() {
        Node::Const(c) => (c.clone(), konst(rat(1))),
        Node::Mul(fs) => match fs[0].node() {
            Node::Const(c) => {
                let rest = if fs.len() == 2 {
                    fs[1].clone()
                } else {
                    Expr::normal(Node::Mul(fs[1..].to_vec()))
                };
                (c.clone(), rest)
            }
            _ => (BigRational::one(), term.clone()),
        },
        _ => (BigRational::one(), term.clone()),
    }
}

fn with_coef(c: BigRational, mono: Expr) -> Expr {
    if mono.as_const().is_some_and(|m| m.is_one()) {
        return konst(c);
    }
    if c.is_one() {
        return mono;
    }
    match mono.node() {
        Node::Mul(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(konst(c));
            v.extend(fs.iter().cloned());
            Expr::normal(Node::Mul(v))
        }
        _ => Expr::normal(Node::Mul(vec![konst(c), mono])),
    }
}

pub(crate) fn add(terms: Vec<Expr>) -> Expr {
    let mut constant = BigRational::zero();
    let mut acc: BTreeMap<Expr, BigRational> = BTreeMap::new();
    let mut push = |t: &Expr, constant: &mut BigRational| match t.node() {
        Node::Const(c) => *constant += c,
        _ => {
            let (c, m) = split_coef(t);
            *acc.entry(m).or_insert_with(BigRational::zero) += c;
        }
    };
    for t in &terms {
        match t.node() {
            Node::Add(inner) => inner.iter().for_each(|u| push(u, &mut constant)),
            _ => push(t, &mut constant),
        }
    }
    let mut out = Vec::with_capacity(acc.len() + 1);
    if !constant.is_zero() {
        out.push(konst(constant));
    }
    for (m, c) in acc {
        if !c.is_zero() {
            out.push(with_coef(c, m));
        }
    }
    match out.len() {
        0 => konst(BigRational::zero()),
        1 => out.pop().unwrap(),
        _ => Expr::normal(Node::Add(out)),
    }
}

fn term_count(e: &Expr) -> usize {
    match e.node() {
        Node::Add(ts) => ts.len(),
        _ => 1,
    }
}

pub(crate) fn mul(factors: Vec<Expr>) -> Expr {
    let mut coef = BigRational::one();
    let mut bases: BTreeMap<Expr, i64> = BTreeMap::new();
    fn push(f: &Expr, coef: &mut BigRational, bases: &mut BTreeMap<Expr, i64>) {
        match f.node() {
            Node::Const(c) => *coef *= c,
            Node::Mul(fs) => fs.iter().for_each(|g| push(g, coef, bases)),
            Node::Pow(b, k) if b.as_const().is_none() => {
                *bases.entry(b.clone()).or_insert(0) += *k as i64
            }
            _ => *bases.entry(f.clone()).or_insert(0) += 1,
        }
    }
    for f in &factors {
        push(f, &mut coef, &mut bases);
    }
    if coef.is_zero() {
        return konst(coef);
    }
    bases.retain(|_, k| *k != 0);

    // Distribute over the first sum raised to a positive power.
    let sum_base = bases
        .iter()
        .find(|(b, k)| **k > 0 && matches!(b.node(), Node::Add(_)))
        .map(|(b, k)| (b.clone(), *k));
    if let Some((sum, k)) = sum_base {
        let estimate = bases
            .iter()
            .filter(|(_, k)| **k > 0)
            .try_fold(1usize, |acc, (b, k)| {
                let base = term_count(b);
                (0..*k).try_fold(acc, |a, _| a.checked_mul(base))
            });
        if estimate.is_some_and(|e| e <= EXPAND_LIMIT) {
            let mut rest_bases = bases.clone();
            if k == 1 {
                rest_bases.remove(&sum);
            } else {
                rest_bases.insert(sum.clone(), k - 1);
            }
            let rest = rebuild(coef, rest_bases);
            let terms = sum
                .summands()
                .into_iter()
                .map(|t| mul(vec![t, rest.clone()]))
                .collect();
            return add(terms);
        }
    }
    rebuild(coef, bases)
}

fn rebuild(coef: BigRational, bases: BTreeMap<Expr, i64>) -> Expr {
    let mut fs: Vec<Expr> = Vec::with_capacity(bases.len() + 1);
    for (b, k) in bases {
        let k = k.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
        if k == 1 {
            fs.push(b);
        } else {
            fs.push(Expr::normal(Node::Pow(b, k)));
        }
    }
    if fs.is_empty() {
        return konst(coef);
    }
    if coef.is_one() && fs.len() == 1 {
        return fs.pop().unwrap();
    }
    if !coef.is_one() {
        fs.insert(0, konst(coef));
    }
    Expr::normal(Node::Mul(fs))
}

pub(crate) fn pow(base: Expr, k: i32) -> Expr {
    if k == 0 {
        return konst(BigRational::one());
    }
    if k == 1 {
        return base;
    }
    match base.node() {
        Node::Const(c) => {
            if (c.is_zero() && k < 0) || k.abs() > FOLD_POW {
                return Expr::normal(Node::Pow(base.clone(), k));
            }
            konst(num_traits::pow::Pow::pow(c, k))
        }
        Node::Pow(inner, m) => match m.checked_mul(k) {
            Some(mk) => pow(inner.clone(), mk),
            None => Expr::normal(Node::Pow(base.clone(), k)),
        },
        Node::Mul(fs) => mul(fs.iter().map(|f| pow(f.clone(), k)).collect()),
        Node::Add(_) if (2..=EXPAND_POW).contains(&k) => mul(vec![base.clone(); k as usize]),
        Node::Func(Func::Sqrt, u) if k % 2 == 0 => pow(u.clone(), k / 2),
        _ => Expr::normal(Node::Pow(base, k)),
    }
}

pub(crate) fn func(f: Func, arg: Expr) -> Expr {
    if let Some(c) = arg.as_const() {
        let folded = match f {
            Func::Sin | Func::Sqrt if c.is_zero() => Some(rat(0)),
            Func::Cos | Func::Exp if c.is_zero() => Some(rat(1)),
            Func::Ln | Func::Sqrt if c.is_one() => Some(if f == Func::Ln { rat(0) } else { rat(1) }),
            _ => None,
        };
        if let Some(v) = folded {
            return konst(v);
        }
        if f == Func::Sqrt && c.is_positive() {
            if let Some(r) = exact_sqrt(c) {
                return konst(r);
            }
        }
    }
    if f == Func::Ln {
        if let Node::Func(Func::Exp, u) = arg.node() {
            return u.clone();
        }
    }
    Expr::normal(Node::Func(f, arg))
}

fn exact_sqrt(c: &BigRational) -> Option<BigRational> {
    let n = c.numer().sqrt();
    let d = c.denom().sqrt();
    (&n * &n == *c.numer() && &d * &d == *c.denom()).then(|| BigRational::new(n, d))
}

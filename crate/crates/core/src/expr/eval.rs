use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{rational_to_f64, Expr, Func, Node, Var};

/// An evaluation site `(t, x, y)` on the jet space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub t: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Point {
    pub fn new(t: f64, x: Vec<f64>, y: Vec<f64>) -> Point {
        assert_eq!(x.len(), y.len(), "x and y must have the same dimension");
        Point { t, x, y }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Packs the point as `[t, x1..xn, y1..yn]`.
    pub fn to_coords(&self) -> Vec<f64> {
        let mut z = Vec::with_capacity(2 * self.dim() + 1);
        z.push(self.t);
        z.extend_from_slice(&self.x);
        z.extend_from_slice(&self.y);
        z
    }

    /// Inverse of [`Point::to_coords`].
    pub fn from_coords(z: &[f64]) -> Point {
        let n = (z.len() - 1) / 2;
        Point {
            t: z[0],
            x: z[1..=n].to_vec(),
            y: z[n + 1..].to_vec(),
        }
    }

    pub fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::T => Some(self.t),
            Var::X(i) => self.x.get((i as usize).checked_sub(1)?).copied(),
            Var::Y(i) => self.y.get((i as usize).checked_sub(1)?).copied(),
        }
    }

    pub fn set(&mut self, v: Var, value: f64) {
        match v {
            Var::T => self.t = value,
            Var::X(i) => self.x[i as usize - 1] = value,
            Var::Y(i) => self.y[i as usize - 1] = value,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.x.iter().chain(&self.y).all(|v| v.is_finite())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("`{node}` is undefined at {point:?}")]
    Domain { node: String, point: Point },
    #[error("variable {var} is not a coordinate of a {dim}-dimensional point")]
    MissingCoordinate { var: Var, dim: usize },
}

impl Expr {
    /// Evaluates in double precision.
    pub fn eval(&self, p: &Point) -> Result<f64, EvalError> {
        let domain = |e: &Expr| EvalError::Domain {
            node: e.to_string(),
            point: p.clone(),
        };
        let v = match self.node() {
            Node::Const(c) => rational_to_f64(c),
            Node::Var(v) => p.get(*v).ok_or(EvalError::MissingCoordinate {
                var: *v,
                dim: p.dim(),
            })?,
            Node::Add(ts) => {
                let mut s = 0.0;
                for t in ts {
                    s += t.eval(p)?;
                }
                s
            }
            Node::Mul(fs) => {
                let mut s = 1.0;
                for f in fs {
                    s *= f.eval(p)?;
                }
                s
            }
            Node::Pow(b, k) => {
                let b = b.eval(p)?;
                if b == 0.0 && *k < 0 {
                    return Err(domain(self));
                }
                b.powi(*k)
            }
            Node::Div(a, b) => {
                let den = b.eval(p)?;
                if den == 0.0 {
                    return Err(domain(self));
                }
                a.eval(p)? / den
            }
            Node::Neg(a) => -a.eval(p)?,
            Node::Func(f, a) => {
                let u = a.eval(p)?;
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Exp => u.exp(),
                    Func::Ln if u > 0.0 => u.ln(),
                    Func::Sqrt if u >= 0.0 => u.sqrt(),
                    Func::Ln | Func::Sqrt => return Err(domain(self)),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(domain(self))
        }
    }
}

//! Geometry induced by a semispray `S = ∂t + yⁱ∂xⁱ − 2Gⁱ∂yⁱ`: the canonical
//! nonlinear connection, adapted derivatives, curvature and the Jacobi
//! endomorphism.
//!
//! All component arrays are indexed `[upper][lower...]` with 0-based indices,
//! so `phi[i][j]` is `Rⁱ_j` and `r3[i][j][k]` is `Rⁱ_jk`.

mod classify;
pub mod oracle;
mod structure;

use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

use crate::expr::{parse, Expr, ParseError, Var};

pub use classify::{classify, ClassificationReport};
pub use structure::{structure_identities, IdentityCheck, StructureReport};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("expected {expected} coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("coefficient {index} mentions index {max} beyond dimension {n}")]
    IndexBeyondDimension { index: usize, max: usize, n: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("coefficient {index}: {source}")]
    Parse { index: usize, source: ParseError },
}

/// `Nⁱ_j = ∂Gⁱ/∂yʲ` and `Nⁱ₀ = 2Gⁱ − Nⁱ_j yʲ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Connection {
    #[serde(serialize_with = "ser_matrix")]
    pub spatial: Vec<Vec<Expr>>,
    #[serde(serialize_with = "ser_vec")]
    pub time: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Curvature {
    /// `Rⁱ_jk`, antisymmetric in `j, k`.
    #[serde(serialize_with = "ser_cube")]
    pub r3: Vec<Vec<Vec<Expr>>>,
    /// Jacobi endomorphism `Rⁱ_j`.
    #[serde(serialize_with = "ser_matrix")]
    pub phi: Vec<Vec<Expr>>,
}

pub struct Semispray {
    n: usize,
    g: Vec<Expr>,
    connection: OnceLock<Connection>,
    jacobi: OnceLock<Vec<Vec<Expr>>>,
    curvature: OnceLock<Curvature>,
}

impl Clone for Semispray {
    fn clone(&self) -> Self {
        Semispray {
            n: self.n,
            g: self.g.clone(),
            connection: self.connection.clone(),
            jacobi: self.jacobi.clone(),
            curvature: self.curvature.clone(),
        }
    }
}

impl std::fmt::Debug for Semispray {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Semispray").field("n", &self.n).field("g", &self.g).finish()
    }
}

impl Semispray {
    pub fn new(n: usize, g: Vec<Expr>) -> Result<Semispray, GeometryError> {
        if n == 0 {
            return Err(GeometryError::ZeroDimension);
        }
        if g.len() != n {
            return Err(GeometryError::CoefficientCount {
                expected: n,
                got: g.len(),
            });
        }
        for (index, e) in g.iter().enumerate() {
            let max = e.max_index();
            if max > n {
                return Err(GeometryError::IndexBeyondDimension { index, max, n });
            }
        }
        Ok(Semispray {
            n,
            g: g.into_iter().map(|e| e.simplify()).collect(),
            connection: OnceLock::new(),
            jacobi: OnceLock::new(),
            curvature: OnceLock::new(),
        })
    }

    /// Builds a semispray from DSL strings, one per coefficient.
    pub fn parse<S: AsRef<str>>(n: usize, g: &[S]) -> Result<Semispray, GeometryError> {
        let exprs = g
            .iter()
            .enumerate()
            .map(|(index, s)| parse(s.as_ref(), n).map_err(|source| GeometryError::Parse { index, source }))
            .collect::<Result<Vec<_>, _>>()?;
        Semispray::new(n, exprs)
    }

    /// The semispray with `G ≡ 0` (free motion).
    pub fn zero(n: usize) -> Semispray {
        Semispray::new(n, vec![Expr::zero(); n]).expect("n ≥ 1")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[Expr] {
        &self.g
    }

    pub fn connection(&self) -> &Connection {
        self.connection.get_or_init(|| {
            let n = self.n;
            let spatial: Vec<Vec<Expr>> = (0..n)
                .map(|i| (0..n).map(|j| self.g[i].diff(Var::y(j))).collect())
                .collect();
            let time = (0..n)
                .map(|i| {
                    let contracted = Expr::sum((0..n).map(|j| &spatial[i][j] * Expr::y(j)));
                    &self.g[i] * Expr::int(2) - contracted
                })
                .collect();
            Connection { spatial, time }
        })
    }

    /// `S(e) = ∂e/∂t + yʲ ∂e/∂xʲ − 2Gʲ ∂e/∂yʲ`.
    pub fn s_derivative(&self, e: &Expr) -> Expr {
        let mut terms = vec![e.diff(Var::T)];
        for j in 0..self.n {
            terms.push(Expr::y(j) * e.diff(Var::x(j)));
            terms.push(Expr::int(-2) * &self.g[j] * e.diff(Var::y(j)));
        }
        Expr::sum(terms)
    }

    /// `δe/δxⁱ = ∂e/∂xⁱ − Nʲ_i ∂e/∂yʲ` for a 0-based index `i`.
    pub fn delta_derivative(&self, e: &Expr, i: usize) -> Result<Expr, GeometryError> {
        if i >= self.n {
            return Err(GeometryError::IndexOutOfRange { index: i, n: self.n });
        }
        Ok(self.delta(e, i))
    }

    pub(crate) fn delta(&self, e: &Expr, i: usize) -> Expr {
        let nn = &self.connection().spatial;
        let mut terms = vec![e.diff(Var::x(i))];
        for j in 0..self.n {
            if !nn[j][i].is_zero_literal() {
                terms.push(-(&nn[j][i] * e.diff(Var::y(j))));
            }
        }
        Expr::sum(terms)
    }

    /// Jacobi endomorphism `Rⁱ_j = 2∂Gⁱ/∂xʲ − Nⁱ_k Nᵏ_j − S(Nⁱ_j)`.
    pub fn jacobi(&self) -> &[Vec<Expr>] {
        self.jacobi.get_or_init(|| {
            let n = self.n;
            let nn = &self.connection().spatial;
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let mut terms = vec![Expr::int(2) * self.g[i].diff(Var::x(j))];
                            for k in 0..n {
                                terms.push(-(&nn[i][k] * &nn[k][j]));
                            }
                            terms.push(-self.s_derivative(&nn[i][j]));
                            Expr::sum(terms)
                        })
                        .collect()
                })
                .collect()
        })
    }

    /// `Rⁱ_jk = δ_k Nⁱ_j − δ_j Nⁱ_k` together with the Jacobi endomorphism.
    pub fn curvature(&self) -> &Curvature {
        self.curvature.get_or_init(|| {
            let n = self.n;
            let nn = &self.connection().spatial;
            let mut r3 = vec![vec![vec![Expr::zero().simplify(); n]; n]; n];
            for i in 0..n {
                for j in 0..n {
                    for k in j + 1..n {
                        let r = self.delta(&nn[i][j], k) - self.delta(&nn[i][k], j);
                        r3[i][k][j] = -&r;
                        r3[i][j][k] = r;
                    }
                }
            }
            Curvature {
                r3,
                phi: self.jacobi().to_vec(),
            }
        })
    }
}

pub(crate) fn ser_vec<S: serde::Serializer>(v: &[Expr], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|e| e.to_string()))
}

pub(crate) fn ser_matrix<S: serde::Serializer>(m: &[Vec<Expr>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>()))
}

fn ser_cube<S: serde::Serializer>(c: &[Vec<Vec<Expr>>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(c.iter().map(|m| {
        m.iter()
            .map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>()
    }))
}

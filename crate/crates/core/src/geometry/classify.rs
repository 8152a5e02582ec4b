use serde::Serialize;

use crate::expr::{all_zero, Expr, Var, ZeroTestConfig, ZeroTestError};

use super::{ser_vec, Semispray};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub is_flat: bool,
    pub is_isotropic: bool,
    /// `λ = tr Φ / n`, present when isotropic.
    #[serde(serialize_with = "ser_opt")]
    pub lambda: Option<Expr>,
    /// Witness `α = ⅓ d_J λ + λ dt` as `(α_0, α_1..α_n)`, present when isotropic.
    #[serde(serialize_with = "ser_opt_vec")]
    pub alpha: Option<Vec<Expr>>,
    /// Whether `Rᵏ_ij = α_i δᵏ_j − α_j δᵏ_i` passed the zero test.
    pub alpha_verified: Option<bool>,
    pub notes: Vec<String>,
}

fn ser_opt<S: serde::Serializer>(e: &Option<Expr>, s: S) -> Result<S::Ok, S::Error> {
    match e {
        Some(e) => s.serialize_some(&e.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_opt_vec<S: serde::Serializer>(e: &Option<Vec<Expr>>, s: S) -> Result<S::Ok, S::Error> {
    struct W<'a>(&'a [Expr]);
    impl Serialize for W<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            ser_vec(self.0, s)
        }
    }
    match e {
        Some(v) => s.serialize_some(&W(v)),
        None => s.serialize_none(),
    }
}

/// Flat / isotropic classification from the Jacobi endomorphism.
pub fn classify(s: &Semispray, cfg: &ZeroTestConfig) -> Result<ClassificationReport, ZeroTestError> {
    let n = s.n();
    let phi = s.jacobi();
    let mut notes = Vec::new();

    let is_flat = all_zero(phi.iter().flatten(), n, cfg)?;
    let lambda = Expr::sum((0..n).map(|i| phi[i][i].clone())) / Expr::int(n as i64);
    let mut defects = Vec::with_capacity(n * n);
    for (i, row) in phi.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            defects.push(if i == j { e - &lambda } else { e.clone() });
        }
    }
    let is_isotropic = all_zero(&defects, n, cfg)?;

    if is_flat {
        let curv = s.curvature();
        if !all_zero(curv.r3.iter().flatten().flatten(), n, cfg)? {
            notes.push("Jacobi endomorphism vanishes but some Rⁱ_jk does not".into());
        }
    }

    if !is_isotropic {
        if nilpotent(phi, n, cfg)? {
            notes.push(
                "Jacobi endomorphism is nonzero and nilpotent (Φ² = 0 as a matrix); \
                 it is not λ·Id, so the semispray is not isotropic"
                    .into(),
            );
        }
        return Ok(ClassificationReport {
            is_flat,
            is_isotropic,
            lambda: None,
            alpha: None,
            alpha_verified: None,
            notes,
        });
    }

    let lambda = if is_flat { Expr::zero().simplify() } else { lambda };
    let mut alpha = vec![lambda.clone()];
    alpha.extend((0..n).map(|i| lambda.diff(Var::y(i)) / Expr::int(3)));
    let r3 = &s.curvature().r3;
    let mut residuals = Vec::new();
    for k in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                let mut expected = Vec::new();
                if k == j {
                    expected.push(alpha[1 + i].clone());
                }
                if k == i {
                    expected.push(-&alpha[1 + j]);
                }
                residuals.push(&r3[k][i][j] - Expr::sum(expected));
            }
        }
    }
    let alpha_verified = all_zero(&residuals, n, cfg)?;
    if !alpha_verified {
        notes.push("curvature is not of the form α∧J for the recovered α".into());
    }
    Ok(ClassificationReport {
        is_flat,
        is_isotropic,
        lambda: Some(lambda),
        alpha: Some(alpha),
        alpha_verified: Some(alpha_verified),
        notes,
    })
}

fn nilpotent(phi: &[Vec<Expr>], n: usize, cfg: &ZeroTestConfig) -> Result<bool, ZeroTestError> {
    let mut sq = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            sq.push(Expr::sum((0..n).map(|k| &phi[i][k] * &phi[k][j])));
        }
    }
    all_zero(&sq, n, cfg)
}

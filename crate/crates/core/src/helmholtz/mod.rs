//! The inverse problem: the operator `P = (d_J, d_h)`, its first
//! obstruction `d_Rθ`, classical multiplier conditions, and Lagrangian
//! verification.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{all_zero, Expr, Var, ZeroTestConfig, ZeroTestError};
use crate::forms::{
    contract_s, d_h, d_j, d_r, dtheta_matrix, poincare_cartan, FormError, Lagrangian, SemiBasicOneForm,
    SemiBasicThreeForm, SemiBasicTwoForm,
};
use crate::geometry::{classify, ClassificationReport, GeometryError, Semispray};
use crate::numeric::{numeric_rank, SamplePlan, RANK_THRESHOLD};

/// Largest dimension for which the metric is inverted symbolically.
pub const MAX_SYMBOLIC_DIM: usize = 3;

#[derive(Debug, Error)]
pub enum HelmholtzError {
    #[error("the metric ∂²L/∂y∂y is singular")]
    SingularMetric,
    #[error("symbolic inversion of the metric is limited to n <= {MAX_SYMBOLIC_DIM}, got n = {n}")]
    DimensionTooLarge { n: usize },
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// A regular Lagrangian was found and every check passed.
    LagrangianConfirmed,
    /// No candidate given, but the semispray is flat, isotropic or one-dimensional.
    FormallyIntegrableClass,
    /// `Pθ = 0` holds but `d_Rθ` does not vanish.
    ObstructionFails,
    /// `d_Jθ` or `d_hθ` does not vanish.
    HelmholtzFails,
    Inconclusive,
}

impl Verdict {
    pub fn is_positive(self) -> bool {
        matches!(self, Verdict::LagrangianConfirmed | Verdict::FormallyIntegrableClass)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HelmholtzReport {
    pub n: usize,
    pub dj_zero: Option<bool>,
    pub dh_zero: Option<bool>,
    pub dr_zero: Option<bool>,
    /// `i_S dθ = 0`, only set when a Lagrangian is verified.
    pub is_dtheta_zero: Option<bool>,
    pub rank_dtheta: Option<usize>,
    pub regular: Option<bool>,
    pub verdict: Verdict,
    pub lagrangian: Option<String>,
    pub classification: Option<ClassificationReport>,
    pub details: Vec<String>,
}

impl HelmholtzReport {
    fn new(n: usize) -> HelmholtzReport {
        HelmholtzReport {
            n,
            dj_zero: None,
            dh_zero: None,
            dr_zero: None,
            is_dtheta_zero: None,
            rank_dtheta: None,
            regular: None,
            verdict: Verdict::Inconclusive,
            lagrangian: None,
            classification: None,
            details: Vec::new(),
        }
    }

    fn inconclusive(mut self, e: ZeroTestError) -> HelmholtzReport {
        self.verdict = Verdict::Inconclusive;
        self.details.push(format!("zero test inconclusive: {e}"));
        self
    }
}

/// `P θ = (d_Jθ, d_hθ)`.
pub fn apply_p(theta: &SemiBasicOneForm, s: &Semispray) -> Result<(SemiBasicTwoForm, SemiBasicTwoForm), FormError> {
    Ok((d_j(theta, s)?, d_h(theta, s)?))
}

pub fn is_first_order_solution(theta: &SemiBasicOneForm, s: &Semispray, cfg: &ZeroTestConfig) -> Result<bool, HelmholtzError> {
    let (a, b) = apply_p(theta, s)?;
    Ok(a.is_zero(cfg)? && b.is_zero(cfg)?)
}

/// `d_Rθ` and whether it vanishes.
pub fn obstruction(
    theta: &SemiBasicOneForm,
    s: &Semispray,
    cfg: &ZeroTestConfig,
) -> Result<(SemiBasicThreeForm, bool), HelmholtzError> {
    let w = d_r(theta, s)?;
    let zero = w.is_zero(cfg)?;
    Ok((w, zero))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiplierMatrix {
    pub a: Vec<Vec<Expr>>,
}

impl MultiplierMatrix {
    /// `a_ij = ∂θ_i/∂yʲ`.
    pub fn of_form(theta: &SemiBasicOneForm) -> MultiplierMatrix {
        MultiplierMatrix { a: theta.multiplier() }
    }

    pub fn identity(n: usize) -> MultiplierMatrix {
        let a = (0..n)
            .map(|i| (0..n).map(|j| Expr::int((i == j) as i64)).collect())
            .collect();
        MultiplierMatrix { a }
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalConditions {
    /// `a_ij = a_ji`.
    pub symmetric: bool,
    /// `a_il Rˡ_jk + a_jl Rˡ_ki + a_kl Rˡ_ij = 0`.
    pub bianchi: bool,
    /// `a_jk Rᵏ_i − a_ik Rᵏ_j = 0`.
    pub phi_compatible: bool,
}

impl ClassicalConditions {
    pub fn all_passed(&self) -> bool {
        self.symmetric && self.bianchi && self.phi_compatible
    }
}

pub fn classical_conditions(
    a: &MultiplierMatrix,
    s: &Semispray,
    cfg: &ZeroTestConfig,
) -> Result<ClassicalConditions, HelmholtzError> {
    let n = s.n();
    if a.n() != n {
        return Err(FormError::DimensionMismatch {
            form: a.n(),
            semispray: n,
        }
        .into());
    }
    let a = &a.a;
    let curv = s.curvature();
    let (r, r3) = (&curv.phi, &curv.r3);
    let mut sym = Vec::new();
    let mut phi = Vec::new();
    let mut bianchi = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            sym.push(&a[i][j] - &a[j][i]);
            phi.push(Expr::sum((0..n).map(|k| &a[j][k] * &r[k][i] - &a[i][k] * &r[k][j])));
            for k in j + 1..n {
                bianchi.push(Expr::sum(
                    (0..n).map(|l| &a[i][l] * &r3[l][j][k] + &a[j][l] * &r3[l][k][i] + &a[k][l] * &r3[l][i][j]),
                ));
            }
        }
    }
    Ok(ClassicalConditions {
        symmetric: all_zero(&sym, n, cfg)?,
        bianchi: all_zero(&bianchi, n, cfg)?,
        phi_compatible: all_zero(&phi, n, cfg)?,
    })
}

fn minor(m: &[Vec<Expr>], row: usize, col: usize) -> Vec<Vec<Expr>> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| r.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, e)| e.clone()).collect())
        .collect()
}

fn determinant(m: &[Vec<Expr>]) -> Expr {
    match m.len() {
        0 => Expr::one(),
        1 => m[0][0].clone(),
        _ => Expr::sum((0..m.len()).map(|j| {
            let term = &m[0][j] * determinant(&minor(m, 0, j));
            if j % 2 == 0 {
                term
            } else {
                -term
            }
        })),
    }
}

/// Solves the Euler–Lagrange equations of a regular Lagrangian for the
/// semispray coefficients:
///
/// ```text
/// 2Gⁱ = gⁱʲ (∂²L/∂t∂yʲ + yᵏ ∂²L/∂xᵏ∂yʲ − ∂L/∂xʲ)
/// ```
pub fn semispray_from_lagrangian(l: &Lagrangian, cfg: &ZeroTestConfig) -> Result<Semispray, HelmholtzError> {
    let n = l.n;
    if n > MAX_SYMBOLIC_DIM {
        return Err(HelmholtzError::DimensionTooLarge { n });
    }
    let g = l.hessian();
    let det = determinant(&g);
    if det.is_zero(n, cfg)? {
        return Err(HelmholtzError::SingularMetric);
    }
    let rhs: Vec<Expr> = (0..n)
        .map(|j| {
            let ly = l.l.diff(Var::y(j));
            let mut terms = vec![ly.diff(Var::T), -l.l.diff(Var::x(j))];
            terms.extend((0..n).map(|k| Expr::y(k) * ly.diff(Var::x(k))));
            Expr::sum(terms)
        })
        .collect();
    let coefficients = (0..n)
        .map(|i| {
            // gⁱʲ = adj(g)_ij / det g, adj(g)_ij = (−1)^{i+j} det(minor_ji)
            let num = Expr::sum((0..n).map(|j| {
                let cof = determinant(&minor(&g, j, i));
                let cof = if (i + j) % 2 == 0 { cof } else { -cof };
                cof * &rhs[j]
            }));
            num / (Expr::int(2) * &det)
        })
        .collect();
    Ok(Semispray::new(n, coefficients)?)
}

/// Largest numeric rank of the `dθ` matrix in the adapted frame over the sample points.
pub fn rank_dtheta(theta: &SemiBasicOneForm, s: &Semispray, cfg: &ZeroTestConfig) -> Result<usize, HelmholtzError> {
    let w = dtheta_matrix(theta, s)?;
    let mut exprs: Vec<&Expr> = w.iter().flatten().collect();
    exprs.extend(s.coefficients());
    let points = SamplePlan::from(cfg).points(&exprs, s.n())?;
    let mut best = 0;
    for p in &points {
        let m: Vec<Vec<f64>> = w
            .iter()
            .map(|row| row.iter().map(|e| e.eval(p).unwrap_or(f64::NAN)).collect())
            .collect();
        best = best.max(numeric_rank(&m, RANK_THRESHOLD));
    }
    Ok(best)
}

fn check_dims(n: usize, s: &Semispray) -> Result<(), HelmholtzError> {
    if n == s.n() {
        Ok(())
    } else {
        Err(FormError::DimensionMismatch { form: n, semispray: s.n() }.into())
    }
}

/// Checks that `L` is a regular Lagrangian for `S`: `d_Jθ_L = 0`,
/// `d_hθ_L = 0`, `i_S dθ_L = 0`, `d_Rθ_L = 0` and `rank dθ_L = 2n`.
pub fn verify_lagrangian(l: &Lagrangian, s: &Semispray, cfg: &ZeroTestConfig) -> Result<HelmholtzReport, HelmholtzError> {
    check_dims(l.n, s)?;
    let mut report = HelmholtzReport::new(s.n());
    report.lagrangian = Some(l.l.to_string());
    match verify_into(l, s, cfg, &mut report) {
        Ok(()) => Ok(report),
        Err(HelmholtzError::ZeroTest(e)) => Ok(report.inconclusive(e)),
        Err(e) => Err(e),
    }
}

fn verify_into(l: &Lagrangian, s: &Semispray, cfg: &ZeroTestConfig, r: &mut HelmholtzReport) -> Result<(), HelmholtzError> {
    let n = s.n();
    let theta = poincare_cartan(l);
    let (dj, dh) = apply_p(&theta, s)?;
    r.dj_zero = Some(dj.is_zero(cfg)?);
    r.dh_zero = Some(dh.is_zero(cfg)?);
    let b = theta.vertical_defect();
    let contraction: Vec<&Expr> = (0..n).map(|i| dh.time(i)).chain(&b).collect();
    r.is_dtheta_zero = Some(all_zero(contraction, n, cfg)?);
    r.dr_zero = Some(obstruction(&theta, s, cfg)?.1);
    let rank = rank_dtheta(&theta, s, cfg)?;
    r.rank_dtheta = Some(rank);
    r.regular = Some(rank == 2 * n);
    r.verdict = if r.regular != Some(true) {
        r.details.push(format!("rank dθ_L = {rank} < {}: L is degenerate", 2 * n));
        Verdict::Inconclusive
    } else if r.dj_zero != Some(true) || r.dh_zero != Some(true) || r.is_dtheta_zero != Some(true) {
        if r.dh_zero != Some(true) {
            r.details.push("d_h θ_L does not vanish: geodesics of S do not solve the Euler–Lagrange equations".into());
        }
        Verdict::HelmholtzFails
    } else if r.dr_zero != Some(true) {
        Verdict::ObstructionFails
    } else {
        Verdict::LagrangianConfirmed
    };
    Ok(())
}

/// Decides variationality from a candidate form, or from the class of `S`
/// when no candidate is given.
pub fn variationality_verdict(
    s: &Semispray,
    theta: Option<&SemiBasicOneForm>,
    cfg: &ZeroTestConfig,
) -> Result<HelmholtzReport, HelmholtzError> {
    let mut report = HelmholtzReport::new(s.n());
    let run = match theta {
        Some(theta) => {
            check_dims(theta.n(), s)?;
            candidate_into(s, theta, cfg, &mut report)
        }
        None => class_into(s, cfg, &mut report),
    };
    match run {
        Ok(()) => Ok(report),
        Err(HelmholtzError::ZeroTest(e)) => Ok(report.inconclusive(e)),
        Err(e) => Err(e),
    }
}

fn candidate_into(s: &Semispray, theta: &SemiBasicOneForm, cfg: &ZeroTestConfig, r: &mut HelmholtzReport) -> Result<(), HelmholtzError> {
    let n = s.n();
    let (dj, dh) = apply_p(theta, s)?;
    r.dj_zero = Some(dj.is_zero(cfg)?);
    r.dh_zero = Some(dh.is_zero(cfg)?);
    let (_, dr_zero) = obstruction(theta, s, cfg)?;
    r.dr_zero = Some(dr_zero);
    let rank = rank_dtheta(theta, s, cfg)?;
    r.rank_dtheta = Some(rank);
    r.regular = Some(rank == 2 * n);
    if r.dj_zero != Some(true) || r.dh_zero != Some(true) {
        r.verdict = Verdict::HelmholtzFails;
        r.details.push("θ is not a solution of P θ = 0".into());
        return Ok(());
    }
    if !dr_zero {
        r.verdict = Verdict::ObstructionFails;
        r.details.push("d_R θ does not vanish".into());
        return Ok(());
    }
    if rank != 2 * n {
        r.verdict = Verdict::Inconclusive;
        r.details.push(format!("rank dθ = {rank} < {}: the solution is not regular", 2 * n));
        return Ok(());
    }
    let l = Lagrangian::new(n, contract_s(theta));
    let confirm = verify_lagrangian(&l, s, cfg)?;
    r.lagrangian = Some(l.l.to_string());
    r.is_dtheta_zero = confirm.is_dtheta_zero;
    r.verdict = confirm.verdict;
    r.details.push("reconstructed L = i_S θ".into());
    r.details.extend(confirm.details);
    Ok(())
}

fn class_into(s: &Semispray, cfg: &ZeroTestConfig, r: &mut HelmholtzReport) -> Result<(), HelmholtzError> {
    let class = classify(s, cfg)?;
    r.verdict = if class.is_flat {
        r.details.push("flat: R = 0, so d_R θ = 0 for every θ".into());
        Verdict::FormallyIntegrableClass
    } else if s.n() == 1 {
        r.details.push("n = 1: semi-basic 3-forms vanish, so d_R θ = 0".into());
        Verdict::FormallyIntegrableClass
    } else if class.is_isotropic {
        r.details.push("isotropic: R = α∧J, so d_R θ = α∧d_J θ vanishes on solutions of P θ = 0".into());
        Verdict::FormallyIntegrableClass
    } else {
        r.details.push(
            "not flat, isotropic or one-dimensional: the obstruction d_R θ = 0 must be checked for a candidate θ".into(),
        );
        Verdict::Inconclusive
    };
    r.classification = Some(class);
    Ok(())
}

impl Serialize for MultiplierMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = self
            .a
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        let mut st = s.serialize_struct("MultiplierMatrix", 1)?;
        st.serialize_field("a", &rows)?;
        st.end()
    }
}

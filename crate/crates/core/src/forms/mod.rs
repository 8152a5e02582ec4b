//! Semi-basic forms in the adapted coframe `dt, δx¹..δxⁿ`.
//!
//! Components are stored as values on ordered frame tuples, with
//! `S, δ_1..δ_n` as the frame dual to `dt, δx¹..δxⁿ`:
//!
//! ```text
//! 1-form:  θ(S) = θ₀,            θ(δ_i) = θ_i
//! 2-form:  time(i) = ω(S, δ_i),  space(i, j) = ω(δ_i, δ_j)
//! 3-form:  time(i, j) = ω(S, δ_i, δ_j),  space(i, j, k) = ω(δ_i, δ_j, δ_k)
//! ```
//!
//! Only strictly increasing index tuples are kept; the accessors fill in
//! the antisymmetric remainder.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{all_zero, parse, EvalError, Expr, ParseError, Point, Var, ZeroTestConfig, ZeroTestError};
use crate::geometry::Semispray;
use crate::numeric::{numeric_rank, SamplePlan, RANK_THRESHOLD};

pub mod oracle;

#[derive(Debug, Error)]
pub enum FormError {
    #[error("form has dimension {form} but the semispray has dimension {semispray}")]
    DimensionMismatch { form: usize, semispray: usize },
    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("component {index}: {source}")]
    Parse {
        index: usize,
        #[source]
        source: ParseError,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    ZeroTest(#[from] ZeroTestError),
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn triples(n: usize) -> Vec<(usize, usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k))))
        .collect()
}

/// Sorts a tuple, returning the permutation sign, or `None` on a repeat.
fn sort_pair(i: usize, j: usize) -> Option<((usize, usize), bool)> {
    match i.cmp(&j) {
        std::cmp::Ordering::Less => Some(((i, j), false)),
        std::cmp::Ordering::Greater => Some(((j, i), true)),
        std::cmp::Ordering::Equal => None,
    }
}

fn sort_triple(i: usize, j: usize, k: usize) -> Option<((usize, usize, usize), bool)> {
    let mut v = [i, j, k];
    let mut odd = false;
    for a in 0..3 {
        for b in 0..2 - a {
            if v[b] > v[b + 1] {
                v.swap(b, b + 1);
                odd = !odd;
            }
        }
    }
    (v[0] != v[1] && v[1] != v[2]).then_some(((v[0], v[1], v[2]), odd))
}

fn signed(e: &Expr, negate: bool) -> Expr {
    if negate {
        -e
    } else {
        e.clone()
    }
}

fn zero() -> Expr {
    Expr::zero().simplify()
}

/// `θ = θ₀ dt + θ_i δxⁱ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiBasicOneForm {
    pub theta0: Expr,
    pub theta: Vec<Expr>,
}

impl SemiBasicOneForm {
    pub fn new(theta0: Expr, theta: Vec<Expr>) -> SemiBasicOneForm {
        SemiBasicOneForm { theta0, theta }
    }

    pub fn parse<S: AsRef<str>>(n: usize, theta0: &str, theta: &[S]) -> Result<SemiBasicOneForm, FormError> {
        if theta.len() != n {
            return Err(FormError::ComponentCount {
                expected: n,
                got: theta.len(),
            });
        }
        let theta0 = parse(theta0, n).map_err(|source| FormError::Parse { index: 0, source })?;
        let theta = theta
            .iter()
            .enumerate()
            .map(|(i, s)| parse(s.as_ref(), n).map_err(|source| FormError::Parse { index: i + 1, source }))
            .collect::<Result<_, _>>()?;
        Ok(SemiBasicOneForm { theta0, theta })
    }

    /// The form `dt`.
    pub fn dt(n: usize) -> SemiBasicOneForm {
        SemiBasicOneForm {
            theta0: Expr::one().simplify(),
            theta: vec![zero(); n],
        }
    }

    pub fn n(&self) -> usize {
        self.theta.len()
    }

    /// Multiplier matrix `a_ij = ∂θ_i/∂yʲ`.
    pub fn multiplier(&self) -> Vec<Vec<Expr>> {
        let n = self.n();
        self.theta
            .iter()
            .map(|t| (0..n).map(|j| t.diff(Var::y(j))).collect())
            .collect()
    }

    /// `θ_i − ∂θ₀/∂yⁱ`.
    pub fn vertical_defect(&self) -> Vec<Expr> {
        self.theta
            .iter()
            .enumerate()
            .map(|(i, t)| t - self.theta0.diff(Var::y(i)))
            .collect()
    }
}

impl Serialize for SemiBasicOneForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SemiBasicOneForm", 2)?;
        st.serialize_field("theta0", &self.theta0.to_string())?;
        let theta: Vec<String> = self.theta.iter().map(ToString::to_string).collect();
        st.serialize_field("theta", &theta)?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemiBasicTwoForm {
    n: usize,
    c_time: Vec<Expr>,
    c_space: Vec<Expr>,
}

impl SemiBasicTwoForm {
    /// Builds a form from `ω(S, δ_i)` and `ω(δ_i, δ_j)` for `i < j`.
    pub fn from_fn(
        n: usize,
        time: impl FnMut(usize) -> Expr,
        mut space: impl FnMut(usize, usize) -> Expr,
    ) -> SemiBasicTwoForm {
        SemiBasicTwoForm {
            n,
            c_time: (0..n).map(time).collect(),
            c_space: pairs(n).into_iter().map(|(i, j)| space(i, j)).collect(),
        }
    }

    pub fn zero(n: usize) -> SemiBasicTwoForm {
        SemiBasicTwoForm::from_fn(n, |_| zero(), |_, _| zero())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time(&self, i: usize) -> &Expr {
        &self.c_time[i]
    }

    pub fn space(&self, i: usize, j: usize) -> Expr {
        match sort_pair(i, j) {
            None => zero(),
            Some((key, neg)) => signed(&self.c_space[pairs(self.n).binary_search(&key).unwrap()], neg),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &Expr> {
        self.c_time.iter().chain(&self.c_space)
    }

    pub fn is_zero(&self, cfg: &ZeroTestConfig) -> Result<bool, ZeroTestError> {
        all_zero(self.components(), self.n, cfg)
    }

    /// `ω ∧ dt`, whose only components are `(ω∧dt)(S, δ_i, δ_j) = ω(δ_i, δ_j)`.
    pub fn wedge_dt(&self) -> SemiBasicThreeForm {
        SemiBasicThreeForm::from_fn(self.n, |i, j| self.space(i, j), |_, _, _| zero())
    }

    pub fn eval(&self, p: &Point) -> Result<oracle::NumericTwoForm, EvalError> {
        let n = self.n;
        let time = self.c_time.iter().map(|e| e.eval(p)).collect::<Result<_, _>>()?;
        let mut space = vec![vec![0.0; n]; n];
        for ((i, j), e) in pairs(n).into_iter().zip(&self.c_space) {
            let v = e.eval(p)?;
            space[i][j] = v;
            space[j][i] = -v;
        }
        Ok(oracle::NumericTwoForm { time, space })
    }
}

fn space_map<I: Iterator<Item = String>>(keys: I, values: &[Expr]) -> BTreeMap<String, String> {
    keys.zip(values).map(|(k, v)| (k, v.to_string())).collect()
}

impl Serialize for SemiBasicTwoForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SemiBasicTwoForm", 2)?;
        let time: Vec<String> = self.c_time.iter().map(ToString::to_string).collect();
        st.serialize_field("time", &time)?;
        let keys = pairs(self.n).into_iter().map(|(i, j)| format!("{},{}", i + 1, j + 1));
        st.serialize_field("space", &space_map(keys, &self.c_space))?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemiBasicThreeForm {
    n: usize,
    c_time: Vec<Expr>,
    c_space: Vec<Expr>,
}

impl SemiBasicThreeForm {
    /// Builds a form from `ω(S, δ_i, δ_j)` for `i < j` and `ω(δ_i, δ_j, δ_k)`
    /// for `i < j < k`.
    pub fn from_fn(
        n: usize,
        mut time: impl FnMut(usize, usize) -> Expr,
        mut space: impl FnMut(usize, usize, usize) -> Expr,
    ) -> SemiBasicThreeForm {
        SemiBasicThreeForm {
            n,
            c_time: pairs(n).into_iter().map(|(i, j)| time(i, j)).collect(),
            c_space: triples(n).into_iter().map(|(i, j, k)| space(i, j, k)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn time(&self, i: usize, j: usize) -> Expr {
        match sort_pair(i, j) {
            None => zero(),
            Some((key, neg)) => signed(&self.c_time[pairs(self.n).binary_search(&key).unwrap()], neg),
        }
    }

    pub fn space(&self, i: usize, j: usize, k: usize) -> Expr {
        match sort_triple(i, j, k) {
            None => zero(),
            Some((key, neg)) => signed(&self.c_space[triples(self.n).binary_search(&key).unwrap()], neg),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &Expr> {
        self.c_time.iter().chain(&self.c_space)
    }

    pub fn is_zero(&self, cfg: &ZeroTestConfig) -> Result<bool, ZeroTestError> {
        all_zero(self.components(), self.n, cfg)
    }

    pub fn eval(&self, p: &Point) -> Result<oracle::NumericThreeForm, EvalError> {
        let n = self.n;
        let mut time = vec![vec![0.0; n]; n];
        for ((i, j), e) in pairs(n).into_iter().zip(&self.c_time) {
            let v = e.eval(p)?;
            time[i][j] = v;
            time[j][i] = -v;
        }
        let mut space = vec![vec![vec![0.0; n]; n]; n];
        for ((i, j, k), e) in triples(n).into_iter().zip(&self.c_space) {
            let v = e.eval(p)?;
            for (a, b, c, sign) in [(i, j, k, 1.0), (j, k, i, 1.0), (k, i, j, 1.0), (j, i, k, -1.0), (i, k, j, -1.0), (k, j, i, -1.0)] {
                space[a][b][c] = sign * v;
            }
        }
        Ok(oracle::NumericThreeForm { time, space })
    }
}

impl Serialize for SemiBasicThreeForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SemiBasicThreeForm", 2)?;
        let keys = pairs(self.n).into_iter().map(|(i, j)| format!("{},{}", i + 1, j + 1));
        st.serialize_field("time", &space_map(keys, &self.c_time))?;
        let keys = triples(self.n)
            .into_iter()
            .map(|(i, j, k)| format!("{},{},{}", i + 1, j + 1, k + 1));
        st.serialize_field("space", &space_map(keys, &self.c_space))?;
        st.end()
    }
}

/// A Lagrangian function `L(t, x, y)` on an `n`-dimensional configuration space.
#[derive(Clone, Debug, PartialEq)]
pub struct Lagrangian {
    pub n: usize,
    pub l: Expr,
}

impl Lagrangian {
    pub fn new(n: usize, l: Expr) -> Lagrangian {
        Lagrangian { n, l }
    }

    pub fn parse(text: &str, n: usize) -> Result<Lagrangian, ParseError> {
        Ok(Lagrangian { n, l: parse(text, n)? })
    }

    /// Hessian `g_ij = ∂²L/∂yⁱ∂yʲ`.
    pub fn hessian(&self) -> Vec<Vec<Expr>> {
        let n = self.n;
        let ly: Vec<Expr> = (0..n).map(|i| self.l.diff(Var::y(i))).collect();
        (0..n)
            .map(|i| (0..n).map(|j| ly[i].diff(Var::y(j))).collect())
            .collect()
    }
}

fn check_dim(theta: &SemiBasicOneForm, s: &Semispray) -> Result<(), FormError> {
    if theta.n() == s.n() {
        Ok(())
    } else {
        Err(FormError::DimensionMismatch {
            form: theta.n(),
            semispray: s.n(),
        })
    }
}

/// `d_Jθ`: `time(i) = θ_i − ∂θ₀/∂yⁱ`, `space(i, j) = ∂θ_j/∂yⁱ − ∂θ_i/∂yʲ`.
pub fn d_j(theta: &SemiBasicOneForm, s: &Semispray) -> Result<SemiBasicTwoForm, FormError> {
    check_dim(theta, s)?;
    let a = theta.multiplier();
    let b = theta.vertical_defect();
    Ok(SemiBasicTwoForm::from_fn(
        s.n(),
        |i| b[i].clone(),
        |i, j| &a[j][i] - &a[i][j],
    ))
}

/// `d_hθ`: `time(i) = S(θ_i) − θ_j Nʲ_i − δθ₀/δxⁱ`, `space(i, j) = δθ_j/δxⁱ − δθ_i/δxʲ`.
pub fn d_h(theta: &SemiBasicOneForm, s: &Semispray) -> Result<SemiBasicTwoForm, FormError> {
    check_dim(theta, s)?;
    let n = s.n();
    let nn = &s.connection().spatial;
    Ok(SemiBasicTwoForm::from_fn(
        n,
        |i| {
            let mut terms = vec![s.s_derivative(&theta.theta[i]), -s.delta(&theta.theta0, i)];
            terms.extend((0..n).map(|j| -(&theta.theta[j] * &nn[j][i])));
            Expr::sum(terms)
        },
        |i, j| s.delta(&theta.theta[j], i) - s.delta(&theta.theta[i], j),
    ))
}

/// `d_Φθ`: `time(i) = Rʲ_i (θ_j − ∂θ₀/∂yʲ)`, `space(i, j) = a_ik Rᵏ_j − a_jk Rᵏ_i`.
pub fn d_phi(theta: &SemiBasicOneForm, s: &Semispray) -> Result<SemiBasicTwoForm, FormError> {
    check_dim(theta, s)?;
    let n = s.n();
    let r = s.jacobi();
    let a = theta.multiplier();
    let b = theta.vertical_defect();
    Ok(SemiBasicTwoForm::from_fn(
        n,
        |i| Expr::sum((0..n).map(|j| &r[j][i] * &b[j])),
        |i, j| Expr::sum((0..n).map(|k| &a[i][k] * &r[k][j] - &a[j][k] * &r[k][i])),
    ))
}

/// `d_Rθ = i_R dθ`:
///
/// ```text
/// time(i, j)     = a_jk Rᵏ_i − a_ik Rᵏ_j − Rᵏ_ij (θ_k − ∂θ₀/∂yᵏ)
/// space(i, j, k) = a_il Rˡ_jk + a_jl Rˡ_ki + a_kl Rˡ_ij
/// ```
pub fn d_r(theta: &SemiBasicOneForm, s: &Semispray) -> Result<SemiBasicThreeForm, FormError> {
    check_dim(theta, s)?;
    let n = s.n();
    let curv = s.curvature();
    let (r, r3) = (&curv.phi, &curv.r3);
    let a = theta.multiplier();
    let b = theta.vertical_defect();
    Ok(SemiBasicThreeForm::from_fn(
        n,
        |i, j| {
            Expr::sum((0..n).map(|k| &a[j][k] * &r[k][i] - &a[i][k] * &r[k][j] - &r3[k][i][j] * &b[k]))
        },
        |i, j, k| {
            Expr::sum((0..n).map(|l| &a[i][l] * &r3[l][j][k] + &a[j][l] * &r3[l][k][i] + &a[k][l] * &r3[l][i][j]))
        },
    ))
}

/// `θ_L = L dt + d_J L`.
pub fn poincare_cartan(l: &Lagrangian) -> SemiBasicOneForm {
    SemiBasicOneForm {
        theta0: l.l.clone(),
        theta: (0..l.n).map(|i| l.l.diff(Var::y(i))).collect(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    pub g: Vec<Vec<Expr>>,
    pub regular: bool,
    /// Smallest numeric rank over the sample points.
    pub min_rank: usize,
}

impl Serialize for MetricTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        struct G<'a>(&'a [Vec<Expr>]);
        impl Serialize for G<'_> {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                crate::geometry::ser_matrix(self.0, s)
            }
        }
        let mut st = s.serialize_struct("MetricTensor", 3)?;
        st.serialize_field("g", &G(&self.g))?;
        st.serialize_field("regular", &self.regular)?;
        st.serialize_field("min_rank", &self.min_rank)?;
        st.end()
    }
}

/// `g_ij = ∂²L/∂yⁱ∂yʲ`; regular when its numeric rank is `n` at every sample point.
pub fn metric_tensor(l: &Lagrangian, cfg: &ZeroTestConfig) -> Result<MetricTensor, FormError> {
    let g = l.hessian();
    let entries: Vec<&Expr> = g.iter().flatten().collect();
    let points = SamplePlan::from(cfg).points(&entries, l.n)?;
    let mut min_rank = l.n;
    for p in &points {
        let m: Vec<Vec<f64>> = g
            .iter()
            .map(|row| row.iter().map(|e| e.eval(p).unwrap_or(f64::NAN)).collect())
            .collect();
        min_rank = min_rank.min(numeric_rank(&m, RANK_THRESHOLD));
    }
    Ok(MetricTensor {
        g,
        regular: min_rank == l.n,
        min_rank,
    })
}

/// `i_Sθ = θ₀`.
pub fn contract_s(theta: &SemiBasicOneForm) -> Expr {
    theta.theta0.clone()
}

/// Checks `θ = (i_Sθ) dt + d_J(i_Sθ)`, which holds whenever `d_Jθ = 0`.
pub fn reconstruction_identity(theta: &SemiBasicOneForm, s: &Semispray, cfg: &ZeroTestConfig) -> Result<bool, FormError> {
    let n = s.n();
    if !d_j(theta, s)?.is_zero(cfg)? {
        return Err(FormError::Precondition("d_J θ does not vanish".into()));
    }
    let l = contract_s(theta);
    let residuals: Vec<Expr> = (0..n).map(|i| &theta.theta[i] - l.diff(Var::y(i))).collect();
    Ok(all_zero(&residuals, n, cfg)?)
}

/// Matrix `ω(e_a, e_b)` of `dθ` on the adapted frame `S, δ_1..δ_n, ∂_1..∂_n`.
pub fn dtheta_matrix(theta: &SemiBasicOneForm, s: &Semispray) -> Result<Vec<Vec<Expr>>, FormError> {
    let n = s.n();
    let dh = d_h(theta, s)?;
    let a = theta.multiplier();
    let b = theta.vertical_defect();
    let m = 2 * n + 1;
    let mut w = vec![vec![zero(); m]; m];
    let mut put = |r: usize, c: usize, e: Expr| {
        w[c][r] = -&e;
        w[r][c] = e;
    };
    for i in 0..n {
        put(0, 1 + i, dh.time(i).clone());
        put(0, 1 + n + i, b[i].clone());
        for j in 0..n {
            if i < j {
                put(1 + i, 1 + j, dh.space(i, j));
            }
            put(1 + n + j, 1 + i, a[i][j].clone());
        }
    }
    Ok(w)
}

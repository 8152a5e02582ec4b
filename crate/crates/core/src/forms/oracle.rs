//! Independent numeric evaluation of `d_Jθ`, `d_hθ` and `d_Rθ`.
//!
//! `θ` is rewritten in natural coordinates as `(θ₀ − θ_i yⁱ) dt + θ_i dxⁱ`,
//! `dθ` is taken by central differences, and the derivations are obtained
//! by contraction:
//!
//! ```text
//! d_Jθ(X, Y) = dθ(JX, Y) + dθ(X, JY)
//! d_hθ(X, Y) = dθ(hX, Y) + dθ(X, hY) − dθ(X, Y)
//! d_Rθ(X, Y, Z) = dθ(R(X, Y), Z) + dθ(R(Y, Z), X) + dθ(R(Z, X), Y)
//! d_Jω(X, Y, Z) = dω(JX, Y, Z) + dω(X, JY, Z) + dω(X, Y, JZ)   (ω semi-basic)
//! ```
//!
//! The frame and the curvature come from the bracket oracle in
//! [`crate::geometry::oracle`], never from the symbolic connection.

use serde::Serialize;

use crate::expr::{EvalError, Expr, Point};
use crate::geometry::oracle::{Mat, Oracle};
use crate::geometry::Semispray;

use super::{SemiBasicOneForm, SemiBasicTwoForm};

/// Step for differentiating the components of `θ`.
pub const STEP: f64 = 1e-5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericTwoForm {
    pub time: Vec<f64>,
    pub space: Mat,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NumericThreeForm {
    pub time: Mat,
    pub space: Vec<Mat>,
}

impl NumericTwoForm {
    /// Largest `|self − other| / (1 + |other|)` over all components.
    pub fn distance(&self, other: &NumericTwoForm) -> f64 {
        let t = self.time.iter().zip(&other.time);
        let s = self.space.iter().flatten().zip(other.space.iter().flatten());
        t.chain(s).fold(0.0, |m, (a, b)| m.max((a - b).abs() / (1.0 + b.abs())))
    }
}

impl NumericThreeForm {
    pub fn distance(&self, other: &NumericThreeForm) -> f64 {
        let t = self.time.iter().flatten().zip(other.time.iter().flatten());
        let s = self
            .space
            .iter()
            .flatten()
            .flatten()
            .zip(other.space.iter().flatten().flatten());
        t.chain(s).fold(0.0, |m, (a, b)| m.max((a - b).abs() / (1.0 + b.abs())))
    }
}

fn natural_components(theta: &SemiBasicOneForm, z: &[f64]) -> Result<Vec<f64>, EvalError> {
    let n = theta.n();
    let p = Point::from_coords(z);
    let th: Vec<f64> = theta.theta.iter().map(|e| e.eval(&p)).collect::<Result<_, _>>()?;
    let mut c = vec![0.0; 2 * n + 1];
    c[0] = theta.theta0.eval(&p)? - (0..n).map(|i| th[i] * z[1 + n + i]).sum::<f64>();
    c[1..=n].copy_from_slice(&th);
    Ok(c)
}

/// `W_ab = ∂_a c_b − ∂_b c_a` for the natural components `c` of `θ`.
pub fn natural_dtheta(theta: &SemiBasicOneForm, p: &Point) -> Result<Mat, EvalError> {
    let z = p.to_coords();
    let m = z.len();
    // partial[a][b] = ∂_a c_b
    let mut partial = vec![vec![0.0; m]; m];
    let mut w = z.clone();
    for a in 0..m {
        w[a] = z[a] + STEP;
        let cp = natural_components(theta, &w)?;
        w[a] = z[a] - STEP;
        let cm = natural_components(theta, &w)?;
        w[a] = z[a];
        for b in 0..m {
            partial[a][b] = (cp[b] - cm[b]) / (2.0 * STEP);
        }
    }
    Ok((0..m)
        .map(|a| (0..m).map(|b| partial[a][b] - partial[b][a]).collect())
        .collect())
}

fn form(w: &Mat, x: &[f64], y: &[f64]) -> f64 {
    let mut s = 0.0;
    for (a, row) in w.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            s += x[a] * v * y[b];
        }
    }
    s
}

fn frame_combination(e: &Mat, c: &[f64]) -> Vec<f64> {
    let m = e.len();
    (0..m).map(|r| (0..m).map(|a| c[a] * e[a][r]).sum()).collect()
}

fn finite(v: f64, p: &Point) -> Result<f64, EvalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain {
            node: "finite-difference stencil".into(),
            point: p.clone(),
        })
    }
}

fn check_coefficients(s: &Semispray, p: &Point) -> Result<(), EvalError> {
    s.coefficients().iter().try_for_each(|e: &Expr| e.eval(p).map(|_| ()))
}

/// `(d_Jθ, d_hθ)` at `p` by contraction of the numeric `dθ`.
pub fn contraction_oracle(
    theta: &SemiBasicOneForm,
    s: &Semispray,
    p: &Point,
) -> Result<(NumericTwoForm, NumericTwoForm), EvalError> {
    check_coefficients(s, p)?;
    let n = s.n();
    let w = natural_dtheta(theta, p)?;
    let o = Oracle::new(s);
    let e = o.frame(&p.to_coords());
    // J(S) = 0, J(δ_i) = ∂_i, J(∂_i) = 0; h keeps S and δ_i.
    let j = |a: usize| -> Vec<f64> {
        if (1..=n).contains(&a) {
            e[a + n].clone()
        } else {
            vec![0.0; 2 * n + 1]
        }
    };
    let h = |a: usize| -> Vec<f64> {
        if a <= n {
            e[a].clone()
        } else {
            vec![0.0; 2 * n + 1]
        }
    };
    let dj = |a: usize, b: usize| form(&w, &j(a), &e[b]) + form(&w, &e[a], &j(b));
    let dh = |a: usize, b: usize| form(&w, &h(a), &e[b]) + form(&w, &e[a], &h(b)) - form(&w, &e[a], &e[b]);
    let mut out = Vec::new();
    for d in [&dj as &dyn Fn(usize, usize) -> f64, &dh] {
        let time = (0..n).map(|i| finite(d(0, 1 + i), p)).collect::<Result<_, _>>()?;
        let mut space = vec![vec![0.0; n]; n];
        for i in 0..n {
            for k in 0..n {
                space[i][k] = finite(d(1 + i, 1 + k), p)?;
            }
        }
        out.push(NumericTwoForm { time, space });
    }
    let dh = out.pop().unwrap();
    let dj = out.pop().unwrap();
    Ok((dj, dh))
}

/// `d_Rθ = i_R dθ` at `p`, with `R = ½[h,h]` from the bracket oracle.
pub fn d_r_oracle(theta: &SemiBasicOneForm, s: &Semispray, p: &Point) -> Result<NumericThreeForm, EvalError> {
    check_coefficients(s, p)?;
    let n = s.n();
    let m = 2 * n + 1;
    let z = p.to_coords();
    let w = natural_dtheta(theta, p)?;
    let o = Oracle::new(s);
    let e = o.frame(&z);
    let mut rvec = vec![vec![vec![0.0; m]; n + 1]; n + 1];
    for a in 0..=n {
        for b in a + 1..=n {
            let r = frame_combination(&e, &o.curvature_on_frame(a, b, &z));
            rvec[b][a] = r.iter().map(|v| -v).collect();
            rvec[a][b] = r;
        }
    }
    let irw = |a: usize, b: usize, c: usize| {
        form(&w, &rvec[a][b], &e[c]) + form(&w, &rvec[b][c], &e[a]) + form(&w, &rvec[c][a], &e[b])
    };
    let mut time = vec![vec![0.0; n]; n];
    let mut space = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            time[i][j] = finite(irw(0, 1 + i, 1 + j), p)?;
            for k in 0..n {
                space[i][j][k] = finite(irw(1 + i, 1 + j, 1 + k), p)?;
            }
        }
    }
    Ok(NumericThreeForm { time, space })
}

/// Natural-coordinate matrix of a semi-basic 2-form, using
/// `dt = dz⁰` and `δxⁱ = dxⁱ − yⁱ dt`.
fn natural_two_form(omega: &SemiBasicTwoForm, z: &[f64]) -> Result<Mat, EvalError> {
    let n = omega.n();
    let m = 2 * n + 1;
    let w = omega.eval(&Point::from_coords(z))?;
    let mut cof = vec![vec![0.0; m]; n + 1];
    cof[0][0] = 1.0;
    for i in 0..n {
        cof[1 + i][0] = -z[1 + n + i];
        cof[1 + i][1 + i] = 1.0;
    }
    let mut frame = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..n {
        frame[0][1 + i] = w.time[i];
        frame[1 + i][0] = -w.time[i];
        for j in 0..n {
            frame[1 + i][1 + j] = w.space[i][j];
        }
    }
    let mut out = vec![vec![0.0; m]; m];
    for (a, ra) in frame.iter().enumerate() {
        for (b, v) in ra.iter().enumerate() {
            if *v == 0.0 {
                continue;
            }
            for r in 0..m {
                for c in 0..m {
                    out[r][c] += v * cof[a][r] * cof[b][c];
                }
            }
        }
    }
    Ok(out)
}

/// `d_Jω = i_J dω` for a semi-basic 2-form at `p`, with `dω` by central differences.
pub fn d_j_two_form_oracle(omega: &SemiBasicTwoForm, s: &Semispray, p: &Point) -> Result<NumericThreeForm, EvalError> {
    check_coefficients(s, p)?;
    let n = s.n();
    let z = p.to_coords();
    let m = z.len();
    // partial[a][b][c] = ∂_a Ω_bc
    let mut partial = Vec::with_capacity(m);
    let mut w = z.clone();
    for a in 0..m {
        w[a] = z[a] + STEP;
        let op = natural_two_form(omega, &w)?;
        w[a] = z[a] - STEP;
        let om = natural_two_form(omega, &w)?;
        w[a] = z[a];
        let d: Mat = op
            .iter()
            .zip(&om)
            .map(|(rp, rm)| rp.iter().zip(rm).map(|(x, y)| (x - y) / (2.0 * STEP)).collect())
            .collect();
        partial.push(d);
    }
    let e = Oracle::new(s).frame(&z);
    let zero = vec![0.0; m];
    let j = |a: usize| if (1..=n).contains(&a) { &e[a + n] } else { &zero };
    let d_omega = |x: &[f64], y: &[f64], v: &[f64]| {
        let mut sum = 0.0;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    let coeff = partial[a][b][c] + partial[b][c][a] + partial[c][a][b];
                    sum += coeff * x[a] * y[b] * v[c];
                }
            }
        }
        sum
    };
    let djw = |a: usize, b: usize, c: usize| {
        d_omega(j(a), &e[b], &e[c]) + d_omega(&e[a], j(b), &e[c]) + d_omega(&e[a], &e[b], j(c))
    };
    let mut time = vec![vec![0.0; n]; n];
    let mut space = vec![vec![vec![0.0; n]; n]; n];
    for i in 0..n {
        for k in 0..n {
            time[i][k] = finite(djw(0, 1 + i, 1 + k), p)?;
            for l in 0..n {
                space[i][k][l] = finite(djw(1 + i, 1 + k, 1 + l), p)?;
            }
        }
    }
    Ok(NumericThreeForm { time, space })
}

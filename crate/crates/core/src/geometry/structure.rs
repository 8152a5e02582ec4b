use serde::Serialize;

use crate::expr::{all_zero, Expr, ZeroTestConfig, ZeroTestError};

use super::oracle::{Mat, Oracle};
use super::Semispray;

/// Tolerance for identities checked through the bracket oracle.
pub const ORACLE_TOL: f64 = 1e-4;
/// Number of sample points used for oracle checks.
pub const ORACLE_POINTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub method: String,
    pub passed: bool,
    pub max_defect: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub checks: Vec<IdentityCheck>,
}

impl StructureReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn mul(a: &Mat, b: &Mat) -> Mat {
    let m = a.len();
    let mut out = vec![vec![0.0; m]; m];
    for i in 0..m {
        for k in 0..m {
            if a[i][k] != 0.0 {
                for j in 0..m {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    out
}

fn diff_max(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn exact(name: &str, defect: f64) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        method: "frame matrices".into(),
        passed: defect == 0.0,
        max_defect: defect,
    }
}

fn oracle(name: &str, defect: f64) -> IdentityCheck {
    IdentityCheck {
        name: name.into(),
        method: "bracket oracle".into(),
        passed: defect <= ORACLE_TOL,
        max_defect: defect,
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

/// Checks the algebraic structure identities on frame matrices and the
/// differential ones through the bracket oracle at seeded points.
pub fn structure_identities(s: &Semispray, cfg: &ZeroTestConfig) -> Result<StructureReport, ZeroTestError> {
    let n = s.n();
    let o = Oracle::new(s);
    let m = o.dim();
    let id: Mat = (0..m).map(|i| (0..m).map(|j| (i == j) as u8 as f64).collect()).collect();
    let j = o.j_frame();
    let h = o.h_frame();
    let f = o.f_frame();
    let gamma: Mat = h
        .iter()
        .zip(&id)
        .map(|(hr, ir)| hr.iter().zip(ir).map(|(a, b)| 2.0 * a - b).collect())
        .collect();
    let zero = vec![vec![0.0; m]; m];
    let f3 = mul(&f, &mul(&f, &f));
    let f3_plus_f: Mat = f3
        .iter()
        .zip(&f)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
        .collect();

    let mut checks = vec![
        exact("J^2 = 0", diff_max(&mul(&j, &j), &zero)),
        exact("h^2 = h", diff_max(&mul(&h, &h), &h)),
        exact("Gamma^2 = Id", diff_max(&mul(&gamma, &gamma), &id)),
        exact("F^3 + F = 0", diff_max(&f3_plus_f, &zero)),
    ];

    let curv = s.curvature();
    let conn = s.connection();
    let mut zero_checks: Vec<(&str, Vec<Expr>)> = Vec::new();
    let mut antisym = Vec::new();
    for i in 0..n {
        for a in 0..n {
            for b in 0..n {
                antisym.push(&curv.r3[i][a][b] + &curv.r3[i][b][a]);
            }
        }
    }
    zero_checks.push(("R antisymmetric", antisym));
    let mut n0 = Vec::new();
    for i in 0..n {
        let contracted = Expr::sum((0..n).map(|k| &conn.spatial[i][k] * Expr::y(k)));
        n0.push(&conn.time[i] + contracted - Expr::int(2) * &s.coefficients()[i]);
    }
    zero_checks.push(("N0 = 2G - N y", n0));
    for (name, exprs) in zero_checks {
        let passed = all_zero(&exprs, n, cfg)?;
        checks.push(IdentityCheck {
            name: name.into(),
            method: "zero test".into(),
            passed,
            max_defect: if passed { 0.0 } else { f64::NAN },
        });
    }

    let mut exprs: Vec<&Expr> = s.coefficients().iter().collect();
    exprs.extend(curv.phi.iter().flatten());
    exprs.extend(curv.r3.iter().flatten().flatten());
    let mut worst = [0.0f64; 8];
    for index in 0..ORACLE_POINTS.min(cfg.samples) as u64 {
        let p = cfg.usable_point(&exprs, n, index)?;
        let stencil = |_| ZeroTestError::Inconclusive {
                index,
            attempts: cfg.max_resamples + 1,
        };
        worst[0] = worst[0].max(o.weak_torsion(&p).map_err(stencil)?);
        worst[1] = worst[1].max(o.nijenhuis_defect(&p).map_err(stencil)?);
        let hh = o.half_hh(&p).map_err(stencil)?;
        for a in 0..n {
            for b in 0..n {
                let sym = curv.phi[a][b].eval(&p).unwrap_or(f64::NAN);
                worst[2] = worst[2].max(relative(hh.phi[a][b], sym));
                for c in 0..n {
                    let sym = curv.r3[a][b][c].eval(&p).unwrap_or(f64::NAN);
                    worst[3] = worst[3].max(relative(hh.r3[a][b][c], sym));
                }
            }
        }
        worst[3] = worst[3].max(hh.horizontal_leak).max(hh.vertical_leak);
        worst[4] = worst[4].max(o.j_phi_defect(&p).map_err(stencil)?);
        let lie = o.lie_derivative_defects(&p).map_err(stencil)?;
        for (w, d) in worst[5..].iter_mut().zip(lie) {
            *w = w.max(d);
        }
    }
    let names = [
        "[J,h] = 0",
        "N_J = -J^dt",
        "Phi = i_S R",
        "R = 1/2 [h,h]",
        "[J,Phi] = 3R + Phi^dt",
        "h = 1/2 (Id - L_S J + S (x) dt)",
        "F = h o L_S h - J",
        "Phi = v o L_S h",
    ];
    for (name, w) in names.iter().zip(worst) {
        checks.push(oracle(name, if w.is_nan() { f64::INFINITY } else { w }));
    }
    Ok(StructureReport { checks })
}

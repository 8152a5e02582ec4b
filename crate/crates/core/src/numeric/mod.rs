//! Numeric oracles: fixed-step RK4 geodesics, Euler–Lagrange residuals along
//! sampled paths, finite-difference derivative checks and numeric rank.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::expr::{Expr, Point, SampleBox, Var, ZeroTestConfig, ZeroTestError};
use crate::geometry::Semispray;

/// Step used by [`fd_check`].
pub const FD_STEP: f64 = 1e-6;
/// Relative pivot threshold used by [`numeric_rank`].
pub const RANK_THRESHOLD: f64 = 1e-8;

/// Seeded sample points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub seed: u64,
    pub count: usize,
    pub sample_box: SampleBox,
    pub max_resamples: u32,
}

impl From<&ZeroTestConfig> for SamplePlan {
    fn from(c: &ZeroTestConfig) -> Self {
        SamplePlan {
            seed: c.seed,
            count: c.samples,
            sample_box: c.sample_box,
            max_resamples: c.max_resamples,
        }
    }
}

impl SamplePlan {
    fn config(&self) -> ZeroTestConfig {
        ZeroTestConfig {
            samples: self.count,
            sample_box: self.sample_box,
            seed: self.seed,
            max_resamples: self.max_resamples,
            ..ZeroTestConfig::default()
        }
    }

    /// The plan's points, each resampled until every expression evaluates.
    pub fn points(&self, exprs: &[&Expr], n: usize) -> Result<Vec<Point>, ZeroTestError> {
        let cfg = self.config();
        (0..self.count as u64).map(|i| cfg.usable_point(exprs, n, i)).collect()
    }
}

/// Rank by Gaussian elimination with complete pivoting; pivots below
/// `rel · max|m_ij|` count as zero.
pub fn numeric_rank(m: &[Vec<f64>], rel: f64) -> usize {
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return 0;
    }
    let mut rank = 0;
    let mut col_perm: Vec<usize> = (0..cols).collect();
    while rank < rows.min(cols) {
        let mut best = (0.0, rank, rank);
        for (r, row) in a.iter().enumerate().skip(rank) {
            for (c, &cp) in col_perm.iter().enumerate().skip(rank) {
                if row[cp].abs() > best.0 {
                    best = (row[cp].abs(), r, c);
                }
            }
        }
        if best.0 <= rel * scale {
            break;
        }
        a.swap(rank, best.1);
        col_perm.swap(rank, best.2);
        let pc = col_perm[rank];
        let pivot = a[rank][pc];
        for r in rank + 1..rows {
            let f = a[r][pc] / pivot;
            if f != 0.0 {
                for &c in &col_perm[rank..] {
                    a[r][c] -= f * a[rank][c];
                }
            }
        }
        rank += 1;
    }
    rank
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdReport {
    /// Largest `|fd − exact| / (1 + |exact|)` over points and variables.
    pub max_error: f64,
    pub points: usize,
}

/// Compares `diff(e, v)` against central differences for every coordinate.
pub fn fd_check(e: &Expr, n: usize, plan: &SamplePlan) -> Result<FdReport, ZeroTestError> {
    let vars = Var::all(n);
    let derivs: Vec<Expr> = vars.iter().map(|v| e.diff(*v)).collect();
    let mut exprs: Vec<&Expr> = vec![e];
    exprs.extend(derivs.iter());
    let cfg = plan.config();
    let mut max_error: f64 = 0.0;
    for index in 0..plan.count as u64 {
        // A point is usable when the stencil stays inside the domain too.
        let mut found = None;
        for attempt in 0..=plan.max_resamples {
            let p = plan.sample_box.point(n, plan.seed, index, attempt);
            if let Some(err) = stencil_error(e, &vars, &derivs, &p) {
                found = Some(err);
                break;
            }
        }
        let err = found.ok_or(ZeroTestError::Inconclusive {
            index,
            attempts: cfg.max_resamples + 1,
        })?;
        max_error = max_error.max(err);
    }
    Ok(FdReport {
        max_error,
        points: plan.count,
    })
}

fn stencil_error(e: &Expr, vars: &[Var], derivs: &[Expr], p: &Point) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for (v, d) in vars.iter().zip(derivs) {
        let exact = d.eval(p).ok()?;
        let base = p.get(*v)?;
        let mut q = p.clone();
        q.set(*v, base + FD_STEP);
        let fp = e.eval(&q).ok()?;
        q.set(*v, base - FD_STEP);
        let fm = e.eval(&q).ok()?;
        let fd = (fp - fm) / (2.0 * FD_STEP);
        worst = worst.max((fd - exact).abs() / (1.0 + exact.abs()));
    }
    Some(worst)
}

/// Samples of a geodesic `ẋ = y, ẏ = −2G(t, x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub n: usize,
    pub step: f64,
    pub method: String,
    pub samples: Vec<Point>,
    /// Set when a domain error stopped the integration early.
    pub truncated: Option<String>,
}

/// Classical fixed-step fourth-order Runge–Kutta.
pub fn integrate_geodesic(s: &Semispray, start: &Point, h: f64, steps: usize) -> Trajectory {
    let n = s.n();
    assert!(h > 0.0, "step must be positive");
    assert_eq!(start.dim(), n, "start point dimension");
    let g = s.coefficients();
    let rhs = |t: f64, u: &[f64]| -> Option<Vec<f64>> {
        let p = Point::new(t, u[..n].to_vec(), u[n..].to_vec());
        let mut out = Vec::with_capacity(2 * n);
        out.extend_from_slice(&u[n..]);
        for gi in g {
            out.push(-2.0 * gi.eval(&p).ok()?);
        }
        Some(out)
    };
    let mut samples = vec![start.clone()];
    let mut u: Vec<f64> = start.x.iter().chain(&start.y).copied().collect();
    let mut t = start.t;
    let mut truncated = None;
    for k in 0..steps {
        let step = || -> Option<Vec<f64>> {
            let shift = |base: &[f64], d: &[f64], c: f64| -> Vec<f64> {
                base.iter().zip(d).map(|(a, b)| a + c * b).collect()
            };
            let k1 = rhs(t, &u)?;
            let k2 = rhs(t + h / 2.0, &shift(&u, &k1, h / 2.0))?;
            let k3 = rhs(t + h / 2.0, &shift(&u, &k2, h / 2.0))?;
            let k4 = rhs(t + h, &shift(&u, &k3, h))?;
            let next: Vec<f64> = (0..2 * n)
                .map(|i| u[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                .collect();
            next.iter().all(|v| v.is_finite()).then_some(next)
        };
        match step() {
            Some(next) => {
                u = next;
                t = start.t + (k + 1) as f64 * h;
                samples.push(Point::new(t, u[..n].to_vec(), u[n..].to_vec()));
            }
            None => {
                truncated = Some(format!("domain error after step {k} at t = {t:.16e}"));
                break;
            }
        }
    }
    Trajectory {
        n,
        step: h,
        method: "rk4".into(),
        samples,
        truncated,
    }
}

impl Trajectory {
    /// `max |(x(t+h) − x(t))/h − y(t+h/2)|`, with the midpoint velocity
    /// taken as the mean of the endpoint samples.
    pub fn consistency_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for w in self.samples.windows(2) {
            for i in 0..self.n {
                let slope = (w[1].x[i] - w[0].x[i]) / self.step;
                let mid = 0.5 * (w[0].y[i] + w[1].y[i]);
                worst = worst.max((slope - mid).abs());
            }
        }
        worst
    }

    /// Tab-separated export, one sample per line, 17 significant digits.
    pub fn export(&self) -> String {
        let mut out = String::new();
        let status = match &self.truncated {
            None => "ok".to_string(),
            Some(why) => format!("truncated: {why}"),
        };
        let _ = writeln!(
            out,
            "# method={} n={} step={:.16e} samples={} status={}",
            self.method,
            self.n,
            self.step,
            self.samples.len(),
            status
        );
        let mut cols = vec!["t".to_string()];
        cols.extend((1..=self.n).map(|i| format!("x{i}")));
        cols.extend((1..=self.n).map(|i| format!("y{i}")));
        let _ = writeln!(out, "# {}", cols.join("\t"));
        for p in &self.samples {
            let line: Vec<String> = p.to_coords().iter().map(|v| format!("{v:.16e}")).collect();
            let _ = writeln!(out, "{}", line.join("\t"));
        }
        out
    }
}

/// Largest `|d/dt(∂L/∂yⁱ) − ∂L/∂xⁱ|` over interior samples, with the time
/// derivative taken by a five-point central difference along the path.
pub fn euler_lagrange_residual(l: &Expr, traj: &Trajectory) -> f64 {
    let n = traj.n;
    let ly: Vec<Expr> = (0..n).map(|i| l.diff(Var::y(i))).collect();
    let lx: Vec<Expr> = (0..n).map(|i| l.diff(Var::x(i))).collect();
    let m = traj.samples.len();
    if m < 5 {
        return f64::NAN;
    }
    let h = traj.step;
    let momenta: Vec<Vec<f64>> = traj
        .samples
        .iter()
        .map(|p| ly.iter().map(|e| e.eval(p).unwrap_or(f64::NAN)).collect())
        .collect();
    let mut worst: f64 = 0.0;
    for k in 2..m - 2 {
        for i in 0..n {
            let dp = (momenta[k - 2][i] - 8.0 * momenta[k - 1][i] + 8.0 * momenta[k + 1][i] - momenta[k + 2][i])
                / (12.0 * h);
            let force = lx[i].eval(&traj.samples[k]).unwrap_or(f64::NAN);
            let r = (dp - force).abs();
            if r.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(r);
        }
    }
    worst
}

//! Finite-difference evaluation of Frölicher–Nijenhuis brackets.
//!
//! Everything here works in natural coordinates `z = (t, x¹..xⁿ, y¹..yⁿ)`
//! and uses only numeric values of the coefficients `Gⁱ`: the connection is
//! recovered by central differences of `G`, vector fields are closures, and
//! Lie brackets are central-difference directional derivatives. None of the
//! symbolic connection or curvature code is reused, except where a tensor
//! under test (the Jacobi endomorphism) has to be supplied as input.
//!
//! Bracket convention for vector-valued 1-forms:
//!
//! ```text
//! [K,L](X,Y) = [KX,LY] + [LX,KY] + KL[X,Y] + LK[X,Y]
//!            − K[LX,Y] − K[X,LY] − L[KX,Y] − L[X,KY]
//! ```
//!
//! With it, `½[h,h](δ_j, δ_k) = Rⁱ_jk ∂_i` and `½[h,h](S, δ_j) = Rⁱ_j ∂_i`.

use crate::expr::{EvalError, Point};

use super::Semispray;

/// Step for differentiating `G` to obtain the connection.
pub const INNER_STEP: f64 = 1e-5;
/// Step for directional derivatives of vector fields.
pub const OUTER_STEP: f64 = 1e-4;

pub type Mat = Vec<Vec<f64>>;
type Field<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;
type Tensor<'a> = Box<dyn Fn(&[f64]) -> Mat + 'a>;

pub struct Oracle<'a> {
    s: &'a Semispray,
    n: usize,
}

/// Adapted-frame components of `½[h,h]` at a point.
#[derive(Clone, Debug)]
pub struct BracketComponents {
    /// `Rⁱ_jk` read off from `½[h,h](δ_j, δ_k)`.
    pub r3: Vec<Vec<Vec<f64>>>,
    /// `Rⁱ_j` read off from `½[h,h](S, δ_j)`.
    pub phi: Vec<Vec<f64>>,
    /// Largest non-vertical component on horizontal pairs (should vanish).
    pub horizontal_leak: f64,
    /// Largest component on pairs involving a vertical vector (should vanish).
    pub vertical_leak: f64,
}

fn matvec(m: &Mat, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

impl<'a> Oracle<'a> {
    pub fn new(s: &'a Semispray) -> Oracle<'a> {
        Oracle { s, n: s.n() }
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn g(&self, z: &[f64]) -> Vec<f64> {
        let p = Point::from_coords(z);
        self.s
            .coefficients()
            .iter()
            .map(|e| e.eval(&p).unwrap_or(f64::NAN))
            .collect()
    }

    /// Numeric `Nⁱ_j` and `Nⁱ₀` at `z`.
    pub fn connection(&self, z: &[f64]) -> (Mat, Vec<f64>) {
        let n = self.n;
        let mut nn = vec![vec![0.0; n]; n];
        let mut w = z.to_vec();
        for j in 0..n {
            let c = 1 + n + j;
            w[c] = z[c] + INNER_STEP;
            let gp = self.g(&w);
            w[c] = z[c] - INNER_STEP;
            let gm = self.g(&w);
            w[c] = z[c];
            for i in 0..n {
                nn[i][j] = (gp[i] - gm[i]) / (2.0 * INNER_STEP);
            }
        }
        let g = self.g(z);
        let n0 = (0..n)
            .map(|i| 2.0 * g[i] - (0..n).map(|j| nn[i][j] * z[1 + n + j]).sum::<f64>())
            .collect();
        (nn, n0)
    }

    /// Adapted frame `S, δ_1..δ_n, ∂_1..∂_n` as natural-coordinate vectors.
    pub fn frame(&self, z: &[f64]) -> Mat {
        let n = self.n;
        let m = self.dim();
        let (nn, _) = self.connection(z);
        let g = self.g(z);
        let mut out = Vec::with_capacity(m);
        let mut s = vec![0.0; m];
        s[0] = 1.0;
        for i in 0..n {
            s[1 + i] = z[1 + n + i];
            s[1 + n + i] = -2.0 * g[i];
        }
        out.push(s);
        for i in 0..n {
            let mut d = vec![0.0; m];
            d[1 + i] = 1.0;
            for j in 0..n {
                d[1 + n + j] = -nn[j][i];
            }
            out.push(d);
        }
        for i in 0..n {
            let mut d = vec![0.0; m];
            d[1 + n + i] = 1.0;
            out.push(d);
        }
        out
    }

    /// Dual coframe `dt, δx¹..δxⁿ, δy¹..δyⁿ` as rows.
    pub fn coframe(&self, z: &[f64]) -> Mat {
        let n = self.n;
        let m = self.dim();
        let (nn, n0) = self.connection(z);
        let mut out = Vec::with_capacity(m);
        let mut dt = vec![0.0; m];
        dt[0] = 1.0;
        out.push(dt);
        for i in 0..n {
            let mut r = vec![0.0; m];
            r[0] = -z[1 + n + i];
            r[1 + i] = 1.0;
            out.push(r);
        }
        for i in 0..n {
            let mut r = vec![0.0; m];
            r[0] = n0[i];
            for j in 0..n {
                r[1 + j] = nn[i][j];
            }
            r[1 + n + i] = 1.0;
            out.push(r);
        }
        out
    }

    /// Adapted-frame components of a natural-coordinate vector.
    pub fn to_frame(&self, z: &[f64], v: &[f64]) -> Vec<f64> {
        matvec(&self.coframe(z), v)
    }

    fn frame_field(&self, a: usize) -> Field<'_> {
        Box::new(move |z| self.frame(z).swap_remove(a))
    }

    /// Tensor field whose adapted-frame matrix is `kf(z)`:
    /// `K(e_b) = Σ_a kf[a][b] e_a`.
    fn tensor<'b, F>(&'b self, kf: F) -> Tensor<'b>
    where
        F: Fn(&[f64]) -> Mat + 'b,
    {
        Box::new(move |z| {
            let e = self.frame(z);
            let c = self.coframe(z);
            let k = kf(z);
            let m = self.dim();
            let mut out = vec![vec![0.0; m]; m];
            for a in 0..m {
                for b in 0..m {
                    if k[a][b] == 0.0 {
                        continue;
                    }
                    for r in 0..m {
                        for col in 0..m {
                            out[r][col] += k[a][b] * e[a][r] * c[b][col];
                        }
                    }
                }
            }
            out
        })
    }

    fn constant_tensor(&self, kf: Mat) -> Tensor<'_> {
        self.tensor(move |_| kf.clone())
    }

    /// Frame matrix of the vertical endomorphism `J(δ_i) = ∂_i`.
    pub fn j_frame(&self) -> Mat {
        let n = self.n;
        let mut k = vec![vec![0.0; self.dim()]; self.dim()];
        for i in 0..n {
            k[1 + n + i][1 + i] = 1.0;
        }
        k
    }

    /// Frame matrix of the horizontal projector.
    pub fn h_frame(&self) -> Mat {
        let mut k = vec![vec![0.0; self.dim()]; self.dim()];
        for (a, row) in k.iter_mut().enumerate().take(self.n + 1) {
            row[a] = 1.0;
        }
        k
    }

    /// Frame matrix of `𝔽 = δ_i ⊗ δyⁱ − ∂_i ⊗ δxⁱ`.
    pub fn f_frame(&self) -> Mat {
        let n = self.n;
        let mut k = vec![vec![0.0; self.dim()]; self.dim()];
        for i in 0..n {
            k[1 + i][1 + n + i] = 1.0;
            k[1 + n + i][1 + i] = -1.0;
        }
        k
    }

    /// Frame matrix of the Jacobi endomorphism `Φ(δ_j) = Rⁱ_j ∂_i`,
    /// taken from the symbolic components.
    fn phi_frame(&self, z: &[f64]) -> Mat {
        let n = self.n;
        let p = Point::from_coords(z);
        let mut k = vec![vec![0.0; self.dim()]; self.dim()];
        for (i, row) in self.s.jacobi().iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                k[1 + n + i][1 + j] = e.eval(&p).unwrap_or(f64::NAN);
            }
        }
        k
    }

    fn apply<'b>(&self, k: &'b Tensor<'_>, x: &'b Field<'_>) -> Field<'b> {
        Box::new(move |z| matvec(&k(z), &x(z)))
    }

    /// `[X, Y](z) = D_X Y − D_Y X` by central differences.
    pub fn lie(&self, x: &dyn Fn(&[f64]) -> Vec<f64>, y: &dyn Fn(&[f64]) -> Vec<f64>, z: &[f64]) -> Vec<f64> {
        let dir = |f: &dyn Fn(&[f64]) -> Vec<f64>, v: &[f64]| {
            let mut zp = z.to_vec();
            let mut zm = z.to_vec();
            axpy(OUTER_STEP, v, &mut zp);
            axpy(-OUTER_STEP, v, &mut zm);
            let fp = f(&zp);
            let fm = f(&zm);
            fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * OUTER_STEP)).collect::<Vec<_>>()
        };
        let xv = x(z);
        let yv = y(z);
        let a = dir(y, &xv);
        let b = dir(x, &yv);
        a.iter().zip(&b).map(|(p, q)| p - q).collect()
    }

    /// `[K, L](X, Y)` at `z`, as a natural-coordinate vector.
    fn fn_bracket(&self, k: &Tensor<'_>, l: &Tensor<'_>, x: &Field<'_>, y: &Field<'_>, z: &[f64]) -> Vec<f64> {
        let kx = self.apply(k, x);
        let ky = self.apply(k, y);
        let lx = self.apply(l, x);
        let ly = self.apply(l, y);
        let kz = k(z);
        let lz = l(z);
        let xy = self.lie(x, y, z);
        let mut out = self.lie(&kx, &ly, z);
        axpy(1.0, &self.lie(&lx, &ky, z), &mut out);
        axpy(1.0, &matvec(&kz, &matvec(&lz, &xy)), &mut out);
        axpy(1.0, &matvec(&lz, &matvec(&kz, &xy)), &mut out);
        axpy(-1.0, &matvec(&kz, &self.lie(&lx, y, z)), &mut out);
        axpy(-1.0, &matvec(&kz, &self.lie(x, &ly, z)), &mut out);
        axpy(-1.0, &matvec(&lz, &self.lie(&kx, y, z)), &mut out);
        axpy(-1.0, &matvec(&lz, &self.lie(x, &ky, z)), &mut out);
        out
    }

    /// Frame components of `[K, L](e_a, e_b)`.
    fn bracket_on_frame(&self, k: &Tensor<'_>, l: &Tensor<'_>, a: usize, b: usize, z: &[f64]) -> Vec<f64> {
        let x = self.frame_field(a);
        let y = self.frame_field(b);
        let v = self.fn_bracket(k, l, &x, &y, z);
        self.to_frame(z, &v)
    }

    /// Frame components of the curvature `½[h,h](e_a, e_b)`.
    pub fn curvature_on_frame(&self, a: usize, b: usize, z: &[f64]) -> Vec<f64> {
        let h = self.constant_tensor(self.h_frame());
        let mut v = self.bracket_on_frame(&h, &h, a, b, z);
        v.iter_mut().for_each(|c| *c *= 0.5);
        v
    }

    /// Evaluates `½[h,h]` on all frame pairs.
    pub fn half_hh(&self, p: &Point) -> Result<BracketComponents, EvalError> {
        let z = self.checked(p)?;
        let n = self.n;
        let m = self.dim();
        let mut r3 = vec![vec![vec![0.0; n]; n]; n];
        let mut phi = vec![vec![0.0; n]; n];
        let mut horizontal_leak: f64 = 0.0;
        let mut vertical_leak: f64 = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                let v = self.curvature_on_frame(a, b, &z);
                if b > n {
                    vertical_leak = vertical_leak.max(max_abs(&v));
                    continue;
                }
                horizontal_leak = horizontal_leak.max(max_abs(&v[..=n]));
                for i in 0..n {
                    let c = v[1 + n + i];
                    if a == 0 {
                        phi[i][b - 1] = c;
                    } else {
                        r3[i][a - 1][b - 1] = c;
                        r3[i][b - 1][a - 1] = -c;
                    }
                }
            }
        }
        finite(p, BracketComponents {
            r3,
            phi,
            horizontal_leak,
            vertical_leak,
        })
    }

    /// Largest frame component of `[J,Φ] − 3R − Φ∧dt` over all frame pairs,
    /// with `R` and `Φ` taken from the symbolic curvature.
    pub fn j_phi_defect(&self, p: &Point) -> Result<f64, EvalError> {
        let z = self.checked(p)?;
        let n = self.n;
        let m = self.dim();
        let j = self.constant_tensor(self.j_frame());
        let phi = self.tensor(move |w| self.phi_frame(w));
        let curv = self.s.curvature();
        let r = |e: &crate::expr::Expr| e.eval(p).unwrap_or(f64::NAN);
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                let mut v = self.bracket_on_frame(&j, &phi, a, b, &z);
                // 3R(e_a, e_b)
                if b <= n {
                    for i in 0..n {
                        let rv = if a == 0 {
                            r(&curv.phi[i][b - 1])
                        } else {
                            r(&curv.r3[i][a - 1][b - 1])
                        };
                        v[1 + n + i] -= 3.0 * rv;
                    }
                }
                // (Φ∧dt)(e_a, e_b) = Φ(e_a) dt(e_b) − Φ(e_b) dt(e_a)
                if a == 0 && (1..=n).contains(&b) {
                    for i in 0..n {
                        v[1 + n + i] += r(&curv.phi[i][b - 1]);
                    }
                }
                worst = worst.max(max_abs(&v));
            }
        }
        finite(p, worst)
    }

    /// Largest frame component of the weak torsion `[J,h]`.
    pub fn weak_torsion(&self, p: &Point) -> Result<f64, EvalError> {
        let z = self.checked(p)?;
        let j = self.constant_tensor(self.j_frame());
        let h = self.constant_tensor(self.h_frame());
        let m = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                worst = worst.max(max_abs(&self.bracket_on_frame(&j, &h, a, b, &z)));
            }
        }
        finite(p, worst)
    }

    /// Largest frame component of `½[J,J] + J∧dt`.
    pub fn nijenhuis_defect(&self, p: &Point) -> Result<f64, EvalError> {
        let z = self.checked(p)?;
        let n = self.n;
        let j = self.constant_tensor(self.j_frame());
        let m = self.dim();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in a + 1..m {
                let mut v = self.bracket_on_frame(&j, &j, a, b, &z);
                v.iter_mut().for_each(|c| *c *= 0.5);
                // (J∧dt)(S, δ_i) = −∂_i
                if a == 0 && (1..=n).contains(&b) {
                    v[n + b] -= 1.0;
                }
                worst = worst.max(max_abs(&v));
            }
        }
        finite(p, worst)
    }

    /// Frame matrix of `ℒ_S K` for a tensor with frame matrix `kf`:
    /// `(ℒ_S K)(X) = [S, KX] − K[S, X]`.
    fn lie_s(&self, kf: Mat, z: &[f64]) -> Mat {
        let m = self.dim();
        let k = self.constant_tensor(kf);
        let s = self.frame_field(0);
        let kz = k(z);
        let mut out = vec![vec![0.0; m]; m];
        for b in 0..m {
            let x = self.frame_field(b);
            let kx = self.apply(&k, &x);
            let mut v = self.lie(&s, &kx, z);
            axpy(-1.0, &matvec(&kz, &self.lie(&s, &x, z)), &mut v);
            let c = self.to_frame(z, &v);
            for a in 0..m {
                out[a][b] = c[a];
            }
        }
        out
    }

    /// Checks the Lie-derivative descriptions of the structure tensors:
    /// `h = ½(Id − ℒ_S J + S⊗dt)`, `𝔽 = h∘ℒ_S h − J` and `Φ = v∘ℒ_S h`.
    /// Returns the three largest frame-component defects.
    pub fn lie_derivative_defects(&self, p: &Point) -> Result<[f64; 3], EvalError> {
        let z = self.checked(p)?;
        let m = self.dim();
        let n = self.n;
        let ls_j = self.lie_s(self.j_frame(), &z);
        let ls_h = self.lie_s(self.h_frame(), &z);
        let hf = self.h_frame();
        let jf = self.j_frame();
        let ff = self.f_frame();
        let phif = self.phi_frame(&z);
        let mut worst = [0.0f64; 3];
        for a in 0..m {
            for b in 0..m {
                let id = if a == b { 1.0 } else { 0.0 };
                let s_dt = if a == 0 && b == 0 { 1.0 } else { 0.0 };
                let h_expected = 0.5 * (id - ls_j[a][b] + s_dt);
                worst[0] = worst[0].max((h_expected - hf[a][b]).abs());
                // h∘ℒ_S h keeps horizontal rows; v∘ℒ_S h keeps vertical rows.
                let horizontal = a <= n;
                let f_expected = if horizontal { ls_h[a][b] } else { 0.0 } - jf[a][b];
                worst[1] = worst[1].max((f_expected - ff[a][b]).abs());
                let phi_expected = if horizontal { 0.0 } else { ls_h[a][b] };
                worst[2] = worst[2].max((phi_expected - phif[a][b]).abs());
            }
        }
        finite(p, worst)
    }

    fn checked(&self, p: &Point) -> Result<Vec<f64>, EvalError> {
        for e in self.s.coefficients() {
            e.eval(p)?;
        }
        Ok(p.to_coords())
    }
}

trait AllFinite {
    fn all_finite(&self) -> bool;
}

impl AllFinite for f64 {
    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl AllFinite for [f64; 3] {
    fn all_finite(&self) -> bool {
        self.iter().all(|x| x.is_finite())
    }
}

impl AllFinite for BracketComponents {
    fn all_finite(&self) -> bool {
        self.horizontal_leak.is_finite()
            && self.vertical_leak.is_finite()
            && self.phi.iter().flatten().all(|x| x.is_finite())
            && self.r3.iter().flatten().flatten().all(|x| x.is_finite())
    }
}

fn finite<T: AllFinite>(p: &Point, v: T) -> Result<T, EvalError> {
    if v.all_finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain {
            node: "finite-difference stencil".into(),
            point: p.clone(),
        })
    }
}

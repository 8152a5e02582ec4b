//! Randomized identity testing.
//!
//! An expression that is not syntactically zero after simplification is
//! evaluated at pseudo-random points of a box. Points are a pure function of
//! `(seed, index, attempt)`, so repeated runs see the same samples.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Expr, Point};

/// Axis-aligned box `[lo, hi]` applied to every coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub lo: f64,
    pub hi: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox { lo: 0.1, hi: 1.1 }
    }
}

impl SampleBox {
    /// Deterministic sample for a given seed, point index and retry count.
    pub fn point(&self, n: usize, seed: u64, index: u64, attempt: u32) -> Point {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index.wrapping_mul(1 << 16).wrapping_add(attempt as u64));
        let mut draw = || rng.random_range(self.lo..self.hi);
        let t = draw();
        let x = (0..n).map(|_| draw()).collect();
        let y = (0..n).map(|_| draw()).collect();
        Point { t, x, y }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroTestConfig {
    pub samples: usize,
    pub sample_box: SampleBox,
    /// Relative tolerance, scaled by the largest summand magnitude (at least 1).
    pub tolerance: f64,
    pub seed: u64,
    /// Retries per sample point when evaluation leaves the domain.
    pub max_resamples: u32,
}

impl Default for ZeroTestConfig {
    fn default() -> Self {
        ZeroTestConfig {
            samples: 40,
            sample_box: SampleBox::default(),
            tolerance: 1e-9,
            seed: 0x5eed,
            max_resamples: 10,
        }
    }
}

impl ZeroTestConfig {
    /// The `index`-th point that evaluates every expression in `exprs`.
    pub fn usable_point(&self, exprs: &[&Expr], n: usize, index: u64) -> Result<Point, ZeroTestError> {
        for attempt in 0..=self.max_resamples {
            let p = self.sample_box.point(n, self.seed, index, attempt);
            if exprs.iter().all(|e| e.eval(&p).is_ok()) {
                return Ok(p);
            }
        }
        Err(ZeroTestError::Inconclusive {
            index,
            attempts: self.max_resamples + 1,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ZeroTestError {
    #[error("sample {index} stayed outside the domain after {attempts} attempts")]
    Inconclusive { index: u64, attempts: u32 },
}

/// A sample where the expression is measurably nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Point,
    pub value: f64,
    pub scale: f64,
}

impl Expr {
    /// Probabilistic test for `self == 0` on the sample box.
    pub fn is_zero(&self, n: usize, cfg: &ZeroTestConfig) -> Result<bool, ZeroTestError> {
        self.nonzero_witness(n, cfg).map(|w| w.is_none())
    }

    /// First sample at which `self` exceeds the tolerance, if any.
    pub fn nonzero_witness(&self, n: usize, cfg: &ZeroTestConfig) -> Result<Option<Witness>, ZeroTestError> {
        let e = self.simplify();
        if let Some(c) = e.as_const() {
            let v = super::rational_to_f64(c);
            return Ok((!c.is_zero()).then(|| Witness {
                point: Point::new(0.0, vec![0.0; n], vec![0.0; n]),
                value: v,
                scale: 1.0,
            }));
        }
        let summands = e.summands();
        for index in 0..cfg.samples as u64 {
            let refs: Vec<&Expr> = summands.iter().collect();
            let p = cfg.usable_point(&refs, n, index)?;
            let mut value = 0.0;
            let mut scale: f64 = 1.0;
            for s in &summands {
                let v = s.eval(&p).expect("checked by usable_point");
                value += v;
                scale = scale.max(v.abs());
            }
            if value.abs() > cfg.tolerance * scale {
                return Ok(Some(Witness { point: p, value, scale }));
            }
        }
        Ok(None)
    }
}

/// True when every expression passes [`Expr::is_zero`].
pub fn all_zero<'a, I>(exprs: I, n: usize, cfg: &ZeroTestConfig) -> Result<bool, ZeroTestError>
where
    I: IntoIterator<Item = &'a Expr>,
{
    for e in exprs {
        if !e.is_zero(n, cfg)? {
            return Ok(false);
        }
    }
    Ok(true)
}

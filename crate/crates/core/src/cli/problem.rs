use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{SampleBox, ZeroTestConfig};
use crate::forms::{FormError, Lagrangian, SemiBasicOneForm};
use crate::geometry::{GeometryError, Semispray};

/// Default RK4 step for trajectories.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Default number of RK4 steps.
pub const DEFAULT_STEPS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaSpec {
    pub theta0: String,
    pub theta: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSpec {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    #[serde(rename = "box")]
    pub sample_box: Option<[f64; 2]>,
    pub tolerance: Option<f64>,
    pub step: Option<f64>,
    pub steps: Option<usize>,
}

/// A problem as read from a JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub n: usize,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<ThetaSpec>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigSpec>,
}

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed problem file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("n must be at least 1")]
    ZeroDimension,
    #[error("problem file has no `{0}` field")]
    Missing(&'static str),
    #[error("G: {0}")]
    Semispray(#[from] GeometryError),
    #[error("theta: {0}")]
    Theta(#[from] FormError),
    #[error("L: {0}")]
    Lagrangian(crate::expr::ParseError),
    #[error("config: {0}")]
    Config(String),
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile, ProblemError> {
        let p: ProblemFile = serde_json::from_str(text)?;
        if p.n == 0 {
            return Err(ProblemError::ZeroDimension);
        }
        p.validate()?;
        Ok(p)
    }

    pub fn read(path: &std::path::Path) -> Result<ProblemFile, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
            path: path.display().to_string(),
            source,
        })?;
        ProblemFile::from_json(&text)
    }

    /// Parses every expression once so errors surface before any command runs.
    fn validate(&self) -> Result<(), ProblemError> {
        if self.g.is_some() {
            self.semispray()?;
        }
        if self.theta.is_some() {
            self.theta_form()?;
        }
        if self.l.is_some() {
            self.lagrangian()?;
        }
        if let Some([lo, hi]) = self.config.as_ref().and_then(|c| c.sample_box) {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(ProblemError::Config(format!("box [{lo}, {hi}] is empty")));
            }
        }
        Ok(())
    }

    pub fn semispray(&self) -> Result<Semispray, ProblemError> {
        let g = self.g.as_ref().ok_or(ProblemError::Missing("G"))?;
        Ok(Semispray::parse(self.n, g)?)
    }

    pub fn theta_form(&self) -> Result<SemiBasicOneForm, ProblemError> {
        let t = self.theta.as_ref().ok_or(ProblemError::Missing("theta"))?;
        Ok(SemiBasicOneForm::parse(self.n, &t.theta0, &t.theta)?)
    }

    pub fn lagrangian(&self) -> Result<Lagrangian, ProblemError> {
        let l = self.l.as_ref().ok_or(ProblemError::Missing("L"))?;
        Lagrangian::parse(l, self.n).map_err(ProblemError::Lagrangian)
    }
}

/// Settings after merging defaults, the file's `config` and command-line flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub seed: u64,
    pub samples: usize,
    #[serde(rename = "box")]
    pub sample_box: [f64; 2],
    pub tolerance: f64,
    pub step: f64,
    pub steps: usize,
}

impl Default for ResolvedConfig {
    fn default() -> Self {
        let z = ZeroTestConfig::default();
        ResolvedConfig {
            seed: z.seed,
            samples: z.samples,
            sample_box: [z.sample_box.lo, z.sample_box.hi],
            tolerance: z.tolerance,
            step: DEFAULT_STEP,
            steps: DEFAULT_STEPS,
        }
    }
}

impl ResolvedConfig {
    pub fn merge(&mut self, c: &ConfigSpec) {
        if let Some(v) = c.seed {
            self.seed = v;
        }
        if let Some(v) = c.samples {
            self.samples = v;
        }
        if let Some(v) = c.sample_box {
            self.sample_box = v;
        }
        if let Some(v) = c.tolerance {
            self.tolerance = v;
        }
        if let Some(v) = c.step {
            self.step = v;
        }
        if let Some(v) = c.steps {
            self.steps = v;
        }
    }

    pub fn zero_test(&self) -> ZeroTestConfig {
        ZeroTestConfig {
            samples: self.samples,
            sample_box: SampleBox {
                lo: self.sample_box[0],
                hi: self.sample_box[1],
            },
            tolerance: self.tolerance,
            seed: self.seed,
            ..ZeroTestConfig::default()
        }
    }
}

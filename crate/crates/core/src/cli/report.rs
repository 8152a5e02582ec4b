use serde::{Deserialize, Serialize};

use crate::expr::Expr;
use crate::geometry::{ClassificationReport, Semispray, StructureReport};
use crate::helmholtz::{HelmholtzReport, Verdict};
use crate::spencer::SymbolDims;

use super::problem::ResolvedConfig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
    Inconclusive,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Error => 1,
            Status::Failed => 2,
            Status::Inconclusive => 3,
        }
    }
}

fn strings(v: &[Expr]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn matrix(m: &[Vec<Expr>]) -> Vec<Vec<String>> {
    m.iter().map(|r| strings(r)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub is_flat: bool,
    pub is_isotropic: bool,
    pub lambda: Option<String>,
    pub alpha: Option<Vec<String>>,
    pub alpha_verified: Option<bool>,
    pub notes: Vec<String>,
}

impl From<&ClassificationReport> for Classification {
    fn from(c: &ClassificationReport) -> Self {
        Classification {
            is_flat: c.is_flat,
            is_isotropic: c.is_isotropic,
            lambda: c.lambda.as_ref().map(ToString::to_string),
            alpha: c.alpha.as_deref().map(strings),
            alpha_verified: c.alpha_verified,
            notes: c.notes.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Identity {
    pub name: String,
    pub method: String,
    pub passed: bool,
    pub max_defect: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    #[serde(rename = "G")]
    pub g: Vec<String>,
    /// `Nⁱ_j`.
    pub connection: Vec<Vec<String>>,
    /// `Nⁱ₀`.
    pub connection_time: Vec<String>,
    /// `Rⁱ_j`.
    pub jacobi: Vec<Vec<String>>,
    /// `Rⁱ_jk`.
    pub curvature: Vec<Vec<Vec<String>>>,
    pub structure: Vec<Identity>,
    pub classification: Classification,
}

impl Analysis {
    pub fn new(s: &Semispray, structure: &StructureReport, class: &ClassificationReport) -> Analysis {
        let conn = s.connection();
        Analysis {
            g: strings(s.coefficients()),
            connection: matrix(&conn.spatial),
            connection_time: strings(&conn.time),
            jacobi: matrix(s.jacobi()),
            curvature: s.curvature().r3.iter().map(|m| matrix(m)).collect(),
            structure: structure
                .checks
                .iter()
                .map(|c| Identity {
                    name: c.name.clone(),
                    method: c.method.clone(),
                    passed: c.passed,
                    max_defect: c.max_defect.is_finite().then_some(c.max_defect),
                })
                .collect(),
            classification: class.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Helmholtz {
    pub dj_zero: Option<bool>,
    pub dh_zero: Option<bool>,
    pub dr_zero: Option<bool>,
    pub is_dtheta_zero: Option<bool>,
    pub rank_dtheta: Option<usize>,
    pub regular: Option<bool>,
    pub verdict: Verdict,
    pub lagrangian: Option<String>,
    pub classification: Option<Classification>,
    pub details: Vec<String>,
}

impl From<&HelmholtzReport> for Helmholtz {
    fn from(r: &HelmholtzReport) -> Self {
        Helmholtz {
            dj_zero: r.dj_zero,
            dh_zero: r.dh_zero,
            dr_zero: r.dr_zero,
            is_dtheta_zero: r.is_dtheta_zero,
            rank_dtheta: r.rank_dtheta,
            regular: r.regular,
            verdict: r.verdict,
            lagrangian: r.lagrangian.clone(),
            classification: r.classification.as_ref().map(Into::into),
            details: r.details.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerLagrange {
    pub trajectories: usize,
    pub residuals: Vec<Option<f64>>,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    pub start: Vec<f64>,
    pub step: f64,
    pub steps: usize,
    pub samples: usize,
    pub truncated: Option<String>,
    pub end: Vec<f64>,
    pub consistency_residual: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
}

/// Machine-readable result of one command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub exit_code: i32,
    pub config: ResolvedConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis: Option<Analysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub helmholtz: Option<Helmholtz>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_lagrange: Option<EulerLagrange>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<Vec<SymbolDims>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geodesic: Option<Geodesic>,
    /// Wall-clock timings; only present when requested, so reports stay reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl Report {
    pub fn new(command: &str, config: ResolvedConfig) -> Report {
        Report {
            command: command.to_string(),
            status: Status::Ok,
            exit_code: 0,
            config,
            n: None,
            error: None,
            analysis: None,
            helmholtz: None,
            euler_lagrange: None,
            symbol: None,
            geodesic: None,
            timings: None,
        }
    }

    pub fn set_status(&mut self, status: Status) {
        self.status = status;
        self.exit_code = status.exit_code();
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

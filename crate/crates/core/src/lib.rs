//! Certification of preparation noncontextuality for four preparations and
//! two binary measurements.
//!
//! The pipeline runs [`scenario`] validation, labels the preparation
//! quadrilateral ([`geometry`]), and evaluates the eight determinant
//! inequalities ([`inequalities`]). [`oracle`] decides the same question by LP
//! feasibility over local deterministic strategies and serves as an
//! independent cross-check. [`quantum`] generates qubit test statistics and
//! [`tomography`] reduces three-measurement data to the two-measurement case.

pub mod geometry;
pub mod inequalities;
pub mod lp;
pub mod oracle;
pub mod pipeline;
pub mod quantum;
pub mod scenario;
pub mod tomography;

use thiserror::Error;

pub use pipeline::{
    certify, cross_check, reduce_and_certify, Certification, CrossCheck, Evaluation, Reduction,
};

/// Numerical tolerances used throughout the pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Band outside `[0, 1]` within which probabilities are clamped.
    pub eps_prob: f64,
    /// Absolute threshold on triangle-area determinants.
    pub eps_geom: f64,
    /// Raw determinant above which an inequality counts as violated.
    pub eps_verdict: f64,
    /// LP feasibility tolerance.
    pub delta_lp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_prob: scenario::DEFAULT_EPS_PROB,
            eps_geom: geometry::DEFAULT_EPS_GEOM,
            eps_verdict: inequalities::DEFAULT_EPS_VERDICT,
            delta_lp: oracle::DEFAULT_DELTA_LP,
        }
    }
}

impl Tolerances {
    pub fn is_valid(&self) -> bool {
        [
            self.eps_prob,
            self.eps_geom,
            self.eps_verdict,
            self.delta_lp,
        ]
        .iter()
        .all(|t| t.is_finite() && *t > 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Scenario(#[from] scenario::ScenarioError),
    #[error(transparent)]
    Geometry(#[from] geometry::GeometryError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Tomography(#[from] tomography::TomographyError),
    #[error("tolerances must be positive and finite")]
    InvalidTolerance,
}

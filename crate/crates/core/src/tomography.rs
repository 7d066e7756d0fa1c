//! Reduction of a three-measurement scenario to the two-measurement one.
//!
//! When a third measurement `M'` distinguishes the preparations slightly, an
//! auxiliary preparation lying strictly beyond all of them in the `M'`
//! expectation lets us mix each original toward it until every point reaches a
//! common `M'` value. The mixed points exist by convexity and share identical
//! `M'` statistics, so `M_0` and `M_1` alone can be certified on them.

use serde::Serialize;
use thiserror::Error;

use crate::scenario::{expectation, PrepVector, ScenarioStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TomographyError {
    #[error("auxiliary preparation (w = {aux}) does not lie strictly beyond all originals (w in [{min}, {max}])")]
    NotSeparated { aux: f64, min: f64, max: f64 },
    #[error("auxiliary preparation has the same third expectation as original {index} (w = {w})")]
    DegenerateDirection { index: usize, w: f64 },
}

/// Expectations of `M_0`, `M_1` and `M'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prep3 {
    pub x: f64,
    pub y: f64,
    pub w: f64,
}

impl Prep3 {
    pub const fn new(x: f64, y: f64, w: f64) -> Self {
        Self { x, y, w }
    }

    pub fn planar(self) -> PrepVector {
        PrepVector::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionResult {
    /// Common `M'` expectation of the effective preparations.
    pub plane_w: f64,
    /// Weight on the auxiliary preparation for each original.
    pub mix_params: [f64; 4],
    pub effective: [PrepVector; 4],
}

/// Mixes each original toward `aux` until it reaches the plane through the
/// original nearest to `aux`.
pub fn reduce(originals: &[Prep3; 4], aux: Prep3) -> Result<ReductionResult, TomographyError> {
    let min = originals.iter().map(|p| p.w).fold(f64::INFINITY, f64::min);
    let max = originals
        .iter()
        .map(|p| p.w)
        .fold(f64::NEG_INFINITY, f64::max);
    let plane_w = if aux.w > max {
        max
    } else if aux.w < min {
        min
    } else {
        if let Some(index) = originals.iter().position(|p| p.w == aux.w) {
            if aux.w == max || aux.w == min {
                return Err(TomographyError::DegenerateDirection { index, w: aux.w });
            }
        }
        return Err(TomographyError::NotSeparated {
            aux: aux.w,
            min,
            max,
        });
    };

    let mix_params = originals.map(|p| (plane_w - p.w) / (aux.w - p.w));
    let effective =
        std::array::from_fn(|i| originals[i].planar().lerp(aux.planar(), mix_params[i]));
    Ok(ReductionResult {
        plane_w,
        mix_params,
        effective,
    })
}

/// Splits validated tomography-mode statistics into originals and auxiliary.
pub fn split_stats(stats: &ScenarioStats) -> ([Prep3; 4], Prep3, Vec<String>) {
    let to3 = |p: &crate::scenario::Preparation| {
        Prep3::new(
            expectation(p.prob0[0]),
            expectation(p.prob0[1]),
            expectation(p.prob0[2]),
        )
    };
    let originals: Vec<_> = stats.originals().collect();
    let names = originals.iter().map(|p| p.name.clone()).collect();
    let preps = std::array::from_fn(|i| to3(originals[i]));
    let aux = to3(stats
        .auxiliary_preparation()
        .expect("validated tomography stats"));
    (preps, aux, names)
}

impl ReductionResult {
    /// Two-measurement statistics of the effective preparations.
    pub fn effective_stats(&self, names: &[String], measurements: &[String]) -> ScenarioStats {
        let mut stats = ScenarioStats::from_vectors(names, &self.effective);
        stats.measurements = measurements.iter().take(2).cloned().collect();
        stats
    }
}

//! End-to-end certification: raw statistics in, verdict out.

use crate::geometry::{
    canonicalize, pivotal_solve, CanonicalGeometry, GeometryVerdict, PivotalDecomposition,
};
use crate::inequalities::{bell_convert, evaluate_all, BellTable, InequalityReport, Verdict};
use crate::oracle::{noncontextual_model_exists, NoncontextualCheck};
use crate::scenario::{to_vectors, validate, Mode, PrepVector, ScenarioStats};
use crate::tomography::{reduce, split_stats, ReductionResult};
use crate::{Error, Tolerances};

/// Closed-form evaluation of a nondegenerate scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub geometry: CanonicalGeometry,
    pub pivotal: PivotalDecomposition,
    pub report: InequalityReport,
    pub bell: BellTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    /// Validated (clamped) statistics.
    pub stats: ScenarioStats,
    pub geometry: GeometryVerdict,
    /// `None` on the degenerate path.
    pub evaluation: Option<Evaluation>,
    pub verdict: Verdict,
}

/// Validates `raw` and evaluates the determinant inequalities.
///
/// Degenerate (simplex) geometries short-circuit to
/// [`Verdict::DegenerateNoncontextual`] without evaluating anything.
pub fn certify(raw: &ScenarioStats, tol: &Tolerances) -> Result<Certification, Error> {
    if !tol.is_valid() {
        return Err(Error::InvalidTolerance);
    }
    let stats = validate(raw, Mode::Certification, tol.eps_prob)?;
    let vs: [PrepVector; 4] = to_vectors(&stats).try_into().expect("validated arity");
    let geometry = canonicalize(&vs, tol.eps_geom);
    let Some(geo) = geometry.canonical().cloned() else {
        return Ok(Certification {
            stats,
            geometry,
            evaluation: None,
            verdict: Verdict::DegenerateNoncontextual,
        });
    };
    let pivotal = pivotal_solve(&geo, tol.eps_geom)?;
    let report = evaluate_all(&geo, tol.eps_verdict);
    let bell = bell_convert(&stats, &geo, &pivotal);
    let verdict = report.verdict;
    Ok(Certification {
        stats,
        geometry,
        evaluation: Some(Evaluation {
            geometry: geo,
            pivotal,
            report,
            bell,
        }),
        verdict,
    })
}

/// Comparison of the determinant verdict with the LP oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub oracle: NoncontextualCheck,
    pub agree: bool,
    /// The largest determinant lies within `10 * max(delta_lp, eps_verdict) * D`
    /// of zero, where the two methods may legitimately disagree.
    pub in_boundary_band: bool,
}

impl CrossCheck {
    /// Disagreement that cannot be explained by the boundary band.
    pub fn conflict(&self) -> bool {
        !self.agree && !self.in_boundary_band
    }
}

/// Runs the LP oracle on the certified statistics.
pub fn cross_check(cert: &Certification, tol: &Tolerances) -> Result<CrossCheck, Error> {
    let oracle = noncontextual_model_exists(&cert.stats, tol)?;
    let agree = oracle.verdict.feasible == cert.verdict.is_noncontextual();
    let in_boundary_band = cert.evaluation.as_ref().is_some_and(|e| {
        e.report.max_det().abs() <= 10.0 * tol.delta_lp.max(tol.eps_verdict) * e.report.d
    });
    if !agree {
        log::warn!(
            "oracle (feasible = {}) disagrees with determinant verdict {}{}",
            oracle.verdict.feasible,
            cert.verdict,
            if in_boundary_band {
                " inside the boundary band"
            } else {
                ""
            }
        );
    }
    Ok(CrossCheck {
        oracle,
        agree,
        in_boundary_band,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub result: ReductionResult,
    pub names: Vec<String>,
    pub certification: Certification,
}

/// Reduces three-measurement statistics and certifies the effective
/// preparations.
pub fn reduce_and_certify(raw: &ScenarioStats, tol: &Tolerances) -> Result<Reduction, Error> {
    if !tol.is_valid() {
        return Err(Error::InvalidTolerance);
    }
    let stats = validate(raw, Mode::Tomography, tol.eps_prob)?;
    let (originals, aux, names) = split_stats(&stats);
    let result = reduce(&originals, aux)?;
    let effective = result.effective_stats(&names, &stats.measurements);
    let certification = certify(&effective, tol)?;
    Ok(Reduction {
        result,
        names,
        certification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{paper_example, tilted_example};
    use crate::scenario::{Preparation, ScenarioError};

    #[test]
    fn certifies_qubit_example() {
        let tol = Tolerances::default();
        let cert = certify(&paper_example(1.0), &tol).unwrap();
        assert_eq!(cert.verdict, Verdict::Contextual);
        let cc = cross_check(&cert, &tol).unwrap();
        assert!(cc.agree && !cc.conflict());
    }

    #[test]
    fn maximally_mixed_is_degenerate() {
        let cert = certify(&paper_example(0.0), &Tolerances::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::DegenerateNoncontextual);
        assert!(cert.evaluation.is_none());
        let cc = cross_check(&cert, &Tolerances::default()).unwrap();
        assert!(cc.agree && cc.oracle.degenerate);
    }

    #[test]
    fn rejects_bad_tolerance_and_arity() {
        let tol = Tolerances {
            delta_lp: 0.0,
            ..Tolerances::default()
        };
        assert_eq!(
            certify(&paper_example(1.0), &tol),
            Err(Error::InvalidTolerance)
        );

        let mut stats = paper_example(1.0);
        stats
            .preparations
            .push(Preparation::new("P4", vec![0.5, 0.5]));
        assert!(matches!(
            certify(&stats, &Tolerances::default()),
            Err(Error::Scenario(ScenarioError::WrongArity { .. }))
        ));
    }

    #[test]
    fn reduction_keeps_small_tilt_violation() {
        let red = reduce_and_certify(
            &tilted_example(1.0, [0.05, 0.0, 0.03, 0.01]),
            &Tolerances::default(),
        )
        .unwrap();
        assert_eq!(red.certification.verdict, Verdict::Contextual);
        assert_eq!(red.names, ["P0", "P1", "P2", "P3"]);
    }
}

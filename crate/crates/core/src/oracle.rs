//! Local-model feasibility for CHSH tables, used as an independent check on
//! the closed-form inequalities.
//!
//! A CHSH table has a local hidden-variable model iff it is a convex mixture
//! of the 16 deterministic strategies `(alpha, beta)`, where `alpha` maps
//! Alice's setting to her outcome and `beta` does the same for Bob. That is an
//! LP feasibility problem: 16 weights, 16 probability equalities and one
//! normalisation row.
//!
//! For the prepare-and-measure scenario the table comes from
//! [`bell_convert`](crate::inequalities::bell_convert). A feasible witness is
//! then turned back into a preparation-noncontextual ontological model whose
//! ontic states are the 16 strategies.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    canonicalize, pivotal_solve, GeometryError, GeometryVerdict, PivotalDecomposition,
};
use crate::inequalities::{bell_convert, BellTable};
use crate::lp::{phase_one, LpError};
use crate::scenario::{to_vectors, PrepVector, ScenarioStats};
use crate::Tolerances;

/// Default feasibility tolerance for the LP witness.
pub const DEFAULT_DELTA_LP: f64 = 1e-7;

pub const MAX_PIVOTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("LP solver stalled after {pivots} pivots; best residual {residual:e}")]
    SolverStall { pivots: usize, residual: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("expected 4 preparations with 2 measurements, found {0} preparations")]
    Arity(usize),
}

impl From<LpError> for OracleError {
    fn from(e: LpError) -> Self {
        match e {
            LpError::SolverStall { pivots, residual } => {
                OracleError::SolverStall { pivots, residual }
            }
            LpError::Shape { .. } => unreachable!("oracle builds a well-shaped system"),
        }
    }
}

/// A deterministic local strategy: `alpha` and `beta` are bit masks where bit
/// `s` is the outcome produced for setting `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Strategy {
    pub alpha: u8,
    pub beta: u8,
}

impl Strategy {
    pub const COUNT: usize = 16;

    pub fn from_index(index: usize) -> Self {
        assert!(index < Self::COUNT);
        Self {
            alpha: (index >> 2) as u8,
            beta: (index & 3) as u8,
        }
    }

    pub fn index(self) -> usize {
        usize::from(self.alpha) * 4 + usize::from(self.beta)
    }

    pub fn all() -> impl Iterator<Item = Strategy> {
        (0..Self::COUNT).map(Self::from_index)
    }

    pub fn alice(self, x: usize) -> usize {
        usize::from(self.alpha >> x & 1)
    }

    pub fn bob(self, y: usize) -> usize {
        usize::from(self.beta >> y & 1)
    }
}

/// Mixture weights over the 16 deterministic strategies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeterministicStrategyWeights {
    pub w: [f64; 16],
}

impl DeterministicStrategyWeights {
    /// Table generated by this mixture.
    pub fn table(&self) -> BellTable {
        BellTable::from_fn(|a, b, x, y| {
            Strategy::all()
                .filter(|s| s.alice(x) == a && s.bob(y) == b)
                .map(|s| self.w[s.index()])
                .sum()
        })
    }

    /// Largest entry-wise deviation between the generated table and `bt`.
    pub fn reconstruction_error(&self, bt: &BellTable) -> f64 {
        let t = self.table();
        t.probs
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .zip(bt.probs.iter().flatten().flatten().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleVerdict {
    pub feasible: bool,
    pub witness: Option<DeterministicStrategyWeights>,
    /// Largest constraint violation of the best point found.
    pub residual: f64,
}

fn constraint_system(bt: &BellTable) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut a = Vec::with_capacity(17);
    let mut b = Vec::with_capacity(17);
    for x in 0..2 {
        for y in 0..2 {
            for oa in 0..2 {
                for ob in 0..2 {
                    a.push(
                        Strategy::all()
                            .map(|s| {
                                if s.alice(x) == oa && s.bob(y) == ob {
                                    1.0
                                } else {
                                    0.0
                                }
                            })
                            .collect(),
                    );
                    b.push(bt.get(oa, ob, x, y));
                }
            }
        }
    }
    a.push(vec![1.0; Strategy::COUNT]);
    b.push(1.0);
    (a, b)
}

/// Decides whether `bt` admits a local model, within `delta_lp`.
pub fn local_model_feasible(bt: &BellTable, delta_lp: f64) -> Result<OracleVerdict, OracleError> {
    let (a, b) = constraint_system(bt);
    let sol = phase_one(&a, &b, MAX_PIVOTS)?;
    log::debug!(
        "phase 1: {} pivots, infeasibility {:e}, residual {:e}",
        sol.pivots,
        sol.infeasibility,
        sol.residual
    );
    let feasible = sol.residual <= delta_lp;
    let witness = feasible.then(|| DeterministicStrategyWeights {
        w: sol.x.try_into().expect("16 strategy weights"),
    });
    Ok(OracleVerdict {
        feasible,
        witness,
        residual: sol.residual,
    })
}

/// Preparation-noncontextual model over the 16 strategies, in canonical
/// labels `P_0..P_3`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OntologicalModel {
    pub pivotal: PivotalDecomposition,
    /// `mu[i][lambda]`: distribution of ontic states for preparation `P_i`.
    pub mu: [[f64; 16]; 4],
    /// Input index of each canonical label.
    pub order: [usize; 4],
}

impl OntologicalModel {
    /// Inverts the bipartite conversion for a local witness.
    pub fn from_witness(
        witness: &DeterministicStrategyWeights,
        pivotal: PivotalDecomposition,
        order: [usize; 4],
    ) -> Self {
        let (p, q) = (pivotal.p, pivotal.q);
        // (x, a, weight) for each canonical label
        let branch = [(0, 0, p), (1, 0, q), (1, 1, 1.0 - q), (0, 1, 1.0 - p)];
        let mu = branch.map(|(x, a, weight)| {
            std::array::from_fn(|l| {
                let s = Strategy::from_index(l);
                if s.alice(x) == a {
                    witness.w[l] / weight
                } else {
                    0.0
                }
            })
        });
        Self { pivotal, mu, order }
    }

    /// `P(k | lambda, M_j)`; the response function is Bob's strategy.
    pub fn response(lambda: usize, k: usize, j: usize) -> f64 {
        if Strategy::from_index(lambda).bob(j) == k {
            1.0
        } else {
            0.0
        }
    }

    /// Model prediction for `P(k | P_label, M_j)`.
    pub fn predict(&self, label: usize, k: usize, j: usize) -> f64 {
        (0..Strategy::COUNT)
            .map(|l| self.mu[label][l] * Self::response(l, k, j))
            .sum()
    }

    /// Largest violation of `p mu_0 + (1-p) mu_3 = q mu_1 + (1-q) mu_2`.
    pub fn pivotal_gap(&self) -> f64 {
        let (p, q) = (self.pivotal.p, self.pivotal.q);
        (0..Strategy::COUNT)
            .map(|l| {
                let lhs = p * self.mu[0][l] + (1.0 - p) * self.mu[3][l];
                let rhs = q * self.mu[1][l] + (1.0 - q) * self.mu[2][l];
                (lhs - rhs).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of a predicted outcome-0 probability from `stats`.
    pub fn reproduction_error(&self, stats: &ScenarioStats) -> f64 {
        let mut err = 0.0f64;
        for (label, &input) in self.order.iter().enumerate() {
            for j in 0..2 {
                err =
                    err.max((self.predict(label, 0, j) - stats.preparations[input].prob0[j]).abs());
            }
        }
        err
    }

    /// Largest deviation of any `mu_i` from a normalised, nonnegative
    /// distribution.
    pub fn normalization_error(&self) -> f64 {
        self.mu
            .iter()
            .map(|m| {
                let neg = m.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
                neg.max((m.iter().sum::<f64>() - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoncontextualCheck {
    pub verdict: OracleVerdict,
    /// Set when the preparations span a simplex and the LP was skipped.
    pub degenerate: bool,
    pub model: Option<OntologicalModel>,
}

/// Decides existence of a preparation-noncontextual model from raw
/// statistics, without using the determinant inequalities.
pub fn noncontextual_model_exists(
    stats: &ScenarioStats,
    tol: &Tolerances,
) -> Result<NoncontextualCheck, OracleError> {
    let vs: [PrepVector; 4] = to_vectors(stats)
        .try_into()
        .map_err(|v: Vec<PrepVector>| OracleError::Arity(v.len()))?;
    let geo = match canonicalize(&vs, tol.eps_geom) {
        GeometryVerdict::DegenerateSimplex(_) => {
            return Ok(NoncontextualCheck {
                verdict: OracleVerdict {
                    feasible: true,
                    witness: None,
                    residual: 0.0,
                },
                degenerate: true,
                model: None,
            })
        }
        GeometryVerdict::Canonical(geo) => geo,
    };
    let piv = pivotal_solve(&geo, tol.eps_geom)?;
    let bt = bell_convert(stats, &geo, &piv);
    let verdict = local_model_feasible(&bt, tol.delta_lp)?;
    let model = verdict
        .witness
        .as_ref()
        .map(|w| OntologicalModel::from_witness(w, piv, geo.order()));
    Ok(NoncontextualCheck {
        verdict,
        degenerate: false,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::{chsh_value, SignColumn};
    use std::f64::consts::FRAC_1_SQRT_2 as V;

    fn names() -> [&'static str; 4] {
        ["P0", "P1", "P2", "P3"]
    }

    #[test]
    fn strategy_indexing() {
        for (i, s) in Strategy::all().enumerate() {
            assert_eq!(s.index(), i);
        }
        let s = Strategy {
            alpha: 0b10,
            beta: 0b01,
        };
        assert_eq!((s.alice(0), s.alice(1), s.bob(0), s.bob(1)), (0, 1, 1, 0));
    }

    #[test]
    fn uniform_table_is_local() {
        let v = local_model_feasible(&BellTable::uniform(), DEFAULT_DELTA_LP).unwrap();
        assert!(v.feasible);
        let w = v.witness.unwrap();
        assert!(w.reconstruction_error(&BellTable::uniform()) <= DEFAULT_DELTA_LP);
        // The uniform product mixture is one witness among many.
        let uniform = DeterministicStrategyWeights {
            w: [1.0 / 16.0; 16],
        };
        assert!(uniform.reconstruction_error(&BellTable::uniform()) < 1e-15);
    }

    #[test]
    fn deterministic_table_is_local() {
        let bt = BellTable::from_fn(|a, b, _, _| if a == 0 && b == 0 { 1.0 } else { 0.0 });
        let v = local_model_feasible(&bt, DEFAULT_DELTA_LP).unwrap();
        assert!(v.feasible);
        let w = v.witness.unwrap();
        assert!((w.w[0] - 1.0).abs() < 1e-12);
        assert!(w.w[1..].iter().all(|&x| x.abs() < 1e-12));
    }

    #[test]
    fn tsirelson_table_is_not_local() {
        let stats = ScenarioStats::from_vectors(
            &names(),
            &[
                PrepVector::new(V, V),
                PrepVector::new(V, -V),
                PrepVector::new(-V, V),
                PrepVector::new(-V, -V),
            ],
        );
        let check = noncontextual_model_exists(&stats, &Tolerances::default()).unwrap();
        assert!(!check.verdict.feasible);
        assert!(check.verdict.witness.is_none());
        assert!(check.verdict.residual > 1e-3);
    }

    #[test]
    fn pr_box_is_not_local() {
        // a XOR b = x AND y, uniformly: CHSH = 4.
        let pr = BellTable::from_fn(|a, b, x, y| if (a ^ b) == (x & y) { 0.5 } else { 0.0 });
        assert_eq!(chsh_value(&pr, SignColumn::ALL[0]), 4.0);
        assert!(
            !local_model_feasible(&pr, DEFAULT_DELTA_LP)
                .unwrap()
                .feasible
        );
    }

    #[test]
    fn small_square_has_explicit_model() {
        let s = 0.3;
        let stats = ScenarioStats::from_vectors(
            &names(),
            &[
                PrepVector::new(s, s),
                PrepVector::new(s, -s),
                PrepVector::new(-s, s),
                PrepVector::new(-s, -s),
            ],
        );
        let check = noncontextual_model_exists(&stats, &Tolerances::default()).unwrap();
        assert!(check.verdict.feasible && !check.degenerate);
        let model = check.model.unwrap();
        assert!(model.reproduction_error(&stats) <= DEFAULT_DELTA_LP);
        assert!(model.pivotal_gap() <= DEFAULT_DELTA_LP);
        assert!(model.normalization_error() <= DEFAULT_DELTA_LP);
    }

    #[test]
    fn coincident_preparations_take_degenerate_path() {
        let a = PrepVector::new(0.2, -0.1);
        let stats = ScenarioStats::from_vectors(&names(), &[a, a, PrepVector::new(0.9, 0.9), a]);
        let check = noncontextual_model_exists(&stats, &Tolerances::default()).unwrap();
        assert!(check.degenerate && check.verdict.feasible);
    }
}

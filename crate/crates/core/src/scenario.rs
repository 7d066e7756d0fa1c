//! Operational statistics for a prepare-and-measure experiment.
//!
//! A scenario is a table of `P(k = 0 | preparation, measurement)` values. Only
//! the probability of outcome 0 is stored; the probability of outcome 1 is
//! always `1 - prob0`. Each preparation is summarised by its vector of
//! measurement expectations, `2 * prob0 - 1` per measurement.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default tolerance for probabilities slightly outside `[0, 1]`.
pub const DEFAULT_EPS_PROB: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("probability {value} for preparation `{preparation}`, measurement {measurement} is outside [0, 1]")]
    OutOfRangeProbability {
        preparation: String,
        measurement: usize,
        value: f64,
    },
    #[error("wrong arity for {mode} mode: {detail}")]
    WrongArity { mode: Mode, detail: String },
    #[error("invalid scenario document: {0}")]
    Parse(String),
}

/// Which pipeline a scenario is destined for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Four preparations, two binary measurements.
    Certification,
    /// Four preparations plus one auxiliary preparation, three binary
    /// measurements.
    Tomography,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Mode::Certification => f.write_str("certification"),
            Mode::Tomography => f.write_str("tomography"),
        }
    }
}

/// One preparation procedure and its outcome-0 probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preparation {
    pub name: String,
    /// `prob0[j] = P(k = 0 | this preparation, measurements[j])`.
    pub prob0: Vec<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub auxiliary: bool,
}

impl Preparation {
    pub fn new(name: impl Into<String>, prob0: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            prob0,
            auxiliary: false,
        }
    }

    pub fn auxiliary(name: impl Into<String>, prob0: Vec<f64>) -> Self {
        Self {
            auxiliary: true,
            ..Self::new(name, prob0)
        }
    }

    /// `P(k | this preparation, measurement j)`.
    pub fn prob(&self, k: usize, j: usize) -> f64 {
        if k == 0 {
            self.prob0[j]
        } else {
            1.0 - self.prob0[j]
        }
    }
}

/// Raw operational statistics: preparations × binary measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioStats {
    pub measurements: Vec<String>,
    pub preparations: Vec<Preparation>,
}

impl ScenarioStats {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization cannot fail")
    }

    /// Builds a two-measurement scenario from expectation vectors.
    pub fn from_vectors<S: AsRef<str>>(names: &[S], vectors: &[PrepVector]) -> Self {
        let preparations = names
            .iter()
            .zip(vectors)
            .map(|(n, v)| Preparation::new(n.as_ref(), vec![(1.0 + v.x) / 2.0, (1.0 + v.y) / 2.0]))
            .collect();
        Self {
            measurements: vec!["M0".into(), "M1".into()],
            preparations,
        }
    }

    /// Non-auxiliary preparations, in input order.
    pub fn originals(&self) -> impl Iterator<Item = &Preparation> {
        self.preparations.iter().filter(|p| !p.auxiliary)
    }

    pub fn auxiliary_preparation(&self) -> Option<&Preparation> {
        self.preparations.iter().find(|p| p.auxiliary)
    }
}

/// Checks arity for `mode` and clamps probabilities lying within `eps_prob`
/// of `[0, 1]`.
pub fn validate(
    raw: &ScenarioStats,
    mode: Mode,
    eps_prob: f64,
) -> Result<ScenarioStats, ScenarioError> {
    let n_meas = raw.measurements.len();
    let n_aux = raw.preparations.iter().filter(|p| p.auxiliary).count();
    let n_orig = raw.preparations.len() - n_aux;
    let arity = |detail: String| ScenarioError::WrongArity { mode, detail };
    match mode {
        Mode::Certification => {
            if n_meas != 2 {
                return Err(arity(format!("expected 2 measurements, found {n_meas}")));
            }
            if n_aux != 0 {
                return Err(arity(
                    "auxiliary preparations are only used by tomography mode".into(),
                ));
            }
            if n_orig != 4 {
                return Err(arity(format!("expected 4 preparations, found {n_orig}")));
            }
        }
        Mode::Tomography => {
            if n_meas != 3 {
                return Err(arity(format!("expected 3 measurements, found {n_meas}")));
            }
            if n_aux != 1 {
                return Err(arity(format!(
                    "expected exactly 1 auxiliary preparation, found {n_aux}"
                )));
            }
            if n_orig != 4 {
                return Err(arity(format!(
                    "expected 4 non-auxiliary preparations, found {n_orig}"
                )));
            }
        }
    }

    let mut out = raw.clone();
    for prep in &mut out.preparations {
        if prep.prob0.len() != n_meas {
            return Err(arity(format!(
                "preparation `{}` has {} probabilities for {} measurements",
                prep.name,
                prep.prob0.len(),
                n_meas
            )));
        }
        for (j, value) in prep.prob0.iter_mut().enumerate() {
            if !(*value >= -eps_prob && *value <= 1.0 + eps_prob) {
                return Err(ScenarioError::OutOfRangeProbability {
                    preparation: prep.name.clone(),
                    measurement: j,
                    value: *value,
                });
            }
            *value = value.clamp(0.0, 1.0);
        }
    }
    Ok(out)
}

/// Expectation vector of a preparation under the two measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrepVector {
    pub x: f64,
    pub y: f64,
}

impl PrepVector {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// `self + t * (other - self)`.
    pub fn lerp(self, other: Self, t: f64) -> Self {
        Self::new(
            self.x + t * (other.x - self.x),
            self.y + t * (other.y - self.y),
        )
    }

    /// `prob0` values that produce this vector.
    pub fn prob0(self) -> [f64; 2] {
        [(1.0 + self.x) / 2.0, (1.0 + self.y) / 2.0]
    }
}

impl std::ops::Sub for PrepVector {
    type Output = Self;

    fn sub(self, other: Self) -> Self {
        Self::new(self.x - other.x, self.y - other.y)
    }
}

/// Expectation of a binary measurement from its outcome-0 probability.
#[inline]
pub fn expectation(prob0: f64) -> f64 {
    2.0 * prob0 - 1.0
}

/// Maps each preparation to `(E[M_0], E[M_1])`. Extra measurements, if any,
/// are ignored.
pub fn to_vectors(stats: &ScenarioStats) -> Vec<PrepVector> {
    stats
        .preparations
        .iter()
        .map(|p| PrepVector::new(expectation(p.prob0[0]), expectation(p.prob0[1])))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn four(prob0: [[f64; 2]; 4]) -> ScenarioStats {
        ScenarioStats {
            measurements: vec!["M0".into(), "M1".into()],
            preparations: prob0
                .iter()
                .enumerate()
                .map(|(i, p)| Preparation::new(format!("P{i}"), p.to_vec()))
                .collect(),
        }
    }

    #[test]
    fn clamps_inside_tolerance_band() {
        let raw = four([[1.000_000_000_1, 0.5], [0.5; 2], [0.5; 2], [0.5; 2]]);
        let ok = validate(&raw, Mode::Certification, 1e-9).unwrap();
        assert_eq!(ok.preparations[0].prob0[0], 1.0);

        let raw = four([[0.5, -5e-10], [0.5; 2], [0.5; 2], [0.5; 2]]);
        let ok = validate(&raw, Mode::Certification, 1e-9).unwrap();
        assert_eq!(ok.preparations[0].prob0[1], 0.0);
    }

    #[test]
    fn rejects_out_of_range() {
        let raw = four([[0.5; 2], [0.5, 1.5], [0.5; 2], [0.5; 2]]);
        match validate(&raw, Mode::Certification, 1e-9) {
            Err(ScenarioError::OutOfRangeProbability {
                measurement, value, ..
            }) => {
                assert_eq!(measurement, 1);
                assert_eq!(value, 1.5);
            }
            other => panic!("unexpected {other:?}"),
        }
        let raw = four([[f64::NAN, 0.5], [0.5; 2], [0.5; 2], [0.5; 2]]);
        assert!(matches!(
            validate(&raw, Mode::Certification, 1e-9),
            Err(ScenarioError::OutOfRangeProbability { .. })
        ));
    }

    #[test]
    fn valid_input_is_unchanged() {
        let raw = four([[0.1, 0.9], [0.3, 0.4], [1.0, 0.0], [0.5, 0.5]]);
        assert_eq!(validate(&raw, Mode::Certification, 1e-9).unwrap(), raw);
    }

    #[test]
    fn arity_checks() {
        let mut raw = four([[0.5; 2]; 4]);
        raw.preparations.pop();
        assert!(matches!(
            validate(&raw, Mode::Certification, 1e-9),
            Err(ScenarioError::WrongArity { .. })
        ));

        let raw = four([[0.5; 2]; 4]);
        assert!(matches!(
            validate(&raw, Mode::Tomography, 1e-9),
            Err(ScenarioError::WrongArity { .. })
        ));

        let mut raw = four([[0.5; 2]; 4]);
        raw.preparations[2].prob0.push(0.5);
        assert!(matches!(
            validate(&raw, Mode::Certification, 1e-9),
            Err(ScenarioError::WrongArity { .. })
        ));

        let mut raw = four([[0.5; 2]; 4]);
        raw.measurements.push("M2".into());
        for p in &mut raw.preparations {
            p.prob0.push(0.5);
        }
        raw.preparations
            .push(Preparation::auxiliary("A", vec![0.5, 0.5, 1.0]));
        assert!(validate(&raw, Mode::Tomography, 1e-9).is_ok());
    }

    #[test]
    fn vectors_from_probabilities() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let h = (1.0 + r) / 2.0;
        let v = to_vectors(&four([[h, h], [0.5, 0.5], [1.0, 0.0], [0.0, 1.0]]));
        assert!((v[0].x - r).abs() < 1e-12);
        assert!((v[0].y - r).abs() < 1e-12);
        assert_eq!(v[1], PrepVector::new(0.0, 0.0));
        assert_eq!(v[2], PrepVector::new(1.0, -1.0));
        assert_eq!(v[3], PrepVector::new(-1.0, 1.0));
    }

    #[test]
    fn parses_documented_json() {
        let text = r#"{"measurements": ["M0","M1"], "preparations": [
            {"name": "P0", "prob0": [0.853553, 0.853553]},
            {"name": "P1", "prob0": [0.853553, 0.146447]},
            {"name": "P2", "prob0": [0.146447, 0.853553]},
            {"name": "P3", "prob0": [0.146447, 0.146447]}]}"#;
        let stats = ScenarioStats::from_json(text).unwrap();
        assert_eq!(stats.preparations.len(), 4);
        assert!(!stats.preparations[3].auxiliary);
        assert!(matches!(
            ScenarioStats::from_json("{"),
            Err(ScenarioError::Parse(_))
        ));
    }

    proptest! {
        #[test]
        fn inverse_map_round_trips(a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let stats = four([[a, b], [b, a], [0.5, a], [b, 0.5]]);
            for (prep, v) in stats.preparations.iter().zip(to_vectors(&stats)) {
                let back = v.prob0();
                prop_assert!((back[0] - prep.prob0[0]).abs() <= 1e-12);
                prop_assert!((back[1] - prep.prob0[1]).abs() <= 1e-12);
            }
        }

        #[test]
        fn vectors_are_affine_in_mixing(
            a in prop::array::uniform2(0.0f64..=1.0),
            b in prop::array::uniform2(0.0f64..=1.0),
            w in 0.0f64..=1.0,
        ) {
            let mixed = [w * a[0] + (1.0 - w) * b[0], w * a[1] + (1.0 - w) * b[1]];
            let v = to_vectors(&four([a, b, mixed, [0.5, 0.5]]));
            let expect = v[1].lerp(v[0], w);
            prop_assert!((v[2].x - expect.x).abs() <= 1e-12);
            prop_assert!((v[2].y - expect.y).abs() <= 1e-12);
        }
    }
}

//! Qubit statistics in Bloch-vector form.
//!
//! A state with Bloch vector `r` measured along unit axis `m` gives outcome 0
//! (the +1 eigenvalue) with probability `(1 + r·m) / 2`. Measurement `M_0`
//! is `X`, `M_1` is `Z` and the optional third measurement is `Y`.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::geometry::{canonicalize, DEFAULT_EPS_GEOM};
use crate::inequalities::{evaluate_all, DEFAULT_EPS_VERDICT};
use crate::scenario::{to_vectors, PrepVector, Preparation, ScenarioStats};

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    r: Vec3,
}

impl BlochState {
    /// Returns `None` unless `|r| <= 1`.
    pub fn new(r: Vec3) -> Option<Self> {
        (norm(r) <= 1.0 + 1e-12).then_some(Self { r })
    }

    pub fn r(&self) -> Vec3 {
        self.r
    }

    /// Depolarised copy `r -> eta r`.
    pub fn depolarize(self, eta: f64) -> Self {
        Self {
            r: self.r.map(|c| eta * c),
        }
    }

    /// Convex mixture `w self + (1 - w) other`.
    pub fn mix(self, other: Self, w: f64) -> Self {
        Self {
            r: std::array::from_fn(|i| w * self.r[i] + (1.0 - w) * other.r[i]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochMeasurement {
    m: Vec3,
}

impl BlochMeasurement {
    pub const X: Self = Self { m: [1.0, 0.0, 0.0] };
    pub const Y: Self = Self { m: [0.0, 1.0, 0.0] };
    pub const Z: Self = Self { m: [0.0, 0.0, 1.0] };

    /// Returns `None` unless `m` is a unit vector.
    pub fn new(m: Vec3) -> Option<Self> {
        ((norm(m) - 1.0).abs() <= 1e-12).then_some(Self { m })
    }

    pub fn axis(&self) -> Vec3 {
        self.m
    }
}

/// Born rule for the outcome aligned with the measurement axis.
pub fn born_prob0(s: BlochState, m: BlochMeasurement) -> f64 {
    (1.0 + dot(s.r, m.m)) / 2.0
}

fn prep(name: &str, state: BlochState, meas: &[BlochMeasurement]) -> Preparation {
    Preparation::new(name, meas.iter().map(|&m| born_prob0(state, m)).collect())
}

/// In-plane directions of the four canonical example states: `P_0/P_3` are the
/// `±1` eigenstates of `(X+Z)/√2` and `P_1/P_2` those of `(X-Z)/√2`.
fn example_directions() -> [(f64, f64); 4] {
    let v = FRAC_1_SQRT_2;
    [(v, v), (v, -v), (-v, v), (-v, -v)]
}

/// Four depolarised qubit preparations measured in `X` and `Z`.
///
/// At `eta = 1` the expectation vectors are `(±1/√2, ±1/√2)`; in general they
/// are scaled by `eta`.
pub fn paper_example(eta: f64) -> ScenarioStats {
    assert!(
        (0.0..=1.0).contains(&eta),
        "visibility must lie in [0, 1], got {eta}"
    );
    let meas = [BlochMeasurement::X, BlochMeasurement::Z];
    let preparations = example_directions()
        .iter()
        .enumerate()
        .map(|(i, &(x, z))| {
            let state = BlochState::new([x, 0.0, z])
                .expect("pure state")
                .depolarize(eta);
            prep(&format!("P{i}"), state, &meas)
        })
        .collect();
    ScenarioStats {
        measurements: vec!["X".into(), "Z".into()],
        preparations,
    }
}

/// Largest inequality determinant for [`paper_example`] at visibility `eta`,
/// or `None` if the preparations are degenerate.
pub fn example_max_det(eta: f64) -> Option<f64> {
    let vs: [PrepVector; 4] = to_vectors(&paper_example(eta)).try_into().ok()?;
    let geo = canonicalize(&vs, DEFAULT_EPS_GEOM).canonical().cloned()?;
    Some(evaluate_all(&geo, DEFAULT_EPS_VERDICT).max_det())
}

/// Visibility at which [`paper_example`] stops violating, by bisection to
/// within `1e-9`.
pub fn violation_threshold() -> f64 {
    let (mut lo, mut hi) = (0.25, 1.0);
    let sign = |eta: f64| example_max_det(eta).is_some_and(|d| d > 0.0);
    debug_assert!(!sign(lo) && sign(hi));
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if sign(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Three-measurement variant of [`paper_example`] for the tomographic
/// reduction.
///
/// Each original state is tilted out of the `XZ` plane so that its `Y`
/// expectation is `eta * tilt[i]`, keeping the Bloch length at `eta`. An
/// auxiliary `+Y` eigenstate is appended.
pub fn tilted_example(eta: f64, tilt: [f64; 4]) -> ScenarioStats {
    assert!(
        (0.0..=1.0).contains(&eta),
        "visibility must lie in [0, 1], got {eta}"
    );
    let meas = [
        BlochMeasurement::X,
        BlochMeasurement::Z,
        BlochMeasurement::Y,
    ];
    let mut preparations: Vec<Preparation> = example_directions()
        .iter()
        .zip(tilt)
        .enumerate()
        .map(|(i, (&(x, z), t))| {
            assert!(t.abs() <= 1.0, "tilt must lie in [-1, 1], got {t}");
            let s = (1.0 - t * t).sqrt();
            let state = BlochState::new([s * x, t, s * z])
                .expect("pure state")
                .depolarize(eta);
            prep(&format!("P{i}"), state, &meas)
        })
        .collect();
    let aux = BlochState::new([0.0, 1.0, 0.0]).unwrap();
    let mut aux = prep("A", aux, &meas);
    aux.auxiliary = true;
    preparations.push(aux);
    ScenarioStats {
        measurements: vec!["X".into(), "Z".into(), "Y".into()],
        preparations,
    }
}

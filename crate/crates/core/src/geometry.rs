//! Quadrilateral geometry of four preparation vectors.
//!
//! Four vectors in convex position are relabelled `P_0..P_3` so that
//! `(P_0, P_3)` and `(P_1, P_2)` are the diagonals and the orientation
//! determinant
//!
//! ```text
//! D = | x0 - x3   x2 - x1 |
//!     | y0 - y3   y2 - y1 |
//! ```
//!
//! is positive. Anything else (coincident or collinear points, or a point
//! inside the triangle of the other three) has a simplex as its hull and is
//! reported as degenerate.

use serde::Serialize;
use thiserror::Error;

use crate::scenario::PrepVector;

/// Default absolute tolerance on triangle-area determinants.
pub const DEFAULT_EPS_GEOM: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("pivotal weights p = {p}, q = {q} are too close to the boundary of (0, 1)")]
    NumericalDegeneracy { p: f64, q: f64 },
}

#[inline]
fn cross(a: PrepVector, b: PrepVector) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area of triangle `abc`; positive when counter-clockwise.
#[inline]
pub fn orient(a: PrepVector, b: PrepVector, c: PrepVector) -> f64 {
    cross(b - a, c - a)
}

/// Four preparation vectors in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CanonicalGeometry {
    verts: [PrepVector; 4],
    /// `perm[input index] = canonical label`.
    perm: [usize; 4],
    d: f64,
}

impl CanonicalGeometry {
    /// Vertices `P_0..P_3`.
    pub fn verts(&self) -> &[PrepVector; 4] {
        &self.verts
    }

    /// Canonical label of each input index.
    pub fn perm(&self) -> [usize; 4] {
        self.perm
    }

    /// Input index of each canonical label (the inverse of [`perm`](Self::perm)).
    pub fn order(&self) -> [usize; 4] {
        let mut order = [0; 4];
        for (input, &label) in self.perm.iter().enumerate() {
            order[label] = input;
        }
        order
    }

    /// Orientation determinant, always positive.
    pub fn d(&self) -> f64 {
        self.d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DegeneracyKind {
    /// Some triple of points is (numerically) collinear or coincident.
    Collinear,
    /// One point lies inside the triangle formed by the other three.
    InteriorPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GeometryVerdict {
    Canonical(CanonicalGeometry),
    /// The hull has at most three extreme points.
    DegenerateSimplex(DegeneracyKind),
}

impl GeometryVerdict {
    pub fn canonical(&self) -> Option<&CanonicalGeometry> {
        match self {
            GeometryVerdict::Canonical(g) => Some(g),
            GeometryVerdict::DegenerateSimplex(_) => None,
        }
    }
}

/// Labels four vectors by the diagonal/orientation conventions.
///
/// Input index 0 always becomes `P_0`. The vertex across the quadrilateral
/// from it becomes `P_3`, and the other two fill `P_1`/`P_2` in whichever
/// order makes `D > 0`.
pub fn canonicalize(vs: &[PrepVector; 4], eps_geom: f64) -> GeometryVerdict {
    const TRIPLES: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    for [a, b, c] in TRIPLES {
        let area = orient(vs[a], vs[b], vs[c]);
        if area.abs() <= eps_geom {
            log::debug!("triple ({a},{b},{c}) has area determinant {area:e}; degenerate");
            return GeometryVerdict::DegenerateSimplex(DegeneracyKind::Collinear);
        }
    }

    // 0-k is a diagonal iff segments 0-k and i-j properly cross.
    let opposite = (1..4).find_map(|k| {
        let mut rest = (1..4).filter(|&i| i != k);
        let (i, j) = (rest.next().unwrap(), rest.next().unwrap());
        let splits_ij =
            orient(vs[0], vs[k], vs[i]).signum() != orient(vs[0], vs[k], vs[j]).signum();
        let splits_0k =
            orient(vs[i], vs[j], vs[0]).signum() != orient(vs[i], vs[j], vs[k]).signum();
        (splits_ij && splits_0k).then_some((k, i, j))
    });
    let Some((k, mut i, mut j)) = opposite else {
        log::debug!("no crossing diagonals; one point is interior to the others' triangle");
        return GeometryVerdict::DegenerateSimplex(DegeneracyKind::InteriorPoint);
    };

    let diag03 = vs[0] - vs[k];
    let mut d = cross(diag03, vs[j] - vs[i]);
    if d < 0.0 {
        std::mem::swap(&mut i, &mut j);
        d = -d;
    }
    let order = [0, i, j, k];
    let mut perm = [0; 4];
    for (label, &input) in order.iter().enumerate() {
        perm[input] = label;
    }
    let geo = CanonicalGeometry {
        verts: order.map(|idx| vs[idx]),
        perm,
        d,
    };
    // The pivotal weights are triangle areas relative to D, so a vertex can
    // sit within eps_geom of the opposite diagonal even when every absolute
    // area passes.
    if let Err(e) = pivotal_solve(&geo, eps_geom) {
        log::debug!("{e}; degenerate");
        return GeometryVerdict::DegenerateSimplex(DegeneracyKind::Collinear);
    }
    GeometryVerdict::Canonical(geo)
}

/// Mixing weights at the crossing point `c` of the two diagonals:
/// `p P_0 + (1 - p) P_3 = q P_1 + (1 - q) P_2 = c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PivotalDecomposition {
    pub p: f64,
    pub q: f64,
    pub c: PrepVector,
}

/// Solves for the pivotal weights by Cramer's rule.
pub fn pivotal_solve(
    geo: &CanonicalGeometry,
    eps_geom: f64,
) -> Result<PivotalDecomposition, GeometryError> {
    let [p0, p1, p2, p3] = geo.verts;
    let p = cross(p2 - p3, p2 - p1) / geo.d;
    let q = cross(p0 - p3, p2 - p3) / geo.d;
    let inside = |w: f64| w > eps_geom && w < 1.0 - eps_geom;
    if !(inside(p) && inside(q)) {
        return Err(GeometryError::NumericalDegeneracy { p, q });
    }
    Ok(PivotalDecomposition {
        p,
        q,
        c: p3.lerp(p0, p),
    })
}

/// Determinant of the 4×4 matrix with rows `(x_i, y_i, z_i, 1)`.
pub fn lemma_det(geo: &CanonicalGeometry, z: [f64; 4]) -> f64 {
    let rows = std::array::from_fn(|i| [geo.verts[i].x, geo.verts[i].y, z[i]]);
    affine_det4(rows)
}

/// Determinant of `[[r_i, 1]]` for four points `r_i` in 3-space, i.e. six
/// times the signed volume of their tetrahedron.
pub fn affine_det4(r: [[f64; 3]; 4]) -> f64 {
    // Subtracting the last row leaves a 3×3 block with a unit cofactor.
    let e: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|k| r[i][k] - r[3][k]));
    e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
        - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
        + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
}

//! The eight noncontextuality inequalities and their CHSH counterparts.
//!
//! Each inequality is labelled by a sign column `(c0, d0, c1, d1)`. With the
//! pivotal weights `p, q` the converted bipartite table has correlators
//!
//! ```text
//! <A0 B0> = p x0 - (1-p) x3     <A0 B1> = p y0 - (1-p) y3
//! <A1 B0> = q x1 - (1-q) x2     <A1 B1> = q y1 - (1-q) y2
//! ```
//!
//! and substituting the column's z-vector into the lemma determinant gives
//! `det = D * (c0 <A0B0> + d0 <A0B1> + c1 <A1B0> + d1 <A1B1> - 2)`. So each
//! column's entries are exactly the correlator signs of one CHSH expression,
//! and `S = 2 + det / D`. Every column has an odd number of minus signs,
//! which makes the eight columns the eight CHSH versions.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::geometry::{lemma_det, CanonicalGeometry, PivotalDecomposition};
use crate::scenario::ScenarioStats;

/// Default threshold on raw determinants above which a violation is reported.
pub const DEFAULT_EPS_VERDICT: f64 = 1e-9;

/// Signs `(c0, d0, c1, d1)` of `<A0B0>, <A0B1>, <A1B0>, <A1B1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignColumn {
    pub c0: i8,
    pub d0: i8,
    pub c1: i8,
    pub d1: i8,
}

impl SignColumn {
    const fn new(c0: i8, d0: i8, c1: i8, d1: i8) -> Self {
        Self { c0, d0, c1, d1 }
    }

    /// The eight columns, in the conventional order.
    pub const ALL: [SignColumn; 8] = [
        SignColumn::new(1, 1, 1, -1),
        SignColumn::new(1, 1, -1, 1),
        SignColumn::new(1, -1, 1, 1),
        SignColumn::new(1, -1, -1, -1),
        SignColumn::new(-1, 1, 1, 1),
        SignColumn::new(-1, 1, -1, -1),
        SignColumn::new(-1, -1, 1, -1),
        SignColumn::new(-1, -1, -1, 1),
    ];

    /// Correlator coefficient for setting pair `(x, y)`.
    pub fn sign(self, x: usize, y: usize) -> f64 {
        f64::from(match (x, y) {
            (0, 0) => self.c0,
            (0, 1) => self.d0,
            (1, 0) => self.c1,
            (1, 1) => self.d1,
            _ => panic!("setting index out of range: ({x}, {y})"),
        })
    }

    /// `"c0,d0,c1,d1"`, e.g. `"1,1,1,-1"`.
    pub fn key(self) -> String {
        self.to_string()
    }

    pub fn parse(key: &str) -> Option<Self> {
        let v: Vec<i8> = key
            .split(',')
            .map(|s| s.trim().parse().ok())
            .collect::<Option<_>>()?;
        let col = match v.as_slice() {
            &[c0, d0, c1, d1] => SignColumn::new(c0, d0, c1, d1),
            _ => return None,
        };
        Self::ALL.contains(&col).then_some(col)
    }
}

impl fmt::Display for SignColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.c0, self.d0, self.c1, self.d1)
    }
}

impl Serialize for SignColumn {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Heights `z_i` that turn the column's CHSH inequality into the lemma form.
pub fn z_vector(col: SignColumn, geo: &CanonicalGeometry) -> [f64; 4] {
    let [p0, p1, p2, p3] = *geo.verts();
    let (c0, d0, c1, d1) = (
        f64::from(col.c0),
        f64::from(col.d0),
        f64::from(col.c1),
        f64::from(col.d1),
    );
    [
        c0 * p0.x + d0 * p0.y - 1.0,
        -c1 * p1.x - d1 * p1.y + 1.0,
        c1 * p2.x + d1 * p2.y + 1.0,
        -c0 * p3.x - d0 * p3.y - 1.0,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Noncontextual,
    Contextual,
    DegenerateNoncontextual,
}

impl Verdict {
    pub fn is_noncontextual(self) -> bool {
        !matches!(self, Verdict::Contextual)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Noncontextual => "Noncontextual",
            Verdict::Contextual => "Contextual",
            Verdict::DegenerateNoncontextual => "DegenerateNoncontextual",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityValue {
    pub column: SignColumn,
    /// Lemma determinant; positive means violated.
    pub det: f64,
    /// CHSH value `2 + det / D`.
    pub chsh: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub values: [InequalityValue; 8],
    pub d: f64,
    /// `max(det, 0)` over all columns.
    pub max_violation: f64,
    pub verdict: Verdict,
}

impl InequalityReport {
    pub fn max_det(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.det)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_chsh(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.chsh)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Scale-free violation `max det / D`.
    pub fn chsh_gap(&self) -> f64 {
        self.max_det() / self.d
    }

    pub fn get(&self, col: SignColumn) -> &InequalityValue {
        self.values
            .iter()
            .find(|v| v.column == col)
            .expect("all eight columns present")
    }
}

/// Evaluates all eight determinant inequalities.
pub fn evaluate_all(geo: &CanonicalGeometry, eps_verdict: f64) -> InequalityReport {
    let d = geo.d();
    let values = SignColumn::ALL.map(|column| {
        let det = lemma_det(geo, z_vector(column, geo));
        InequalityValue {
            column,
            det,
            chsh: 2.0 + det / d,
        }
    });
    let max_det = values
        .iter()
        .map(|v| v.det)
        .fold(f64::NEG_INFINITY, f64::max);
    let verdict = if max_det > eps_verdict {
        Verdict::Contextual
    } else {
        Verdict::Noncontextual
    };
    InequalityReport {
        values,
        d,
        max_violation: max_det.max(0.0),
        verdict,
    }
}

/// Bipartite CHSH table `P(a, b | x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BellTable {
    /// Indexed `[x][y][a][b]`.
    pub probs: [[[[f64; 2]; 2]; 2]; 2],
}

impl BellTable {
    pub fn from_fn(mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        Self {
            probs: std::array::from_fn(|x| {
                std::array::from_fn(|y| {
                    std::array::from_fn(|a| std::array::from_fn(|b| f(a, b, x, y)))
                })
            }),
        }
    }

    pub fn uniform() -> Self {
        Self::from_fn(|_, _, _, _| 0.25)
    }

    /// `P(a, b | x, y)`.
    pub fn get(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.probs[x][y][a][b]
    }

    /// `<A_x B_y> = sum_{a,b} (-1)^(a+b) P(a, b | x, y)`.
    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        let t = &self.probs[x][y];
        t[0][0] - t[0][1] - t[1][0] + t[1][1]
    }

    /// Largest deviation of any `(x, y)` block from unit total.
    pub fn normalization_error(&self) -> f64 {
        self.probs
            .iter()
            .flatten()
            .map(|blk| (blk.iter().flatten().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest violation of no-signalling in either direction.
    pub fn signalling_gap(&self) -> f64 {
        let mut gap = 0.0f64;
        for s in 0..2 {
            for o in 0..2 {
                // Alice's marginal must not depend on y, Bob's not on x.
                let alice = |y: usize| self.get(o, 0, s, y) + self.get(o, 1, s, y);
                let bob = |x: usize| self.get(0, o, x, s) + self.get(1, o, x, s);
                gap = gap
                    .max((alice(0) - alice(1)).abs())
                    .max((bob(0) - bob(1)).abs());
            }
        }
        gap
    }
}

/// Converts canonical-labelled statistics to the equivalent CHSH table.
///
/// `stats` is in input order; `geo` supplies the relabelling. Alice's setting
/// `x = 0` mixes `P_0`/`P_3` with weights `p`/`1 - p`, and `x = 1` mixes
/// `P_1`/`P_2` with `q`/`1 - q`. Her outcome says which of the pair was
/// prepared; Bob's setting and outcome are the measurement and its result.
pub fn bell_convert(
    stats: &ScenarioStats,
    geo: &CanonicalGeometry,
    piv: &PivotalDecomposition,
) -> BellTable {
    let order = geo.order();
    let prep = |label: usize| &stats.preparations[order[label]];
    // (label, weight) indexed by [x][a]
    let branches = [
        [(0, piv.p), (3, 1.0 - piv.p)],
        [(1, piv.q), (2, 1.0 - piv.q)],
    ];
    BellTable::from_fn(|a, b, x, y| {
        let (label, weight) = branches[x][a];
        weight * prep(label).prob(b, y)
    })
}

/// CHSH expression selected by `col`.
pub fn chsh_value(bt: &BellTable, col: SignColumn) -> f64 {
    (0..2)
        .flat_map(|x| (0..2).map(move |y| (x, y)))
        .map(|(x, y)| col.sign(x, y) * bt.correlator(x, y))
        .sum()
}

//! Machine-readable reports.
//!
//! Reports are written as single-line JSON with every float printed to 17
//! significant digits, so parsing a report and writing it back reproduces it
//! byte for byte.

use std::io;

use indexmap::IndexMap;
use nctx_core::inequalities::SignColumn;
use nctx_core::oracle::OntologicalModel;
use nctx_core::scenario::ScenarioStats;
use nctx_core::tomography::ReductionResult;
use nctx_core::{Certification, CrossCheck};
use serde::{Deserialize, Serialize};

/// Compact JSON with floats in `{:.16e}` form.
#[derive(Debug, Default, Clone, Copy)]
pub struct Sig17Formatter;

impl serde_json::ser::Formatter for Sig17Formatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter);
    value
        .serialize(&mut ser)
        .expect("report serialization cannot fail");
    String::from_utf8(out).expect("serde_json writes UTF-8")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    /// `mu[label][lambda]` in canonical labels.
    pub mu: Vec<[f64; 16]>,
    pub pivotal_gap: f64,
    pub reproduction_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub feasible: bool,
    pub degenerate: bool,
    pub residual: f64,
    pub agree: bool,
    pub in_boundary_band: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[f64; 16]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyReport {
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub det_values: Option<IndexMap<String, f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh_values: Option<IndexMap<String, f64>>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<[usize; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_violation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CertifyReport {
    pub fn new(cert: &Certification, check: Option<&CrossCheck>) -> Self {
        let eval = cert.evaluation.as_ref();
        let by_column = |f: fn(&nctx_core::inequalities::InequalityValue) -> f64| {
            eval.map(|e| {
                e.report
                    .values
                    .iter()
                    .map(|v| (v.column.key(), f(v)))
                    .collect()
            })
        };
        Self {
            verdict: cert.verdict.to_string(),
            det_values: by_column(|v| v.det),
            chsh_values: by_column(|v| v.chsh),
            d: eval.map(|e| e.report.d),
            p: eval.map(|e| e.pivotal.p),
            q: eval.map(|e| e.pivotal.q),
            c: eval.map(|e| [e.pivotal.c.x, e.pivotal.c.y]),
            permutation: eval.map(|e| e.geometry.perm()),
            max_violation: eval.map(|e| e.report.max_violation),
            oracle: check.map(|cc| OracleReport::new(cc, &cert.stats)),
            input: None,
            error: None,
        }
    }

    pub fn failure(input: Option<String>, message: String) -> Self {
        Self {
            verdict: "Error".into(),
            det_values: None,
            chsh_values: None,
            d: None,
            p: None,
            q: None,
            c: None,
            permutation: None,
            max_violation: None,
            oracle: None,
            input,
            error: Some(message),
        }
    }

    pub fn max_det(&self) -> Option<f64> {
        self.det_values
            .as_ref()
            .map(|m| m.values().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn max_chsh(&self) -> Option<f64> {
        self.chsh_values
            .as_ref()
            .map(|m| m.values().copied().fold(f64::NEG_INFINITY, f64::max))
    }
}

impl OracleReport {
    fn new(cc: &CrossCheck, stats: &ScenarioStats) -> Self {
        let model = cc
            .oracle
            .model
            .as_ref()
            .map(|m: &OntologicalModel| ModelReport {
                mu: m.mu.to_vec(),
                pivotal_gap: m.pivotal_gap(),
                reproduction_error: m.reproduction_error(stats),
            });
        Self {
            feasible: cc.oracle.verdict.feasible,
            degenerate: cc.oracle.degenerate,
            residual: cc.oracle.verdict.residual,
            agree: cc.agree,
            in_boundary_band: cc.in_boundary_band,
            witness: cc.oracle.verdict.witness.as_ref().map(|w| w.w),
            model,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub eta: f64,
    pub scenario: ScenarioStats,
    pub report: CertifyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub names: Vec<String>,
    pub plane_w: f64,
    pub mix_params: [f64; 4],
    pub effective: Vec<[f64; 2]>,
}

impl ReductionReport {
    pub fn new(r: &ReductionResult, names: &[String]) -> Self {
        Self {
            names: names.to_vec(),
            plane_w: r.plane_w,
            mix_params: r.mix_params,
            effective: r.effective.iter().map(|v| [v.x, v.y]).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReduceReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionReport>,
    pub report: CertifyReport,
}

/// Human-readable rendering of a certification report.
pub fn render_text(r: &CertifyReport) -> String {
    let mut out = String::new();
    if let Some(input) = &r.input {
        out += &format!("input: {input}\n");
    }
    out += &format!("verdict: {}\n", r.verdict);
    if let Some(err) = &r.error {
        out += &format!("error: {err}\n");
    }
    if let (Some(d), Some(p), Some(q), Some(c), Some(perm)) = (r.d, r.p, r.q, r.c, r.permutation) {
        out += &format!(
            "D = {d:.10}  p = {p:.10}  q = {q:.10}  c = ({:.10}, {:.10})\n",
            c[0], c[1]
        );
        out += &format!("canonical label of each input: {perm:?}\n");
    }
    if let (Some(dets), Some(chsh)) = (&r.det_values, &r.chsh_values) {
        out += &format!("{:<14} {:>16} {:>14}\n", "column", "det", "chsh");
        for (key, det) in dets {
            let mark = if *det > 0.0 { "  violated" } else { "" };
            out += &format!("{key:<14} {det:>16.10} {:>14.10}{mark}\n", chsh[key]);
        }
        if let Some(m) = r.max_violation {
            out += &format!("max violation: {m:.10}\n");
        }
    }
    if let Some(o) = &r.oracle {
        out += &format!(
            "oracle: {} (residual {:.3e}{}){}\n",
            if o.feasible {
                "local model found"
            } else {
                "no local model"
            },
            o.residual,
            if o.degenerate { ", degenerate" } else { "" },
            match (o.agree, o.in_boundary_band) {
                (true, _) => "",
                (false, true) => "; disagrees inside boundary band",
                (false, false) => "; DISAGREES with determinant verdict",
            }
        );
        if let Some(m) = &o.model {
            out += &format!(
                "ontological model: pivotal gap {:.3e}, reproduction error {:.3e}\n",
                m.pivotal_gap, m.reproduction_error
            );
        }
    }
    out
}

/// Columns in report order.
pub fn column_keys() -> Vec<String> {
    SignColumn::ALL.iter().map(|c| c.key()).collect()
}

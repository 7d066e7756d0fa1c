//! Command implementations behind the `nctx` binary.
//!
//! Every command returns an [`Outcome`] carrying the exit code and the text
//! to print, so the commands can be exercised without spawning a process.
//!
//! Exit codes: `0` a noncontextual model exists, `1` contextual, `2` input or
//! solver error, `3` the LP oracle disagrees with the determinant verdict
//! outside the boundary band. Batch runs exit with the largest per-file code.

pub mod report;

use std::path::{Path, PathBuf};

use nctx_core::quantum::{paper_example, violation_threshold};
use nctx_core::scenario::ScenarioStats;
use nctx_core::{certify, cross_check, reduce_and_certify, Certification, Tolerances};
use rayon::prelude::*;

use report::{
    render_text, to_json, CertifyReport, ReduceReport, ReductionReport, SimulateReport,
    ThresholdReport,
};

pub const EXIT_NONCONTEXTUAL: u8 = 0;
pub const EXIT_CONTEXTUAL: u8 = 1;
pub const EXIT_ERROR: u8 = 2;
pub const EXIT_ORACLE_CONFLICT: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Mode {
    Certify { inputs: Vec<PathBuf> },
    Simulate { eta: f64 },
    Threshold,
    Reduce { input: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub tolerances: Tolerances,
    pub oracle: bool,
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(cfg: &RunConfig) -> Outcome {
    if !cfg.tolerances.is_valid() {
        return Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: "error: tolerances must be positive and finite\n".into(),
        };
    }
    match &cfg.mode {
        Mode::Certify { inputs } => run_certify(inputs, cfg),
        Mode::Simulate { eta } => run_simulate(*eta, cfg),
        Mode::Threshold => run_threshold(cfg),
        Mode::Reduce { input } => run_reduce(input, cfg),
    }
}

fn certification_code(cert: &Certification, conflict: bool) -> u8 {
    if conflict {
        EXIT_ORACLE_CONFLICT
    } else if cert.verdict.is_noncontextual() {
        EXIT_NONCONTEXTUAL
    } else {
        EXIT_CONTEXTUAL
    }
}

/// Certifies already-parsed statistics. Errors become an `Error` report.
fn certify_stats(stats: &ScenarioStats, cfg: &RunConfig) -> (u8, CertifyReport) {
    let tol = &cfg.tolerances;
    let result = certify(stats, tol).and_then(|cert| {
        let check = cfg.oracle.then(|| cross_check(&cert, tol)).transpose()?;
        Ok((cert, check))
    });
    match result {
        Ok((cert, check)) => {
            let conflict = check.as_ref().is_some_and(|c| c.conflict());
            (
                certification_code(&cert, conflict),
                CertifyReport::new(&cert, check.as_ref()),
            )
        }
        Err(e) => (EXIT_ERROR, CertifyReport::failure(None, e.to_string())),
    }
}

fn read_stats(path: &Path) -> Result<ScenarioStats, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    ScenarioStats::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn error_lines(reports: &[&CertifyReport]) -> String {
    reports
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("error: {e}\n")))
        .chain(
            reports
                .iter()
                .filter(|r| {
                    r.oracle
                        .as_ref()
                        .is_some_and(|o| !o.agree && !o.in_boundary_band)
                })
                .map(|r| {
                    format!(
                "diagnostic: LP oracle disagrees with the determinant verdict ({}) for {}\n",
                r.verdict,
                r.input.as_deref().unwrap_or("input")
            )
                }),
        )
        .collect()
}

pub fn run_certify(inputs: &[PathBuf], cfg: &RunConfig) -> Outcome {
    let results: Vec<(u8, CertifyReport)> = inputs
        .par_iter()
        .map(|path| {
            let (code, mut report) = match read_stats(path) {
                Ok(stats) => certify_stats(&stats, cfg),
                Err(msg) => (EXIT_ERROR, CertifyReport::failure(None, msg)),
            };
            report.input = Some(path.display().to_string());
            (code, report)
        })
        .collect();
    let code = results.iter().map(|(c, _)| *c).max().unwrap_or(EXIT_ERROR);
    let reports: Vec<&CertifyReport> = results.iter().map(|(_, r)| r).collect();
    let stdout = match cfg.format {
        OutputFormat::Json if reports.len() == 1 => to_json(reports[0]) + "\n",
        OutputFormat::Json => to_json(&reports) + "\n",
        OutputFormat::Text => reports
            .iter()
            .map(|r| render_text(r))
            .collect::<Vec<_>>()
            .join("\n"),
    };
    let mut stderr = error_lines(&reports);
    if inputs.is_empty() {
        stderr += "error: no input files\n";
    }
    Outcome {
        code,
        stdout,
        stderr,
    }
}

pub fn run_simulate(eta: f64, cfg: &RunConfig) -> Outcome {
    if !(0.0..=1.0).contains(&eta) {
        return Outcome {
            code: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: visibility must lie in [0, 1], got {eta}\n"),
        };
    }
    let scenario = paper_example(eta);
    let (code, report) = certify_stats(&scenario, cfg);
    let stderr = error_lines(&[&report]);
    let stdout = match cfg.format {
        OutputFormat::Json => {
            to_json(&SimulateReport {
                eta,
                scenario,
                report,
            }) + "\n"
        }
        OutputFormat::Text => {
            let mut out = format!("visibility eta = {eta}\n");
            for p in &scenario.preparations {
                out += &format!(
                    "{}: P(0|{}) = {:.10}, P(0|{}) = {:.10}\n",
                    p.name,
                    scenario.measurements[0],
                    p.prob0[0],
                    scenario.measurements[1],
                    p.prob0[1]
                );
            }
            out + &render_text(&report)
        }
    };
    Outcome {
        code,
        stdout,
        stderr,
    }
}

pub fn run_threshold(cfg: &RunConfig) -> Outcome {
    let threshold = violation_threshold();
    let stdout = match cfg.format {
        OutputFormat::Json => to_json(&ThresholdReport { threshold }) + "\n",
        OutputFormat::Text => format!("violation threshold: eta* = {threshold:.9}\n"),
    };
    Outcome {
        code: EXIT_NONCONTEXTUAL,
        stdout,
        stderr: String::new(),
    }
}

pub fn run_reduce(input: &Path, cfg: &RunConfig) -> Outcome {
    let result = read_stats(input)
        .and_then(|stats| reduce_and_certify(&stats, &cfg.tolerances).map_err(|e| e.to_string()));
    let (code, doc) = match result {
        Ok(red) => {
            let (code, mut report) = {
                let check = if cfg.oracle {
                    match cross_check(&red.certification, &cfg.tolerances) {
                        Ok(c) => Some(c),
                        Err(e) => {
                            let doc = ReduceReport {
                                reduction: Some(ReductionReport::new(&red.result, &red.names)),
                                report: CertifyReport::failure(None, e.to_string()),
                            };
                            return finish_reduce(EXIT_ERROR, doc, input, cfg);
                        }
                    }
                } else {
                    None
                };
                let conflict = check.as_ref().is_some_and(|c| c.conflict());
                (
                    certification_code(&red.certification, conflict),
                    CertifyReport::new(&red.certification, check.as_ref()),
                )
            };
            report.input = Some(input.display().to_string());
            (
                code,
                ReduceReport {
                    reduction: Some(ReductionReport::new(&red.result, &red.names)),
                    report,
                },
            )
        }
        Err(msg) => (
            EXIT_ERROR,
            ReduceReport {
                reduction: None,
                report: CertifyReport::failure(Some(input.display().to_string()), msg),
            },
        ),
    };
    finish_reduce(code, doc, input, cfg)
}

fn finish_reduce(code: u8, mut doc: ReduceReport, input: &Path, cfg: &RunConfig) -> Outcome {
    doc.report
        .input
        .get_or_insert_with(|| input.display().to_string());
    let stderr = error_lines(&[&doc.report]);
    let stdout = match cfg.format {
        OutputFormat::Json => to_json(&doc) + "\n",
        OutputFormat::Text => {
            let mut out = String::new();
            if let Some(r) = &doc.reduction {
                out += &format!("reduction plane: w = {:.10}\n", r.plane_w);
                for ((name, t), e) in r.names.iter().zip(r.mix_params).zip(&r.effective) {
                    out += &format!(
                        "{name}: mixing weight {t:.10} -> ({:.10}, {:.10})\n",
                        e[0], e[1]
                    );
                }
            }
            out + &render_text(&doc.report)
        }
    };
    Outcome {
        code,
        stdout,
        stderr,
    }
}

use std::path::PathBuf;
use std::process::{Command, Output};

use nctx_cli::report::{to_json, CertifyReport, ReduceReport, SimulateReport};

fn nctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctx"))
        .args(args)
        .output()
        .expect("spawn nctx")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("testdata")
        .join(name)
        .display()
        .to_string()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn certify_exit_codes() {
    assert_eq!(
        nctx(&["certify", &data("qubit.json")]).status.code(),
        Some(1)
    );
    assert_eq!(
        nctx(&["certify", &data("square_0.3.json"), "--oracle"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        nctx(&["certify", &data("collinear.json")]).status.code(),
        Some(0)
    );
    let bad = nctx(&["certify", &data("malformed.json")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("error"));
    assert_eq!(
        nctx(&["certify", "/nonexistent/file.json"]).status.code(),
        Some(2)
    );
    // Three-measurement data is not valid for plain certification.
    assert_eq!(
        nctx(&["certify", &data("tilted.json")]).status.code(),
        Some(2)
    );
}

#[test]
fn certify_json_report() {
    let out = nctx(&[
        "certify",
        &data("qubit.json"),
        "--oracle",
        "--format",
        "json",
    ]);
    let text = stdout(&out);
    let report: CertifyReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.verdict, "Contextual");
    assert!((report.max_det().unwrap() - 3.313_708_5).abs() < 1e-7);
    assert!((report.max_chsh().unwrap() - 2.828_4).abs() < 1e-4);
    assert_eq!(report.permutation, Some([0, 1, 2, 3]));
    let oracle = report.oracle.as_ref().unwrap();
    assert!(!oracle.feasible && oracle.agree);
    assert_eq!(to_json(&report) + "\n", text);
}

#[test]
fn feasible_report_carries_model() {
    let out = nctx(&[
        "certify",
        &data("square_0.3.json"),
        "--oracle",
        "--format",
        "json",
    ]);
    let report: CertifyReport = serde_json::from_str(&stdout(&out)).unwrap();
    let oracle = report.oracle.unwrap();
    assert!(oracle.feasible && oracle.agree);
    let model = oracle.model.unwrap();
    assert_eq!(model.mu.len(), 4);
    assert!(model.pivotal_gap <= 1e-7 && model.reproduction_error <= 1e-7);
}

#[test]
fn batch_exit_code_is_maximum() {
    let out = nctx(&[
        "certify",
        &data("square_0.3.json"),
        &data("qubit.json"),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let reports: Vec<CertifyReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0].verdict, "Noncontextual");
    assert_eq!(reports[1].verdict, "Contextual");
    assert!(reports[1].input.as_deref().unwrap().ends_with("qubit.json"));

    let out = nctx(&["certify", &data("qubit.json"), &data("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_modes() {
    let out = nctx(&["simulate", "--eta", "1.0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let doc: SimulateReport = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.scenario.preparations.len(), 4);
    assert_eq!(to_json(&doc) + "\n", text);

    let out = nctx(&["simulate", "--eta", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("verdict: Noncontextual"));

    let out = nctx(&["simulate", "--eta", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("DegenerateNoncontextual"));

    let out = nctx(&["simulate", "--threshold"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("0.70710"));

    assert_eq!(nctx(&["simulate", "--eta", "1.5"]).status.code(), Some(2));
    assert_eq!(nctx(&["simulate", "--eta", "-0.1"]).status.code(), Some(2));
    assert_eq!(nctx(&["simulate", "--eta", "NaN"]).status.code(), Some(2));
    assert_eq!(
        nctx(&["simulate", "--eta", "0.9", "--threshold"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn reduce_command() {
    let out = nctx(&["reduce", &data("coplanar.json"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc: ReduceReport = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc.reduction.as_ref().unwrap().mix_params, [0.0; 4]);

    let out = nctx(&[
        "reduce",
        &data("tilted.json"),
        "--oracle",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    let doc: ReduceReport = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.report.verdict, "Contextual");
    assert_eq!(to_json(&doc) + "\n", text);

    let out = nctx(&["reduce", &data("unseparated.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly beyond"));
    assert_eq!(
        nctx(&["reduce", &data("qubit.json")]).status.code(),
        Some(2)
    );
}

#[test]
fn rejects_bad_tolerances_and_usage() {
    assert_eq!(
        nctx(&["certify", &data("qubit.json"), "--delta-lp", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nctx(&["certify"]).status.code(), Some(2));
    assert_eq!(nctx(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn log_variable_enables_diagnostics() {
    let out = Command::new(env!("CARGO_BIN_EXE_nctx"))
        .args(["certify", &data("collinear.json")])
        .env("NCTX_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

//! Trace CSV and JSON summary.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use waist_core::diagnostics::{Certificate, DiagnosticsReport};
use waist_core::oracle::Adjudication;
use waist_core::{Problem, SolveResult, Termination};

use crate::problem_file::{method_name, SolverSpec};
use crate::CliError;

fn axis_name(n: usize, j: usize) -> String {
    match (n, j) {
        (..=3, 0) => "x".into(),
        (..=3, 1) => "y".into(),
        (..=3, 2) => "z".into(),
        _ => (j + 1).to_string(),
    }
}

/// One row per iteration at 6 decimals: `k, a1_x, a1_y, ..., D_k, delta_D_k, xi`.
pub fn trace_csv(result: &SolveResult) -> String {
    let m = result.start.len();
    let n = result.start.points.first().map_or(0, |p| p.dim());
    let mut out = String::from("k");
    for i in 1..=m {
        for j in 0..n {
            let _ = write!(out, ",a{i}_{}", axis_name(n, j));
        }
    }
    out.push_str(",D_k,delta_D_k,xi\n");
    for rec in &result.trace {
        let _ = write!(out, "{}", rec.k);
        for p in &rec.points.points {
            for c in p.coords() {
                let _ = write!(out, ",{c:.6}");
            }
        }
        let _ = write!(out, ",{:.6},{:.6},", rec.value, rec.delta);
        if let Some(xi) = rec.xi {
            let _ = write!(out, "{xi:.6}");
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRow {
    pub k: usize,
    pub value: f64,
    pub delta: f64,
    pub xi: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summary {
    pub method: &'static str,
    pub step_rule: String,
    pub alpha: Option<f64>,
    pub tolerance: f64,
    pub aitken: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub value: f64,
    pub start: Vec<Vec<f64>>,
    pub final_points: Vec<Vec<f64>>,
    pub residual: f64,
    pub accepted_extrapolations: usize,
    pub warnings: Vec<String>,
    pub certificate: Certificate,
    pub diagnostics: DiagnosticsReport,
    pub oracle: Option<Adjudication>,
    pub trace: Vec<TraceRow>,
}

impl Summary {
    pub fn new(
        problem: &Problem,
        spec: &SolverSpec,
        result: &SolveResult,
        oracle: Option<Adjudication>,
    ) -> Result<Self, CliError> {
        let coords = |c: &waist_core::Configuration| c.points.iter().map(|p| p.coords().to_vec()).collect();
        let certificate = waist_core::diagnostics::certify(problem, &result.final_config, spec.tolerance.max(1e-9))?;
        Ok(Summary {
            method: method_name(spec.method),
            step_rule: spec.step()?.label(),
            alpha: result.alpha,
            tolerance: spec.tolerance,
            aitken: spec.aitken,
            termination: result.termination,
            iterations: result.iterations,
            value: result.value,
            start: coords(&result.start),
            final_points: coords(&result.final_config),
            residual: result.residual,
            accepted_extrapolations: result.accepted_extrapolations,
            warnings: result.warnings.clone(),
            certificate,
            diagnostics: waist_core::diagnostics::report(problem)?,
            oracle,
            trace: result
                .trace
                .iter()
                .map(|r| TraceRow { k: r.k, value: r.value, delta: r.delta, xi: r.xi })
                .collect(),
        })
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

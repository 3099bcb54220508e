//! Step-size benchmark: every (strategy, tolerance) cell of a grid file.
//!
//! ```json
//! {
//!   "strategies": [
//!     { "method": "psd", "step_rule": "constant", "alpha": 2.07 },
//!     { "method": "psd", "step_rule": "diminishing", "c": 1 }
//!   ],
//!   "tolerances": [1e-15, 1e-10],
//!   "max_iterations": 1000000
//! }
//! ```

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::Deserialize;
use waist_core::solver::{solve, Refresh, StepRule};
use waist_core::{Configuration, Problem, SolverConfig, Termination};

use crate::problem_file::{method_name, parse_method, RuleKind};
use crate::CliError;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Strategy {
    #[serde(default = "psd")]
    pub method: String,
    pub step_rule: String,
    pub alpha: Option<f64>,
    pub c: Option<f64>,
    #[serde(default)]
    pub aitken: bool,
}

fn psd() -> String {
    "psd".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub strategies: Vec<Strategy>,
    pub tolerances: Vec<f64>,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_max_iterations() -> usize {
    1_000_000
}

pub fn parse_grid(text: &str) -> Result<Grid, CliError> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub method: String,
    pub alpha: String,
    pub tolerance: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub cpu_seconds: f64,
}

/// A cell that could not be run, with its position in the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct CellError {
    pub strategy: usize,
    pub tolerance: f64,
    pub message: String,
}

fn step_rule(s: &Strategy) -> Result<StepRule, String> {
    match RuleKind::parse(&s.step_rule) {
        Some(RuleKind::Constant) => {
            s.alpha.map(|alpha| StepRule::Constant { alpha }).ok_or_else(|| "constant rule needs alpha".into())
        }
        Some(RuleKind::Diminishing) => Ok(StepRule::Diminishing { c: s.c.unwrap_or(1.0) }),
        Some(RuleKind::ExactLineSearch) => {
            Ok(StepRule::ExactLineSearch { alpha_max: s.alpha.unwrap_or(1.0), refresh: Refresh::Once })
        }
        None => Err(format!("unknown step rule {:?}", s.step_rule)),
    }
}

fn run_cell(problem: &Problem, start: &Configuration, s: &Strategy, tol: f64, max_iter: usize) -> Result<BenchRow, String> {
    let method = parse_method(&s.method).ok_or_else(|| format!("unknown method {:?}", s.method))?;
    let rule = step_rule(s)?;
    let cfg = SolverConfig::constant(1.0, tol)
        .with_step_rule(rule)
        .with_max_iterations(max_iter)
        .with_aitken(s.aitken)
        .with_trace(false);
    let t = Instant::now();
    let r = solve(problem, start, &cfg, method).map_err(|e| e.to_string())?;
    Ok(BenchRow {
        method: format!("{}{}", method_name(method), if s.aitken { "+aitken" } else { "" }),
        alpha: rule.label(),
        tolerance: tol,
        iterations: r.iterations,
        termination: r.termination,
        cpu_seconds: t.elapsed().as_secs_f64(),
    })
}

/// Runs all cells concurrently. Rows come back in grid order (strategy
/// major); failed cells are returned separately and do not stop the others.
pub fn run_grid(problem: &Problem, start: &Configuration, grid: &Grid) -> (Vec<BenchRow>, Vec<CellError>) {
    let cells: Vec<(usize, f64)> = (0..grid.strategies.len())
        .flat_map(|i| grid.tolerances.iter().map(move |t| (i, *t)))
        .collect();
    let results: Vec<_> = cells
        .par_iter()
        .map(|&(i, tol)| {
            run_cell(problem, start, &grid.strategies[i], tol, grid.max_iterations)
                .map_err(|message| CellError { strategy: i, tolerance: tol, message })
        })
        .collect();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => errors.push(e),
        }
    }
    (rows, errors)
}

/// `method,alpha,tolerance,iterations,cpu_seconds`
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("method,alpha,tolerance,iterations,cpu_seconds\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{:e},{},{:.6}", r.method, r.alpha, r.tolerance, r.iterations, r.cpu_seconds);
    }
    out
}

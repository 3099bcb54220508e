//! The `solve` and `oracle` commands, independent of argument parsing.

use std::path::{Path, PathBuf};

use waist_core::oracle::{adjudicate, Adjudication};
use waist_core::solver::{solve, Method};
use waist_core::{SolveResult, Termination};

use crate::output::{trace_csv, write_file, Summary};
use crate::problem_file::{ProblemFile, RuleKind, SolverSpec};
use crate::render::render_figure;
use crate::CliError;

/// Command-line values that take precedence over the file's solver section.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    /// Constant step, line-search bracket, or `c` for the diminishing rule.
    pub alpha: Option<f64>,
    pub step_rule: Option<RuleKind>,
    pub aitken: bool,
    pub method: Option<Method>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut SolverSpec) {
        if let Some(rule) = self.step_rule {
            if rule != spec.step_rule {
                spec.step_rule = rule;
                if rule == RuleKind::Diminishing {
                    spec.alpha = None;
                } else {
                    spec.c = None;
                }
            }
        }
        if let Some(a) = self.alpha {
            if spec.step_rule == RuleKind::Diminishing {
                spec.c = Some(a);
            } else {
                spec.alpha = Some(a);
            }
        }
        if let Some(t) = self.tolerance {
            spec.tolerance = t;
        }
        if let Some(n) = self.max_iterations {
            spec.max_iterations = n;
        }
        if let Some(m) = self.method {
            spec.method = m;
        }
        spec.aitken |= self.aitken;
    }
}

pub fn exit_code(t: Termination) -> u8 {
    match t {
        Termination::ToleranceMet | Termination::StalledDenominator => 0,
        Termination::MaxIterations => 2,
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Written {
    pub trace_csv: Option<PathBuf>,
    pub summary_json: Option<PathBuf>,
    pub figure_svg: Option<PathBuf>,
}

fn resolve(out_dir: &Path, name: &Option<String>) -> Option<PathBuf> {
    name.as_ref().map(|n| out_dir.join(n))
}

/// Solves `file` and writes its outputs under `out_dir`. Without an
/// `outputs` section the files are `<stem>_trace.csv`, `<stem>_summary.json`
/// and, in the plane or in space, `<stem>.svg`.
pub fn solve_file(
    file: &ProblemFile,
    out_dir: &Path,
    stem: &str,
    oracle_resolution: Option<usize>,
) -> Result<(SolveResult, Written), CliError> {
    let cfg = file.solver.config()?;
    let result = solve(&file.problem, &file.start, &cfg, file.solver.method)?;
    let oracle = match oracle_resolution {
        Some(n) => Some(run_oracle(file, &result, n)?),
        None => None,
    };

    let written = match &file.outputs {
        Some(o) => Written {
            trace_csv: resolve(out_dir, &o.trace_csv),
            summary_json: resolve(out_dir, &o.summary_json),
            figure_svg: resolve(out_dir, &o.figure_svg),
        },
        None => Written {
            trace_csv: Some(out_dir.join(format!("{stem}_trace.csv"))),
            summary_json: Some(out_dir.join(format!("{stem}_summary.json"))),
            figure_svg: matches!(file.problem.dimension(), 2 | 3).then(|| out_dir.join(format!("{stem}.svg"))),
        },
    };
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    if let Some(path) = &written.trace_csv {
        write_file(path, &trace_csv(&result))?;
    }
    if let Some(path) = &written.summary_json {
        let summary = Summary::new(&file.problem, &file.solver, &result, oracle)?;
        write_file(path, &serde_json::to_string_pretty(&summary)?)?;
    }
    if let Some(path) = &written.figure_svg {
        render_figure(&file.problem, &result, path)?;
    }
    Ok((result, written))
}

/// Boundary-grid oracle seeded with a solver result.
pub fn run_oracle(file: &ProblemFile, seed: &SolveResult, resolution: usize) -> Result<Adjudication, CliError> {
    let rounds = if file.problem.dimension() == 2 { 20 } else { 30 };
    Ok(adjudicate(&file.problem, resolution, rounds, Some(&seed.final_config))?)
}

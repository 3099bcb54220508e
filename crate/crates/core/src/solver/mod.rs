//! Projected subgradient descent and its accelerated variants.
//!
//! Every solver shares one stopping rule: after update `k` the new value
//! `D_k` is compared with the previous one and the run stops once
//! `|D_k − D_{k−1}| < tolerance` (the first update is never accepted as
//! converged). `iterations` counts updates; trace row `k` holds the iterate
//! produced by update `k`, the start configuration is kept separately.

mod aitken;
mod line_search;
mod nag;

pub use aitken::{aitken_transform, aitken_transform_stacked, psd_solve_aitken, AitkenVariant};
pub use line_search::exact_line_search;
pub use nag::{nag_solve, nag_solve_with};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{set_distance, Problem};
use crate::objective::{optimality_residual, perimeter, subgradient, Configuration, SubgradientField};
use crate::{Error, Result};

/// Denominator guard for the Δ² transforms.
pub const AITKEN_GUARD: f64 = 1e-12;

/// Step-size strategy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum StepRule {
    Constant { alpha: f64 },
    /// `α_k = c / k`, `k = 1, 2, ...`
    Diminishing { c: f64 },
    ExactLineSearch { alpha_max: f64, refresh: Refresh },
}

impl StepRule {
    pub fn label(&self) -> String {
        match self {
            StepRule::Constant { alpha } => format!("{alpha}"),
            StepRule::Diminishing { c } if *c == 1.0 => "1/k".to_string(),
            StepRule::Diminishing { c } => format!("{c}/k"),
            StepRule::ExactLineSearch { .. } => "exact-line-search".to_string(),
        }
    }
}

/// When the exact line search is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Refresh {
    /// Once at the start configuration; the step is then held fixed.
    Once,
    EveryIteration,
}

/// Which iteration drives the solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Psd,
    Nag,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub step_rule: StepRule,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub aitken: bool,
    #[serde(default)]
    pub aitken_variant: AitkenVariant,
    pub record_trace: bool,
}

impl SolverConfig {
    pub fn constant(alpha: f64, tolerance: f64) -> Self {
        SolverConfig {
            step_rule: StepRule::Constant { alpha },
            tolerance,
            max_iterations: 100_000,
            aitken: false,
            aitken_variant: AitkenVariant::default(),
            record_trace: true,
        }
    }

    pub fn with_step_rule(mut self, step_rule: StepRule) -> Self {
        self.step_rule = step_rule;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }

    pub fn with_aitken(mut self, aitken: bool) -> Self {
        self.aitken = aitken;
        self
    }

    pub fn with_trace(mut self, record_trace: bool) -> Self {
        self.record_trace = record_trace;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{what} must be finite and > 0, got {v}")))
            }
        };
        positive(self.tolerance, "tolerance")?;
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        match self.step_rule {
            StepRule::Constant { alpha } => positive(alpha, "alpha"),
            StepRule::Diminishing { c } => positive(c, "c"),
            StepRule::ExactLineSearch { alpha_max, .. } => positive(alpha_max, "alpha_max"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub points: Configuration,
    pub value: f64,
    /// `|D_k − D_{k−1}|`, with `D_0` the start value.
    pub delta: f64,
    /// `ε_{k+1}/ε_k` with `ε_k = |D_k − D_final|`; absent on the last row and
    /// where `ε_k = 0`.
    pub xi: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ToleranceMet,
    MaxIterations,
    /// The Δ² window became constant (every denominator guarded).
    StalledDenominator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub start: Configuration,
    pub final_config: Configuration,
    pub value: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub residual: f64,
    /// Step used when a single step was fixed up front (constant or line search once).
    pub alpha: Option<f64>,
    pub accepted_extrapolations: usize,
    pub trace: Vec<IterationRecord>,
    pub warnings: Vec<String>,
}

/// Solver failure together with the progress made before it.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{source} (after {iterations} iterations)")]
pub struct SolveError {
    pub source: Error,
    pub iterations: usize,
    pub trace: Vec<IterationRecord>,
}

impl From<Error> for SolveError {
    fn from(source: Error) -> Self {
        SolveError { source, iterations: 0, trace: Vec::new() }
    }
}

pub type SolveOutcome = std::result::Result<SolveResult, SolveError>;

/// Runs `method` (with Δ² acceleration when `cfg.aitken`).
pub fn solve(problem: &Problem, start: &Configuration, cfg: &SolverConfig, method: Method) -> SolveOutcome {
    match method {
        Method::Psd => psd_solve(problem, start, cfg),
        Method::Nag => {
            if cfg.aitken {
                return Err(Error::InvalidConfig("aitken acceleration applies to psd only".into()).into());
            }
            nag_solve_with(problem, start, cfg)
        }
    }
}

/// Projected subgradient descent with synchronous block updates.
///
/// Delegates to [`psd_solve_aitken`] when `cfg.aitken` is set.
pub fn psd_solve(problem: &Problem, start: &Configuration, cfg: &SolverConfig) -> SolveOutcome {
    if cfg.aitken {
        return psd_solve_aitken(problem, start, cfg);
    }
    let mut run = Run::new(problem, start, cfg)?;
    loop {
        let next = match run.psd_step() {
            Ok(next) => next,
            Err(e) => return Err(run.fail(e)),
        };
        match run.advance(next) {
            Ok(true) => return run.finish(Termination::ToleranceMet),
            Ok(false) => {}
            Err(e) => return Err(run.fail(e)),
        }
        if run.iterations >= cfg.max_iterations {
            return run.finish(Termination::MaxIterations);
        }
    }
}

/// Resolved step-size source for one run.
#[derive(Clone, Copy, Debug)]
pub(crate) enum Steps {
    Fixed(f64),
    Diminishing(f64),
    Search(f64),
}

impl Steps {
    pub(crate) fn resolve(problem: &Problem, start: &Configuration, rule: StepRule) -> Result<Self> {
        Ok(match rule {
            StepRule::Constant { alpha } => Steps::Fixed(alpha),
            StepRule::Diminishing { c } => Steps::Diminishing(c),
            StepRule::ExactLineSearch { alpha_max, refresh: Refresh::Once } => {
                let p = descent_direction(start)?;
                Steps::Fixed(exact_line_search(problem, start, &p, alpha_max)?)
            }
            StepRule::ExactLineSearch { alpha_max, refresh: Refresh::EveryIteration } => {
                Steps::Search(alpha_max)
            }
        })
    }

    pub(crate) fn fixed(&self) -> Option<f64> {
        match self {
            Steps::Fixed(a) => Some(*a),
            _ => None,
        }
    }

    /// Step for update `k` (1-based) taken from `at` along `−g`.
    pub(crate) fn alpha(&self, k: usize, problem: &Problem, at: &Configuration, g: &SubgradientField) -> Result<f64> {
        Ok(match *self {
            Steps::Fixed(a) => a,
            Steps::Diminishing(c) => c / k as f64,
            Steps::Search(alpha_max) => exact_line_search(problem, at, &negate(g), alpha_max)?,
        })
    }
}

pub(crate) fn negate(g: &SubgradientField) -> SubgradientField {
    SubgradientField { vectors: g.vectors.iter().map(|v| v.scaled(-1.0)).collect() }
}

fn descent_direction(config: &Configuration) -> Result<SubgradientField> {
    Ok(negate(&subgradient(config)?))
}

/// `P_C(a − α g)` block by block.
pub(crate) fn projected_step(
    problem: &Problem,
    at: &Configuration,
    g: &SubgradientField,
    alpha: f64,
) -> Result<Configuration> {
    let points = problem
        .sets()
        .iter()
        .zip(at.points.iter().zip(&g.vectors))
        .map(|(set, (a, gi))| set.project(&a.offset(gi, -alpha)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Configuration { points, feasible: true })
}

/// Shared bookkeeping: iterate, stopping test, trace.
pub(crate) struct Run<'a> {
    pub(crate) problem: &'a Problem,
    pub(crate) cfg: &'a SolverConfig,
    pub(crate) steps: Steps,
    pub(crate) start: Configuration,
    pub(crate) current: Configuration,
    pub(crate) current_value: f64,
    prev_value: f64,
    pub(crate) iterations: usize,
    pub(crate) accepted: usize,
    trace: Vec<IterationRecord>,
    warnings: Vec<String>,
}

impl<'a> Run<'a> {
    pub(crate) fn new(problem: &'a Problem, start: &Configuration, cfg: &'a SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let start = start.projected(problem)?;
        let mut warnings = Vec::new();
        for i in 0..problem.len() {
            for j in i + 1..problem.len() {
                let d = set_distance(problem.set(i), problem.set(j))?;
                if d.distance <= crate::MEMBERSHIP_TOL {
                    warnings.push(format!("sets {i} and {j} are not disjoint"));
                }
            }
        }
        let steps = Steps::resolve(problem, &start, cfg.step_rule)?;
        let value = perimeter(&start);
        if !value.is_finite() {
            return Err(Error::NonFinite("perimeter"));
        }
        Ok(Run {
            problem,
            cfg,
            steps,
            current: start.clone(),
            start,
            current_value: value,
            prev_value: f64::INFINITY,
            iterations: 0,
            accepted: 0,
            trace: Vec::new(),
            warnings,
        })
    }

    /// One synchronous projected subgradient update from the current iterate.
    pub(crate) fn psd_step(&self) -> Result<Configuration> {
        let g = subgradient(&self.current)?;
        let alpha = self.steps.alpha(self.iterations + 1, self.problem, &self.current, &g)?;
        if alpha == 0.0 {
            return Ok(self.current.clone());
        }
        projected_step(self.problem, &self.current, &g, alpha)
    }

    /// Accepts `next` as iterate `k + 1`; returns whether the stopping test fired.
    pub(crate) fn advance(&mut self, next: Configuration) -> Result<bool> {
        let value = perimeter(&next);
        self.advance_with_value(next, value)
    }

    pub(crate) fn advance_with_value(&mut self, next: Configuration, value: f64) -> Result<bool> {
        if !value.is_finite() || next.points.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("iterate"));
        }
        self.iterations += 1;
        let delta = (value - self.current_value).abs();
        if self.cfg.record_trace {
            self.trace.push(IterationRecord {
                k: self.iterations,
                points: next.clone(),
                value,
                delta,
                xi: None,
            });
        }
        let converged = (value - self.prev_value).abs() < self.cfg.tolerance;
        self.prev_value = value;
        self.current = next;
        self.current_value = value;
        Ok(converged)
    }

    pub(crate) fn fail(self, source: Error) -> SolveError {
        SolveError { source, iterations: self.iterations, trace: self.trace }
    }

    pub(crate) fn finish(mut self, termination: Termination) -> SolveOutcome {
        fill_xi(&mut self.trace);
        let residual = match optimality_residual(self.problem, &self.current) {
            Ok(r) => r,
            Err(e) => return Err(self.fail(e)),
        };
        Ok(SolveResult {
            alpha: self.steps.fixed(),
            start: self.start,
            value: self.current_value,
            final_config: self.current,
            iterations: self.iterations,
            termination,
            residual,
            accepted_extrapolations: self.accepted,
            trace: self.trace,
            warnings: self.warnings,
        })
    }
}

fn fill_xi(trace: &mut [IterationRecord]) {
    let Some(last) = trace.last() else { return };
    let final_value = last.value;
    let eps: Vec<f64> = trace.iter().map(|r| (r.value - final_value).abs()).collect();
    for k in 0..trace.len().saturating_sub(1) {
        trace[k].xi = (eps[k] > 0.0).then(|| eps[k + 1] / eps[k]);
    }
}

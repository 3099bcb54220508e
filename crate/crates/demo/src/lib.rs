//! JSON-in, JSON-out bindings for the static page in `www/`.
//!
//! Problems use the core serde form:
//! `{"sets": [{"type": "ball", "center": [2, 3], "radius": 1}, ...], "start": [[1, 3], ...]}`.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use waist_core::diagnostics::{certify as certify_config, report, Certificate, DiagnosticsReport};
use waist_core::objective::{perimeter, subgradient};
use waist_core::solver::{exact_line_search, solve as run_solver, Method, StepRule};
use waist_core::{Configuration, ConvexSet, Point, Problem, SolverConfig, Termination};

#[derive(Deserialize)]
struct Input {
    sets: Vec<ConvexSet>,
    start: Vec<Point>,
    #[serde(default = "default_step")]
    step_rule: StepRule,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
    #[serde(default = "default_max_iterations")]
    max_iterations: usize,
    #[serde(default)]
    aitken: bool,
    #[serde(default)]
    method: Method,
}

fn default_step() -> StepRule {
    StepRule::Constant { alpha: 0.5 }
}

fn default_tolerance() -> f64 {
    1e-10
}

fn default_max_iterations() -> usize {
    10_000
}

impl Input {
    fn parse(json: &str) -> Result<(Self, Problem), String> {
        let input: Input = serde_json::from_str(json).map_err(|e| e.to_string())?;
        let problem = Problem::new(input.sets.clone()).map_err(|e| e.to_string())?;
        Ok((input, problem))
    }
}

#[derive(Serialize)]
struct SolveOutput {
    value: f64,
    iterations: usize,
    termination: Termination,
    residual: f64,
    alpha: Option<f64>,
    start: Vec<Point>,
    points: Vec<Point>,
    /// Iterates, one configuration per update.
    path: Vec<Vec<Point>>,
    values: Vec<f64>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct CertifyOutput {
    value: f64,
    certificate: Certificate,
    diagnostics: DiagnosticsReport,
}

#[derive(Serialize)]
struct ProfileOutput {
    alphas: Vec<f64>,
    values: Vec<f64>,
    /// Minimiser found by the exact line search.
    best_alpha: f64,
    best_value: f64,
}

/// Runs the configured solver from `start`.
pub fn solve_json(json: &str) -> Result<String, String> {
    let (input, problem) = Input::parse(json)?;
    let cfg = SolverConfig::constant(1.0, input.tolerance)
        .with_step_rule(input.step_rule)
        .with_max_iterations(input.max_iterations)
        .with_aitken(input.aitken);
    let start = Configuration::new(input.start);
    let r = run_solver(&problem, &start, &cfg, input.method).map_err(|e| e.to_string())?;
    let out = SolveOutput {
        value: r.value,
        iterations: r.iterations,
        termination: r.termination,
        residual: r.residual,
        alpha: r.alpha,
        start: r.start.points,
        points: r.final_config.points,
        path: r.trace.iter().map(|t| t.points.points.clone()).collect(),
        values: r.trace.iter().map(|t| t.value).collect(),
        warnings: r.warnings,
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// Optimality certificate of `start` (taken as the candidate) plus the
/// problem diagnostics.
pub fn certify_json(json: &str) -> Result<String, String> {
    let (input, problem) = Input::parse(json)?;
    let config = Configuration::new(input.start);
    let certificate = certify_config(&problem, &config, input.tolerance.max(1e-9)).map_err(|e| e.to_string())?;
    let diagnostics = report(&problem).map_err(|e| e.to_string())?;
    let out = CertifyOutput { value: perimeter(&config), certificate, diagnostics };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

/// `φ(α) = D(P_C(a − α g))` on `samples` points of `[0, alpha_max]`, where `a`
/// is the projected start.
pub fn profile_json(json: &str, alpha_max: f64, samples: usize) -> Result<String, String> {
    let (input, problem) = Input::parse(json)?;
    let a = Configuration::new(input.start).projected(&problem).map_err(|e| e.to_string())?;
    let g = subgradient(&a).map_err(|e| e.to_string())?;
    let p = waist_core::SubgradientField { vectors: g.vectors.iter().map(|v| v.scaled(-1.0)).collect() };
    let phi = |alpha: f64| -> Result<f64, String> {
        let pts = problem
            .sets()
            .iter()
            .zip(a.points.iter().zip(&p.vectors))
            .map(|(s, (x, d))| s.project(&x.offset(d, alpha)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        Ok(perimeter(&Configuration::new(pts)))
    };
    let samples = samples.max(2);
    let alphas: Vec<f64> = (0..samples).map(|i| alpha_max * i as f64 / (samples - 1) as f64).collect();
    let values = alphas.iter().map(|x| phi(*x)).collect::<Result<Vec<_>, _>>()?;
    let best_alpha = exact_line_search(&problem, &a, &p, alpha_max).map_err(|e| e.to_string())?;
    let out = ProfileOutput { alphas, values, best_alpha, best_value: phi(best_alpha)? };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn solve(json: &str) -> Result<String, JsValue> {
    solve_json(json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn certify(json: &str) -> Result<String, JsValue> {
    certify_json(json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn line_search_profile(json: &str, alpha_max: f64, samples: usize) -> Result<String, JsValue> {
    profile_json(json, alpha_max, samples).map_err(|e| JsValue::from_str(&e))
}

use crate::geometry::Problem;
use crate::objective::{subgradient, Configuration};

use super::{projected_step, Run, SolveOutcome, SolverConfig, Termination};

/// Projected Nesterov iteration with a constant step.
pub fn nag_solve(
    problem: &Problem,
    start: &Configuration,
    alpha: f64,
    tol: f64,
    max_iter: usize,
) -> SolveOutcome {
    let cfg = SolverConfig::constant(alpha, tol).with_max_iterations(max_iter);
    nag_solve_with(problem, start, &cfg)
}

/// Projected Nesterov iteration on the stacked variable:
///
/// ```text
/// x_{k+1} = P_C(y_k − α_k g(y_k))
/// t_{k+1} = (1 + √(1 + 4 t_k²)) / 2,        t_1 = 1
/// y_{k+1} = x_{k+1} + ((t_k − 1)/t_{k+1}) (x_{k+1} − x_k)
/// ```
///
/// The stopping test and trace follow the `x` sequence. Exact line searches
/// are evaluated at `y_k`.
pub fn nag_solve_with(problem: &Problem, start: &Configuration, cfg: &SolverConfig) -> SolveOutcome {
    let mut run = Run::new(problem, start, cfg)?;
    let mut y = run.current.clone();
    let mut t = 1.0_f64;
    loop {
        let step = (|| {
            let g = subgradient(&y)?;
            let alpha = run.steps.alpha(run.iterations + 1, problem, &y, &g)?;
            projected_step(problem, &y, &g, alpha)
        })();
        let x_new = match step {
            Ok(x) => x,
            Err(e) => return Err(run.fail(e)),
        };
        let t_new = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_new;
        y = Configuration::new(
            x_new
                .points
                .iter()
                .zip(&run.current.points)
                .map(|(xn, x)| xn.offset(&(xn - x), beta))
                .collect(),
        );
        t = t_new;
        match run.advance(x_new) {
            Ok(true) => return run.finish(Termination::ToleranceMet),
            Ok(false) => {}
            Err(e) => return Err(run.fail(e)),
        }
        if run.iterations >= cfg.max_iterations {
            return run.finish(Termination::MaxIterations);
        }
    }
}

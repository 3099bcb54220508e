use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Problem};
use crate::objective::{perimeter, Configuration};

use super::{Run, SolveOutcome, SolverConfig, Termination, AITKEN_GUARD};

/// How Δ² is applied to configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AitkenVariant {
    /// Vector form on the stacked variable: one ratio for all coordinates.
    #[default]
    Stacked,
    /// Scalar formula per coordinate, see [`aitken_transform`].
    Componentwise,
}

/// Scalar Δ² applied to every coordinate of every block:
/// `s0 − (s1 − s0)² / (s2 − 2 s1 + s0)`.
///
/// Coordinates whose denominator is below `guard` in magnitude are copied
/// from `s2`. Returns `None` when every coordinate was guarded.
pub fn aitken_transform(
    s0: &Configuration,
    s1: &Configuration,
    s2: &Configuration,
    guard: f64,
) -> Option<Configuration> {
    let mut any = false;
    let points = s0
        .points
        .iter()
        .zip(&s1.points)
        .zip(&s2.points)
        .map(|((p0, p1), p2)| {
            let coords: Vec<f64> = (0..p0.dim())
                .map(|j| {
                    let den = p2[j] - 2.0 * p1[j] + p0[j];
                    if den.abs() < guard {
                        p2[j]
                    } else {
                        any = true;
                        p0[j] - (p1[j] - p0[j]) * (p1[j] - p0[j]) / den
                    }
                })
                .collect();
            Point::from(coords)
        })
        .collect();
    any.then(|| Configuration::new(points))
}

/// Vector Δ² on the stacked variable:
/// `s2 − (⟨Δs, Δ²s⟩ / ‖Δ²s‖²) Δs` with `Δs = s2 − s1`, `Δ²s = s2 − 2 s1 + s0`.
///
/// Reduces to the scalar formula in one dimension. `None` when `‖Δ²s‖ < guard`.
pub fn aitken_transform_stacked(
    s0: &Configuration,
    s1: &Configuration,
    s2: &Configuration,
    guard: f64,
) -> Option<Configuration> {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((p0, p1), p2) in s0.points.iter().zip(&s1.points).zip(&s2.points) {
        for j in 0..p0.dim() {
            let d1 = p2[j] - p1[j];
            let d2 = p2[j] - 2.0 * p1[j] + p0[j];
            num += d1 * d2;
            den += d2 * d2;
        }
    }
    if den.sqrt() < guard {
        return None;
    }
    let ratio = num / den;
    let points = s1
        .points
        .iter()
        .zip(&s2.points)
        .map(|(p1, p2)| {
            Point::from((0..p2.dim()).map(|j| p2[j] - ratio * (p2[j] - p1[j])).collect::<Vec<_>>())
        })
        .collect();
    Some(Configuration::new(points))
}

/// Projected subgradient descent with Δ² extrapolation.
///
/// After every update the last three iterates are extrapolated, projected
/// back onto the sets and the result replaces the update when it lowers `D`
/// by more than the stopping tolerance; the window then restarts from the
/// accepted point. A window whose transform is fully guarded ends the run
/// with [`Termination::StalledDenominator`].
pub fn psd_solve_aitken(problem: &Problem, start: &Configuration, cfg: &SolverConfig) -> SolveOutcome {
    let mut run = Run::new(problem, start, cfg)?;
    let mut window: Vec<Configuration> = vec![run.current.clone()];
    loop {
        let next = match run.psd_step() {
            Ok(next) => next,
            Err(e) => return Err(run.fail(e)),
        };
        let mut value = perimeter(&next);
        let mut next = next;
        window.push(next.clone());
        if window.len() > 3 {
            window.remove(0);
        }
        let mut stalled = false;
        if window.len() == 3 {
            let candidate = match cfg.aitken_variant {
                AitkenVariant::Stacked => {
                    aitken_transform_stacked(&window[0], &window[1], &window[2], AITKEN_GUARD)
                }
                AitkenVariant::Componentwise => {
                    aitken_transform(&window[0], &window[1], &window[2], AITKEN_GUARD)
                }
            };
            match candidate.map(|c| c.projected(problem)) {
                None => stalled = true,
                Some(Err(e)) => return Err(run.fail(e)),
                Some(Ok(projected)) => {
                    let v = perimeter(&projected);
                    if v < value - cfg.tolerance {
                        next = projected;
                        value = v;
                        run.accepted += 1;
                        window = vec![next.clone()];
                    }
                }
            }
        }
        match run.advance_with_value(next, value) {
            Ok(converged) => {
                if stalled {
                    return run.finish(Termination::StalledDenominator);
                }
                if converged {
                    return run.finish(Termination::ToleranceMet);
                }
            }
            Err(e) => return Err(run.fail(e)),
        }
        if run.iterations >= cfg.max_iterations {
            return run.finish(Termination::MaxIterations);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> Configuration {
        Configuration::new(vec![Point::from([v, v]), Point::from([v, -v])])
    }

    #[test]
    fn exact_on_geometric_sequences() {
        let s = [6.0, 5.5, 5.25];
        let t = aitken_transform(&scalar(s[0]), &scalar(s[1]), &scalar(s[2]), 1e-12).unwrap();
        assert_eq!(t.points[0], Point::from([5.0, 5.0]));
        assert_eq!(t.points[1], Point::from([5.0, -5.0]));
        let t = aitken_transform_stacked(&scalar(s[0]), &scalar(s[1]), &scalar(s[2]), 1e-12).unwrap();
        assert_eq!(t.points[0], Point::from([5.0, 5.0]));
    }

    #[test]
    fn constant_window_is_stalled() {
        let c = scalar(3.0);
        assert!(aitken_transform(&c, &c, &c, 1e-12).is_none());
        assert!(aitken_transform_stacked(&c, &c, &c, 1e-12).is_none());
    }

    #[test]
    fn guarded_coordinates_pass_through() {
        let s0 = Configuration::new(vec![Point::from([6.0, 1.0])]);
        let s1 = Configuration::new(vec![Point::from([5.5, 1.0])]);
        let s2 = Configuration::new(vec![Point::from([5.25, 1.0])]);
        let t = aitken_transform(&s0, &s1, &s2, 1e-12).unwrap();
        assert_eq!(t.points[0], Point::from([5.0, 1.0]));
    }
}

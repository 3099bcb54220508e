//! The cyclic perimeter, its block subgradients and the optimality residual.

use serde::{Deserialize, Serialize};

use crate::geometry::{Point, Problem};
use crate::{Error, Result, MEMBERSHIP_TOL};

/// One point per set, `points[i]` paired with set `i`.
///
/// `feasible` is bookkeeping set by whoever produced the configuration (the
/// solver, or [`Configuration::projected`]); constructors do not check it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub points: Vec<Point>,
    #[serde(default)]
    pub feasible: bool,
}

/// Block subgradients `g_i = unit(a_i − a_{i−1}) + unit(a_i − a_{i+1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgradientField {
    pub vectors: Vec<Point>,
}

impl Configuration {
    pub fn new(points: Vec<Point>) -> Self {
        Configuration { points, feasible: false }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks length and dimensions against `problem`.
    pub fn check_shape(&self, problem: &Problem) -> Result<()> {
        if self.len() != problem.len() {
            return Err(Error::InvalidProblem(format!(
                "configuration has {} points for {} sets",
                self.len(),
                problem.len()
            )));
        }
        for p in &self.points {
            if p.dim() != problem.dimension() {
                return Err(Error::DimensionMismatch {
                    expected: problem.dimension(),
                    found: p.dim(),
                });
            }
            if !p.is_finite() {
                return Err(Error::NonFinite("configuration"));
            }
        }
        Ok(())
    }

    /// Block-wise projection onto the sets.
    pub fn projected(&self, problem: &Problem) -> Result<Configuration> {
        self.check_shape(problem)?;
        let points = problem
            .sets()
            .iter()
            .zip(&self.points)
            .map(|(set, p)| set.project(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Configuration { points, feasible: true })
    }

    /// Errors with the first point lying farther than `tol` from its set.
    pub fn check_feasible(&self, problem: &Problem, tol: f64) -> Result<()> {
        self.check_shape(problem)?;
        for (index, (set, p)) in problem.sets().iter().zip(&self.points).enumerate() {
            let distance = set.distance_to(p)?;
            if distance > tol {
                return Err(Error::Infeasible { index, distance });
            }
        }
        Ok(())
    }
}

impl From<Vec<Point>> for Configuration {
    fn from(points: Vec<Point>) -> Self {
        Configuration::new(points)
    }
}

/// `Σ ‖a_i − a_{i+1}‖` with `a_{m+1} = a_1`.
pub fn perimeter(config: &Configuration) -> f64 {
    let pts = &config.points;
    let m = pts.len();
    (0..m).map(|i| pts[i].distance(&pts[(i + 1) % m])).sum()
}

/// Block subgradients of the perimeter; fails where adjacent points coincide.
pub fn subgradient(config: &Configuration) -> Result<SubgradientField> {
    let pts = &config.points;
    let m = pts.len();
    let vectors = (0..m)
        .map(|i| {
            let u = &pts[i] - &pts[(i + m - 1) % m];
            let v = &pts[i] - &pts[(i + 1) % m];
            let (nu, nv) = (u.norm(), v.norm());
            if nu == 0.0 || nv == 0.0 {
                return Err(Error::NonsmoothPoint { index: i });
            }
            Ok(Point::from(
                u.coords()
                    .iter()
                    .zip(v.coords())
                    .map(|(a, b)| a / nu + b / nv)
                    .collect::<Vec<_>>(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubgradientField { vectors })
}

impl SubgradientField {
    /// `‖Σ_i (−g_i)‖`; vanishes at every optimum.
    pub fn normal_sum_norm(&self) -> f64 {
        let dim = self.vectors.first().map_or(0, Point::dim);
        let mut sum = Point::zeros(dim);
        for g in &self.vectors {
            sum = &sum - g;
        }
        sum.norm()
    }

    /// Joint Euclidean norm over all blocks.
    pub fn norm(&self) -> f64 {
        self.vectors.iter().map(|g| g.dot(g)).sum::<f64>().sqrt()
    }
}

/// `max_i dist(−g_i, N_{C_i}(a_i))`; zero exactly at optimal configurations.
pub fn optimality_residual(problem: &Problem, config: &Configuration) -> Result<f64> {
    optimality_residual_tol(problem, config, MEMBERSHIP_TOL)
}

/// Residual with an explicit membership tolerance, for configurations known
/// only to a few decimals (feasibility and boundary tests both use `tol`).
pub fn optimality_residual_tol(problem: &Problem, config: &Configuration, tol: f64) -> Result<f64> {
    let field = block_residuals_tol(problem, config, tol)?;
    Ok(field.into_iter().fold(0.0, f64::max))
}

/// Per-block normal-cone distances of `−g_i`.
pub fn block_residuals(problem: &Problem, config: &Configuration) -> Result<Vec<f64>> {
    block_residuals_tol(problem, config, MEMBERSHIP_TOL)
}

pub fn block_residuals_tol(problem: &Problem, config: &Configuration, tol: f64) -> Result<Vec<f64>> {
    config.check_feasible(problem, tol)?;
    let g = subgradient(config)?;
    problem
        .sets()
        .iter()
        .zip(&config.points)
        .zip(&g.vectors)
        .map(|((set, a), gi)| set.normal_cone_distance_tol(a, &gi.scaled(-1.0), tol))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexSet;

    fn cfg(pts: &[[f64; 2]]) -> Configuration {
        Configuration::new(pts.iter().map(|p| Point::from(*p)).collect())
    }

    fn discs() -> Problem {
        Problem::new(vec![
            ConvexSet::ball(Point::from([2.0, 3.0]), 1.0).unwrap(),
            ConvexSet::ball(Point::from([8.0, 4.0]), 2.0).unwrap(),
            ConvexSet::ball(Point::from([4.0, 11.0]), 3.0).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn perimeter_examples() {
        let start = cfg(&[[1.0, 3.0], [10.0, 4.0], [1.0, 11.0]]);
        assert!((perimeter(&start) - 28.45714).abs() < 1e-5);
        assert_eq!(perimeter(&cfg(&[[7.0, 7.0], [7.0, 7.0], [7.0, 7.0]])), 0.0);
        assert_eq!(perimeter(&cfg(&[[0.0, 0.0], [3.0, 4.0]])), 10.0);
    }

    #[test]
    fn subgradient_examples() {
        let g = subgradient(&cfg(&[[0.0, 0.0], [-1.0, 0.0], [1.0, 0.0]])).unwrap();
        assert_eq!(g.vectors[0], Point::from([0.0, 0.0]));

        let h = 3f64.sqrt() / 2.0;
        let g = subgradient(&cfg(&[[0.0, 0.0], [1.0, 0.0], [0.5, h]])).unwrap();
        assert!((g.vectors[0][0] + 1.5).abs() < 1e-12);
        assert!((g.vectors[0][1] + h).abs() < 1e-12);

        let g = subgradient(&cfg(&[[0.0, 0.0], [3.0, 4.0]])).unwrap();
        assert!((g.vectors[0][0] + 1.2).abs() < 1e-12);
        assert!((g.vectors[0][1] + 1.6).abs() < 1e-12);
    }

    #[test]
    fn coincident_neighbours_are_refused() {
        let err = subgradient(&cfg(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]])).unwrap_err();
        assert_eq!(err, Error::NonsmoothPoint { index: 0 });
        assert!(err.to_string().contains("nonsmooth point: adjacent points coincide"));
    }

    #[test]
    fn residual_examples() {
        let p = discs();
        let rounded_optimum =
            cfg(&[[2.72315, 3.69069], [6.14044, 4.73623], [4.26533, 8.01176]]);
        // five decimals: membership to 1e-5; at 1e-9 the rounded
        // points count as interior
        assert!(optimality_residual(&p, &rounded_optimum).unwrap() > 1.0);
        assert!(optimality_residual_tol(&p, &rounded_optimum, 1e-5).unwrap() <= 1e-3);

        let start = cfg(&[[1.0, 3.0], [10.0, 4.0], [1.0, 11.0]]);
        assert!(optimality_residual(&p, &start).unwrap() > 0.1);

        let interior = cfg(&[[2.0, 3.0], [8.0, 4.0], [4.0, 11.0]]);
        let g = subgradient(&interior).unwrap();
        let res = block_residuals(&p, &interior).unwrap();
        for (r, gi) in res.iter().zip(&g.vectors) {
            assert!((r - gi.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_ball_residual_vanishes() {
        let p = Problem::new(vec![
            ConvexSet::ball(Point::from([0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::ball(Point::from([5.0, 0.0]), 1.0).unwrap(),
        ])
        .unwrap();
        let a = cfg(&[[1.0, 0.0], [4.0, 0.0]]);
        assert!(optimality_residual(&p, &a).unwrap() <= 1e-12);
    }

    #[test]
    fn infeasible_configuration_is_an_error() {
        let far = cfg(&[[0.0, 0.0], [8.0, 4.0], [4.0, 11.0]]);
        assert!(matches!(
            optimality_residual(&discs(), &far),
            Err(Error::Infeasible { index: 0, .. })
        ));
    }
}

//! Hypothesis checks and optimality certificates.
//!
//! General position (each set disjoint from the convex hull of the others)
//! is tested on deterministic boundary samples. The sampled hull is an inner
//! approximation, so a hit is a proof of violation while a clearance is only
//! accepted when it exceeds the sampling margin; anything in between is
//! reported as unknown.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::geometry::{set_distance, ConvexSet, Point, Problem};
use crate::objective::{block_residuals_tol, subgradient, Configuration};
use crate::oracle::golden_min;
use crate::{Result, MEMBERSHIP_TOL};

const FW_ITERATIONS: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneralPosition {
    Verified,
    Violated,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub pairwise_disjoint: bool,
    pub min_pairwise_distance: f64,
    pub general_position: Vec<GeneralPosition>,
    pub strictly_convex: Vec<bool>,
    pub bounded: Vec<bool>,
    pub uniqueness_expected: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub certified: bool,
    pub residual: f64,
    pub block_residuals: Vec<f64>,
    /// `‖Σ_i (−g_i)‖`.
    pub normal_sum_norm: f64,
    /// Per point: angles (radians) between the outward normal and the edges
    /// to the previous and next point. `None` where the normal cone holds no
    /// direction of `−g_i` (interior points).
    pub incidence_angles: Vec<Option<(f64, f64)>>,
}

/// `(all pairwise set distances > 1e-9, smallest pairwise distance)`.
pub fn check_pairwise_disjoint(problem: &Problem) -> Result<(bool, f64)> {
    let mut min = f64::INFINITY;
    for i in 0..problem.len() {
        for j in i + 1..problem.len() {
            min = min.min(set_distance(problem.set(i), problem.set(j))?.distance);
        }
    }
    Ok((min > MEMBERSHIP_TOL, min))
}

/// Boundary samples of a bounded set and the radius within which they cover it.
fn samples(set: &ConvexSet, n: usize) -> Option<(Vec<Point>, f64)> {
    Some(match set {
        ConvexSet::Ball { center, radius } => match center.dim() {
            2 => {
                let pts = (0..n)
                    .map(|k| {
                        let (s, c) = (TAU * k as f64 / n as f64).sin_cos();
                        Point::from([center[0] + radius * c, center[1] + radius * s])
                    })
                    .collect();
                (pts, 2.0 * radius * (PI / (2.0 * n as f64)).sin())
            }
            3 => {
                let n_phi = n / 2 + 1;
                let mut pts = Vec::with_capacity(n * n_phi);
                for j in 0..n_phi {
                    let (sp, cp) = (PI * j as f64 / (n_phi - 1) as f64).sin_cos();
                    for k in 0..n {
                        let (st, ct) = (TAU * k as f64 / n as f64).sin_cos();
                        pts.push(Point::from([
                            center[0] + radius * sp * ct,
                            center[1] + radius * sp * st,
                            center[2] + radius * cp,
                        ]));
                    }
                }
                let d_phi = PI / (n_phi - 1) as f64;
                let d_theta = TAU / n as f64;
                (pts, radius * (d_phi + d_theta))
            }
            _ => return None,
        },
        ConvexSet::AxisBox { lo, hi } => {
            let d = lo.dim();
            if d > 16 {
                return None;
            }
            let pts = (0..1usize << d)
                .map(|mask| {
                    Point::from(
                        (0..d)
                            .map(|j| if mask >> j & 1 == 1 { hi[j] } else { lo[j] })
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            (pts, 0.0)
        }
        ConvexSet::Segment { p, q } => (vec![p.clone(), q.clone()], 0.0),
        ConvexSet::Polygon2D { vertices } => (vertices.clone(), 0.0),
        ConvexSet::Line { .. } | ConvexSet::Halfspace { .. } => return None,
    })
}

/// Per-set verdict on `C_i ∩ conv(∪_{j≠i} C_j) = ∅`.
///
/// The hull of the samples of the other sets is searched for the point
/// closest to `C_i` with Frank–Wolfe; its duality gap turns the best value
/// into a certified lower bound. The set is verified when that bound exceeds
/// the largest sample covering radius (the distance to `C_i` is
/// 1-Lipschitz), violated when the hull reaches `C_i`.
pub fn check_general_position(problem: &Problem, samples_per_set: usize) -> Vec<GeneralPosition> {
    let n = samples_per_set.max(8);
    let m = problem.len();
    if m == 2 {
        let disjoint = set_distance(problem.set(0), problem.set(1))
            .map(|d| d.distance > MEMBERSHIP_TOL)
            .unwrap_or(false);
        let verdict = if disjoint { GeneralPosition::Verified } else { GeneralPosition::Violated };
        return vec![verdict; 2];
    }
    let sampled: Vec<Option<(Vec<Point>, f64)>> = problem.sets().iter().map(|s| samples(s, n)).collect();
    (0..m)
        .map(|i| {
            let mut pts = Vec::new();
            let mut margin: f64 = 0.0;
            for (j, s) in sampled.iter().enumerate() {
                if j == i {
                    continue;
                }
                match s {
                    Some((p, h)) => {
                        pts.extend(p.iter().cloned());
                        margin = margin.max(*h);
                    }
                    None => return GeneralPosition::Unknown,
                }
            }
            hull_verdict(problem.set(i), &pts, margin)
        })
        .collect()
}

fn hull_verdict(set: &ConvexSet, pts: &[Point], margin: f64) -> GeneralPosition {
    let dist = |y: &Point| set.distance_to(y).unwrap_or(f64::INFINITY);
    let dists: Vec<f64> = pts.iter().map(dist).collect();
    if dists.iter().any(|d| *d <= MEMBERSHIP_TOL) {
        return GeneralPosition::Violated;
    }
    let start = dists
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .expect("at least one sample");
    let mut y = pts[start].clone();
    let mut fy = dists[start];
    for _ in 0..FW_ITERATIONS {
        let proj = match set.project(&y) {
            Ok(p) => p,
            Err(_) => return GeneralPosition::Unknown,
        };
        let grad = (&y - &proj).scaled(1.0 / fy);
        let (s, _) = pts
            .iter()
            .map(|p| (p, grad.dot(p)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one sample");
        let gap = grad.dot(&(&y - s));
        if fy - gap > margin {
            return GeneralPosition::Verified;
        }
        if gap <= 1e-13 {
            break;
        }
        let dir = s - &y;
        let (t, ft) = golden_min(|t| dist(&y.offset(&dir, t)), 0.0, 1.0);
        if ft >= fy {
            break;
        }
        y = y.offset(&dir, t);
        fy = ft;
        if fy <= MEMBERSHIP_TOL {
            return GeneralPosition::Violated;
        }
    }
    GeneralPosition::Unknown
}

/// Checks the optimality condition `−g_i ∈ N_{C_i}(a_i)` for every block.
///
/// Feasibility and boundary detection use `max(tol, 1e-9)`, so configurations
/// given to a few decimals can be certified at a matching tolerance.
pub fn certify(problem: &Problem, config: &Configuration, tol: f64) -> Result<Certificate> {
    let member_tol = tol.max(MEMBERSHIP_TOL);
    let block_residuals = block_residuals_tol(problem, config, member_tol)?;
    let residual = block_residuals.iter().copied().fold(0.0, f64::max);
    let g = subgradient(config)?;
    let m = config.len();
    let mut incidence_angles = Vec::with_capacity(m);
    for i in 0..m {
        let a = &config.points[i];
        let n = problem
            .set(i)
            .normal_cone_projection_tol(a, &g.vectors[i].scaled(-1.0), member_tol)?;
        incidence_angles.push(n.normalized().map(|n| {
            let angle = |b: &Point| {
                let e = (b - a).normalized().expect("adjacent points are distinct");
                e.dot(&n).clamp(-1.0, 1.0).acos()
            };
            (angle(&config.points[(i + m - 1) % m]), angle(&config.points[(i + 1) % m]))
        }));
    }
    Ok(Certificate {
        certified: residual <= tol,
        residual,
        block_residuals,
        normal_sum_norm: g.normal_sum_norm(),
        incidence_angles,
    })
}

/// Full hypothesis census for `problem`.
pub fn report(problem: &Problem) -> Result<DiagnosticsReport> {
    let (pairwise_disjoint, min_pairwise_distance) = check_pairwise_disjoint(problem)?;
    let general_position = check_general_position(problem, 256);
    let strictly_convex: Vec<bool> = problem.sets().iter().map(ConvexSet::is_strictly_convex).collect();
    let bounded: Vec<bool> = problem.sets().iter().map(ConvexSet::is_bounded).collect();
    let uniqueness_expected = general_position.iter().all(|g| *g == GeneralPosition::Verified)
        && strictly_convex.iter().all(|s| *s);

    let mut notes = Vec::new();
    if !pairwise_disjoint {
        notes.push(format!(
            "sets are not pairwise disjoint (min distance {min_pairwise_distance:e}); \
             the optimality certificate does not apply"
        ));
    }
    if let Some(i) = bounded.iter().position(|b| !b) {
        notes.push(format!(
            "set {i} is unbounded: existence of a minimiser needs a growth condition \
             (e.g. all but one set bounded); not checked"
        ));
    }
    for (i, g) in general_position.iter().enumerate() {
        match g {
            GeneralPosition::Violated => notes.push(format!(
                "set {i} meets the convex hull of the other sets; optimal points need not lie on boundaries"
            )),
            GeneralPosition::Unknown => notes.push(format!("general position of set {i} could not be decided")),
            GeneralPosition::Verified => {}
        }
    }
    if !uniqueness_expected {
        let any_strict = strictly_convex.iter().any(|s| *s);
        notes.push(if any_strict {
            "uniqueness is only claimed when every set is strictly convex and in general position; \
             with some sets strictly convex it is plausible but not asserted"
                .to_string()
        } else {
            "no set is strictly convex: several optimal configurations may exist".to_string()
        });
    }
    Ok(DiagnosticsReport {
        pairwise_disjoint,
        min_pairwise_distance,
        general_position,
        strictly_convex,
        bounded,
        uniqueness_expected,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ball(c: &[f64], r: f64) -> ConvexSet {
        ConvexSet::ball(Point::from(c.to_vec()), r).unwrap()
    }

    fn discs() -> Problem {
        Problem::new(vec![ball(&[2.0, 3.0], 1.0), ball(&[8.0, 4.0], 2.0), ball(&[4.0, 11.0], 3.0)]).unwrap()
    }

    #[test]
    fn disjointness_examples() {
        let p = discs();
        let (ok, d) = check_pairwise_disjoint(&p).unwrap();
        assert!(ok);
        // the closest pair is C2, C3: sqrt(65) - 5 < sqrt(37) - 3
        assert!((d - (65f64.sqrt() - 5.0)).abs() < 1e-9);
        let d12 = set_distance(p.set(0), p.set(1)).unwrap().distance;
        assert!((d12 - (37f64.sqrt() - 3.0)).abs() < 1e-9);

        let p = Problem::new(vec![ball(&[0.0, 0.0], 1.0), ball(&[1.0, 0.0], 1.0)]).unwrap();
        assert_eq!(check_pairwise_disjoint(&p).unwrap(), (false, 0.0));

        let lines = Problem::new(vec![
            ConvexSet::line(Point::from([0.0, 0.0]), Point::from([1.0, 0.0])).unwrap(),
            ConvexSet::line(Point::from([0.0, 2.0]), Point::from([1.0, 0.0])).unwrap(),
        ])
        .unwrap();
        let (ok, d) = check_pairwise_disjoint(&lines).unwrap();
        assert!(ok && (d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn general_position_examples() {
        assert_eq!(check_general_position(&discs(), 256), vec![GeneralPosition::Verified; 3]);

        let collinear =
            Problem::new(vec![ball(&[0.0, 0.0], 1.0), ball(&[5.0, 0.0], 1.0), ball(&[10.0, 0.0], 1.0)])
                .unwrap();
        assert_eq!(check_general_position(&collinear, 64)[1], GeneralPosition::Violated);

        let two = Problem::new(vec![ball(&[0.0, 0.0], 1.0), ball(&[5.0, 0.0], 1.0)]).unwrap();
        assert_eq!(check_general_position(&two, 8), vec![GeneralPosition::Verified; 2]);
    }

    #[test]
    fn violated_without_a_sample_inside() {
        // no vertex of the outer squares lies in the middle ball; the hull does
        let sq = |x: f64| {
            ConvexSet::axis_box(Point::from([x, -1.0]), Point::from([x + 2.0, 1.0])).unwrap()
        };
        let p = Problem::new(vec![sq(0.0), ball(&[5.0, 0.0], 0.5), sq(8.0)]).unwrap();
        assert_eq!(check_general_position(&p, 16)[1], GeneralPosition::Violated);
    }

    #[test]
    fn unbounded_neighbours_are_unknown() {
        let p = Problem::new(vec![
            ball(&[0.0, 0.0], 1.0),
            ConvexSet::line(Point::from([0.0, 5.0]), Point::from([1.0, 0.0])).unwrap(),
            ball(&[3.0, -4.0], 1.0),
        ])
        .unwrap();
        let gp = check_general_position(&p, 32);
        assert_eq!(gp[0], GeneralPosition::Unknown);
        assert_eq!(gp[2], GeneralPosition::Unknown);
        let r = report(&p).unwrap();
        assert!(!r.uniqueness_expected);
        assert!(r.notes.iter().any(|n| n.contains("unbounded")));
    }

    #[test]
    fn spheres_are_verified() {
        let p = Problem::new(vec![
            ball(&[2.0, 3.0, -1.0], 2.0),
            ball(&[4.0, -2.0, 1.0], 2.0),
            ball(&[6.0, 3.0, 2.0], 2.0),
        ])
        .unwrap();
        assert_eq!(check_general_position(&p, 256), vec![GeneralPosition::Verified; 3]);
        assert!(report(&p).unwrap().uniqueness_expected);
    }

    #[test]
    fn certificate_examples() {
        let p = discs();
        let rounded = Configuration::new(vec![
            Point::from([2.72315, 3.69069]),
            Point::from([6.14044, 4.73623]),
            Point::from([4.26533, 8.01176]),
        ]);
        let c = certify(&p, &rounded, 1e-3).unwrap();
        assert!(c.certified);
        for (a, b) in c.incidence_angles.iter().map(|x| x.unwrap()) {
            assert!((a - b).abs() < 0.01);
        }

        let start = Configuration::new(vec![
            Point::from([1.0, 3.0]),
            Point::from([10.0, 4.0]),
            Point::from([1.0, 11.0]),
        ]);
        assert!(!certify(&p, &start, 1e-3).unwrap().certified);

        let two = Problem::new(vec![ball(&[0.0, 0.0], 1.0), ball(&[5.0, 0.0], 1.0)]).unwrap();
        let opt = Configuration::new(vec![Point::from([1.0, 0.0]), Point::from([4.0, 0.0])]);
        let c = certify(&two, &opt, 1e-12).unwrap();
        assert!(c.certified);
        assert_eq!(c.incidence_angles, vec![Some((0.0, 0.0)); 2]);
    }
}

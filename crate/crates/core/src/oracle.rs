//! Exhaustive boundary-grid minimiser used as an independent check on the
//! solvers.
//!
//! Every set is replaced by a chart of its boundary (circle and sphere by
//! angles, segment and line by an affine parameter, polygon by normalised arc
//! length). The exact minimum over the product of the sampled charts is found
//! by a dynamic program around the cycle, then polished by cyclic coordinate
//! descent on the chart parameters. Grids are nested: the grid at resolution
//! `2N` contains the grid at resolution `N` point for point.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::diagnostics::{check_general_position, GeneralPosition};
use crate::geometry::{ConvexSet, Point, Problem};
use crate::objective::{perimeter, Configuration};
use crate::{Error, Result};

const REFINE_STOP: f64 = 1e-10;
const GOLDEN_WIDTH: f64 = 1e-12;
const SEED_RESOLUTION: usize = 16;

/// Parameterisation of one set's boundary.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryChart {
    Circle { center: Point, radius: f64 },
    Sphere { center: Point, radius: f64 },
    Segment { p: Point, q: Point },
    Line { base: Point, direction: Point, window: f64 },
    /// Counterclockwise closed polyline parameterised by arc length in `[0, 1)`.
    Polygon { vertices: Vec<Point>, cumulative: Vec<f64> },
    Fixed { point: Point },
}

/// Range and topology of one chart parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Axis {
    lo: f64,
    hi: f64,
    periodic: bool,
}

impl BoundaryChart {
    /// Chart for `problem.set(index)`; lines are truncated to
    /// `[−W, W]`, `W = 10 × problem.diameter()`.
    pub fn for_set(problem: &Problem, index: usize) -> Result<Self> {
        let unchartable = |reason: &str| Error::Unchartable { index, reason: reason.to_string() };
        Ok(match problem.set(index) {
            ConvexSet::Ball { center, radius } => match center.dim() {
                2 => BoundaryChart::Circle { center: center.clone(), radius: *radius },
                3 => BoundaryChart::Sphere { center: center.clone(), radius: *radius },
                _ => return Err(unchartable("balls are charted in dimensions 2 and 3 only")),
            },
            ConvexSet::Segment { p, q } => BoundaryChart::Segment { p: p.clone(), q: q.clone() },
            ConvexSet::Line { base, direction } => BoundaryChart::Line {
                base: base.clone(),
                direction: direction.clone(),
                window: 10.0 * problem.diameter(),
            },
            ConvexSet::Polygon2D { vertices } => BoundaryChart::polygon(vertices.clone()),
            ConvexSet::AxisBox { lo, hi } => {
                if lo.dim() != 2 {
                    return Err(unchartable("boxes are charted in dimension 2 only"));
                }
                match (lo[0] < hi[0], lo[1] < hi[1]) {
                    (true, true) => BoundaryChart::polygon(vec![
                        Point::from([lo[0], lo[1]]),
                        Point::from([hi[0], lo[1]]),
                        Point::from([hi[0], hi[1]]),
                        Point::from([lo[0], hi[1]]),
                    ]),
                    (false, false) => BoundaryChart::Fixed { point: lo.clone() },
                    _ => BoundaryChart::Segment { p: lo.clone(), q: hi.clone() },
                }
            }
            ConvexSet::Halfspace { .. } => return Err(unchartable("halfspace boundaries are unbounded")),
        })
    }

    fn polygon(vertices: Vec<Point>) -> Self {
        let n = vertices.len();
        let mut cumulative = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for i in 0..n {
            acc += vertices[i].distance(&vertices[(i + 1) % n]);
            cumulative.push(acc);
        }
        BoundaryChart::Polygon { vertices, cumulative }
    }

    pub fn parameter_dim(&self) -> usize {
        self.axes().len()
    }

    fn axes(&self) -> Vec<Axis> {
        let periodic = |hi| Axis { lo: 0.0, hi, periodic: true };
        let closed = |lo, hi| Axis { lo, hi, periodic: false };
        match self {
            BoundaryChart::Circle { .. } => vec![periodic(TAU)],
            BoundaryChart::Sphere { .. } => vec![periodic(TAU), closed(0.0, PI)],
            BoundaryChart::Segment { .. } => vec![closed(0.0, 1.0)],
            BoundaryChart::Line { window, .. } => vec![closed(-window, *window)],
            BoundaryChart::Polygon { .. } => vec![periodic(1.0)],
            BoundaryChart::Fixed { .. } => vec![],
        }
    }

    /// Boundary point at the given parameters.
    pub fn point(&self, params: &[f64]) -> Point {
        match self {
            BoundaryChart::Circle { center, radius } => {
                let (s, c) = params[0].sin_cos();
                Point::from([center[0] + radius * c, center[1] + radius * s])
            }
            BoundaryChart::Sphere { center, radius } => {
                let (st, ct) = params[0].sin_cos();
                let (sp, cp) = params[1].sin_cos();
                Point::from([
                    center[0] + radius * sp * ct,
                    center[1] + radius * sp * st,
                    center[2] + radius * cp,
                ])
            }
            BoundaryChart::Segment { p, q } => p.offset(&(q - p), params[0]),
            BoundaryChart::Line { base, direction, .. } => base.offset(direction, params[0]),
            BoundaryChart::Polygon { vertices, cumulative } => {
                let n = vertices.len();
                let total = cumulative[n];
                let s = params[0].rem_euclid(1.0) * total;
                let i = cumulative[1..].partition_point(|c| *c <= s).min(n - 1);
                let len = cumulative[i + 1] - cumulative[i];
                let t = ((s - cumulative[i]) / len).clamp(0.0, 1.0);
                let (a, b) = (&vertices[i], &vertices[(i + 1) % n]);
                a.offset(&(b - a), t)
            }
            BoundaryChart::Fixed { point } => point.clone(),
        }
    }

    /// Grid parameters at resolution `n`, one vector per sample.
    fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let nf = n as f64;
        let periodic: Vec<f64> = (0..n).map(|i| i as f64 / nf).collect();
        let closed: Vec<f64> = (0..=n).map(|i| i as f64 / nf).collect();
        match self {
            BoundaryChart::Circle { .. } => periodic.iter().map(|u| vec![TAU * u]).collect(),
            BoundaryChart::Sphere { .. } => {
                let mut out = Vec::with_capacity(n * (n + 1));
                for u in &periodic {
                    for v in &closed {
                        out.push(vec![TAU * u, PI * v]);
                    }
                }
                out
            }
            BoundaryChart::Segment { .. } => closed.iter().map(|u| vec![*u]).collect(),
            BoundaryChart::Line { window, .. } => {
                (0..=n).map(|j| vec![window * (2 * j as i64 - n as i64) as f64 / nf]).collect()
            }
            BoundaryChart::Polygon { .. } => periodic.iter().map(|u| vec![*u]).collect(),
            BoundaryChart::Fixed { .. } => vec![vec![]],
        }
    }

    fn spacing(&self, n: usize) -> Vec<f64> {
        self.axes()
            .iter()
            .map(|a| (a.hi - a.lo) / n as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Value after refinement.
    pub value: f64,
    pub configuration: Configuration,
    /// Exact minimum over the sampled boundary grid.
    pub grid_value: f64,
    pub grid_configuration: Configuration,
    pub parameters: Vec<Vec<f64>>,
    pub resolution: usize,
}

/// Boundary-grid minimum followed by `refine_rounds` rounds of coordinate descent.
pub fn brute_force_min(problem: &Problem, resolution: usize, refine_rounds: usize) -> Result<OracleResult> {
    if resolution < 4 {
        return Err(Error::InvalidConfig(format!("oracle resolution must be >= 4, got {resolution}")));
    }
    let charts = (0..problem.len())
        .map(|i| BoundaryChart::for_set(problem, i))
        .collect::<Result<Vec<_>>>()?;
    let (grid_value, grid_params) = grid_minimum(&charts, resolution);
    let grid_configuration = configuration(&charts, &grid_params);
    let mut params = grid_params;
    let mut value = grid_value;
    let spacing: Vec<Vec<f64>> = charts.iter().map(|c| c.spacing(resolution)).collect();
    for _ in 0..refine_rounds {
        let mut max_change: f64 = 0.0;
        for i in 0..charts.len() {
            let axes = charts[i].axes();
            for (p, axis) in axes.iter().enumerate() {
                let current = params[i][p];
                let (mut lo, mut hi) = (current - spacing[i][p], current + spacing[i][p]);
                if !axis.periodic {
                    lo = lo.max(axis.lo);
                    hi = hi.min(axis.hi);
                }
                let objective = |x: f64| {
                    let mut trial = params.clone();
                    trial[i][p] = x;
                    perimeter(&configuration(&charts, &trial))
                };
                let (x, v) = golden_min(objective, lo, hi);
                if v < value {
                    max_change = max_change.max((x - current).abs());
                    params[i][p] = x;
                    value = v;
                }
            }
        }
        if max_change < REFINE_STOP {
            break;
        }
    }
    let mut configuration = configuration(&charts, &params);
    configuration.feasible = true;
    Ok(OracleResult {
        value,
        configuration,
        grid_value,
        grid_configuration,
        parameters: params,
        resolution,
    })
}

/// Oracle outcome together with a solver-seeded candidate when the
/// boundary restriction is not known to be valid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Adjudication {
    pub boundary: OracleResult,
    pub general_position_verified: bool,
    /// Perimeter of the (projected) seed, reported when general position is not verified.
    pub seeded_value: Option<f64>,
    /// Best of the values above.
    pub value: f64,
}

/// Runs [`brute_force_min`]; if general position is not verified for every
/// set, also evaluates `seed` (typically a solver result) and reports both.
pub fn adjudicate(
    problem: &Problem,
    resolution: usize,
    refine_rounds: usize,
    seed: Option<&Configuration>,
) -> Result<Adjudication> {
    let boundary = brute_force_min(problem, resolution, refine_rounds)?;
    let verified = check_general_position(problem, 256)
        .iter()
        .all(|g| *g == GeneralPosition::Verified);
    let seeded_value = match (verified, seed) {
        (false, Some(seed)) => Some(perimeter(&seed.projected(problem)?)),
        _ => None,
    };
    let value = seeded_value.map_or(boundary.value, |s| s.min(boundary.value));
    Ok(Adjudication { boundary, general_position_verified: verified, seeded_value, value })
}

fn configuration(charts: &[BoundaryChart], params: &[Vec<f64>]) -> Configuration {
    Configuration::new(charts.iter().zip(params).map(|(c, p)| c.point(p)).collect())
}

/// Golden-section minimisation of `f` on `[lo, hi]` to width 1e-12.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_WIDTH {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Exact minimum of the perimeter over the product of chart grids.
///
/// Upper bound `U` comes from the nested coarser grid. Since the perimeter
/// of a closed chain is at least twice the distance between any two of its
/// points, for a fixed first point only samples within `U/2` of it can take
/// part in a chain of perimeter `≤ U`; the dynamic program runs on those.
/// Nothing with perimeter `≤ U` is discarded, so the result is the exact grid
/// minimum. Ties keep the first candidate in index order.
fn grid_minimum(charts: &[BoundaryChart], resolution: usize) -> (f64, Vec<Vec<f64>>) {
    let grids: Vec<Vec<Vec<f64>>> = charts.iter().map(|c| c.grid(resolution)).collect();
    let points: Vec<Vec<Point>> = charts
        .iter()
        .zip(&grids)
        .map(|(c, g)| g.iter().map(|p| c.point(p)).collect())
        .collect();

    let bound = if resolution >= 2 * SEED_RESOLUTION && resolution.is_multiple_of(2) {
        grid_minimum(charts, resolution / 2).0
    } else {
        f64::INFINITY
    };

    let (value, indices) = cycle_dp(&points, bound);
    let params = indices.iter().zip(&grids).map(|(i, g)| g[*i].clone()).collect();
    (value, params)
}

fn cycle_dp(points: &[Vec<Point>], bound: f64) -> (f64, Vec<usize>) {
    let m = points.len();
    let radius = 0.5 * bound * (1.0 + 1e-9);
    let mut best = f64::INFINITY;
    let mut best_idx: Vec<usize> = Vec::new();

    for (i0, p0) in points[0].iter().enumerate() {
        let near: Vec<Vec<usize>> = points[1..]
            .iter()
            .map(|g| (0..g.len()).filter(|&k| !(p0.distance(&g[k]) > radius)).collect())
            .collect();
        if near.iter().any(Vec::is_empty) {
            continue;
        }
        // cost[j][k]: cheapest path p0 -> ... -> points[j + 1][near[j][k]]
        let mut cost: Vec<Vec<f64>> = Vec::with_capacity(m - 1);
        let mut back: Vec<Vec<usize>> = Vec::with_capacity(m - 1);
        cost.push(near[0].iter().map(|&k| p0.distance(&points[1][k])).collect());
        back.push(Vec::new());
        for j in 1..m - 1 {
            let prev = &points[j];
            let cur = &points[j + 1];
            let mut c = vec![f64::INFINITY; near[j].len()];
            let mut b = vec![0usize; near[j].len()];
            for (l, &li) in near[j].iter().enumerate() {
                let q = &cur[li];
                for (k, &ki) in near[j - 1].iter().enumerate() {
                    let v = cost[j - 1][k] + prev[ki].distance(q);
                    if v < c[l] {
                        c[l] = v;
                        b[l] = k;
                    }
                }
            }
            cost.push(c);
            back.push(b);
        }
        let last = &points[m - 1];
        for (k, &ki) in near[m - 2].iter().enumerate() {
            let v = cost[m - 2][k] + last[ki].distance(p0);
            if v < best {
                best = v;
                let mut idx = vec![0usize; m];
                idx[0] = i0;
                let mut pos = k;
                for j in (0..m - 1).rev() {
                    idx[j + 1] = near[j][pos];
                    if j > 0 {
                        pos = back[j][pos];
                    }
                }
                best_idx = idx;
            }
        }
    }
    (best, best_idx)
}

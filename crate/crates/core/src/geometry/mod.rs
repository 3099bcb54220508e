//! Convex sets with closed-form Euclidean projections.
//!
//! Every variant of [`ConvexSet`] is nonempty, closed and convex. Projections
//! are exact (up to rounding); normal cones are evaluated in closed form per
//! variant. Membership and "on the boundary" decisions use
//! [`MEMBERSHIP_TOL`](crate::MEMBERSHIP_TOL) unless stated otherwise.

mod point;

pub use point::Point;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, MEMBERSHIP_TOL};

/// A projectable convex body.
///
/// Construct through the checked constructors ([`ConvexSet::ball`] etc.);
/// sets built directly from the variants can be checked with
/// [`ConvexSet::validate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexSet {
    Ball { center: Point, radius: f64 },
    AxisBox { lo: Point, hi: Point },
    Segment { p: Point, q: Point },
    /// `{ base + t * direction }`, `direction` of unit length.
    Line { base: Point, direction: Point },
    /// `{ y : <normal, y> <= offset }`, `normal` of unit length.
    Halfspace { normal: Point, offset: f64 },
    /// Counterclockwise, strictly convex vertex list in the plane.
    #[serde(rename = "polygon")]
    Polygon2D { vertices: Vec<Point> },
}

/// Closest pair between two sets as found by alternating projections.
#[derive(Clone, Debug, PartialEq)]
pub struct SetDistance {
    pub distance: f64,
    pub on_a: Point,
    pub on_b: Point,
}

impl ConvexSet {
    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        let set = ConvexSet::Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn axis_box(lo: Point, hi: Point) -> Result<Self> {
        let set = ConvexSet::AxisBox { lo, hi };
        set.validate()?;
        Ok(set)
    }

    pub fn segment(p: Point, q: Point) -> Result<Self> {
        let set = ConvexSet::Segment { p, q };
        set.validate()?;
        Ok(set)
    }

    /// Line through `base`; `direction` is normalised.
    pub fn line(base: Point, direction: Point) -> Result<Self> {
        let direction = direction
            .normalized()
            .ok_or_else(|| Error::InvalidSet("line direction must be nonzero".into()))?;
        let set = ConvexSet::Line { base, direction };
        set.validate()?;
        Ok(set)
    }

    /// Halfspace `<normal, y> <= offset`; the pair is rescaled so that the
    /// stored normal has unit length.
    pub fn halfspace(normal: Point, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !(len > 0.0) {
            return Err(Error::InvalidSet("halfspace normal must be nonzero".into()));
        }
        let set = ConvexSet::Halfspace { normal: normal.scaled(1.0 / len), offset: offset / len };
        set.validate()?;
        Ok(set)
    }

    pub fn polygon(vertices: Vec<Point>) -> Result<Self> {
        let set = ConvexSet::Polygon2D { vertices };
        set.validate()?;
        Ok(set)
    }

    /// Checks the per-variant invariants.
    pub fn validate(&self) -> Result<()> {
        let finite = |p: &Point, what: &str| -> Result<()> {
            if p.dim() == 0 {
                return Err(Error::InvalidSet(format!("{what} must have at least one coordinate")));
            }
            if !p.is_finite() {
                return Err(Error::InvalidSet(format!("{what} must be finite")));
            }
            Ok(())
        };
        match self {
            ConvexSet::Ball { center, radius } => {
                finite(center, "ball center")?;
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidSet("ball radius must be > 0".into()));
                }
            }
            ConvexSet::AxisBox { lo, hi } => {
                finite(lo, "box lo")?;
                finite(hi, "box hi")?;
                hi.check_dim(lo.dim())?;
                if lo.coords().iter().zip(hi.coords()).any(|(l, h)| l > h) {
                    return Err(Error::InvalidSet("box requires lo <= hi componentwise".into()));
                }
            }
            ConvexSet::Segment { p, q } => {
                finite(p, "segment endpoint")?;
                finite(q, "segment endpoint")?;
                q.check_dim(p.dim())?;
                if p == q {
                    return Err(Error::InvalidSet("segment endpoints must differ".into()));
                }
            }
            ConvexSet::Line { base, direction } => {
                finite(base, "line base")?;
                finite(direction, "line direction")?;
                direction.check_dim(base.dim())?;
                if (direction.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidSet("line direction must have unit length".into()));
                }
            }
            ConvexSet::Halfspace { normal, offset } => {
                finite(normal, "halfspace normal")?;
                if !offset.is_finite() {
                    return Err(Error::InvalidSet("halfspace offset must be finite".into()));
                }
                if (normal.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidSet("halfspace normal must have unit length".into()));
                }
            }
            ConvexSet::Polygon2D { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::InvalidSet("polygon needs at least 3 vertices".into()));
                }
                for v in vertices {
                    finite(v, "polygon vertex")?;
                    if v.dim() != 2 {
                        return Err(Error::PolygonDimension(v.dim()));
                    }
                }
                let n = vertices.len();
                for i in 0..n {
                    if vertices[i] == vertices[(i + 1) % n] {
                        return Err(Error::InvalidSet("polygon has repeated vertices".into()));
                    }
                    let turn = cross(
                        &(&vertices[(i + 1) % n] - &vertices[i]),
                        &(&vertices[(i + 2) % n] - &vertices[(i + 1) % n]),
                    );
                    if !(turn > 0.0) {
                        return Err(Error::InvalidSet(
                            "polygon vertices must be counterclockwise and strictly convex".into(),
                        ));
                    }
                }
                // a strictly convex turn sequence can still wind more than once
                let total: f64 = (0..n)
                    .map(|i| {
                        let a = &vertices[(i + 1) % n] - &vertices[i];
                        let b = &vertices[(i + 2) % n] - &vertices[(i + 1) % n];
                        cross(&a, &b).atan2(a.dot(&b))
                    })
                    .sum();
                if (total - std::f64::consts::TAU).abs() > 1e-6 {
                    return Err(Error::InvalidSet("polygon boundary winds more than once".into()));
                }
            }
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        match self {
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::AxisBox { lo, .. } => lo.dim(),
            ConvexSet::Segment { p, .. } => p.dim(),
            ConvexSet::Line { base, .. } => base.dim(),
            ConvexSet::Halfspace { normal, .. } => normal.dim(),
            ConvexSet::Polygon2D { .. } => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConvexSet::Ball { .. } => "ball",
            ConvexSet::AxisBox { .. } => "axis_box",
            ConvexSet::Segment { .. } => "segment",
            ConvexSet::Line { .. } => "line",
            ConvexSet::Halfspace { .. } => "halfspace",
            ConvexSet::Polygon2D { .. } => "polygon",
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, ConvexSet::Line { .. } | ConvexSet::Halfspace { .. })
    }

    /// Only balls are strictly convex in this catalogue.
    pub fn is_strictly_convex(&self) -> bool {
        matches!(self, ConvexSet::Ball { .. })
    }

    /// A fixed point of the set used to seed iterative procedures.
    pub fn representative_point(&self) -> Point {
        match self {
            ConvexSet::Ball { center, .. } => center.clone(),
            ConvexSet::AxisBox { lo, hi } => lo.midpoint(hi),
            ConvexSet::Segment { p, q } => p.midpoint(q),
            ConvexSet::Line { base, .. } => base.clone(),
            ConvexSet::Halfspace { normal, offset } => normal.scaled(*offset),
            ConvexSet::Polygon2D { vertices } => {
                let n = vertices.len() as f64;
                let sx: f64 = vertices.iter().map(|v| v[0]).sum();
                let sy: f64 = vertices.iter().map(|v| v[1]).sum();
                Point::from([sx / n, sy / n])
            }
        }
    }

    fn check_point(&self, x: &Point) -> Result<()> {
        if let ConvexSet::Polygon2D { .. } = self {
            if x.dim() != 2 {
                return Err(Error::PolygonDimension(x.dim()));
            }
            return Ok(());
        }
        x.check_dim(self.dimension())
    }

    /// Euclidean projection of `x` onto the set. Members are returned unchanged.
    pub fn project(&self, x: &Point) -> Result<Point> {
        self.check_point(x)?;
        Ok(match self {
            ConvexSet::Ball { center, radius } => {
                let d = x - center;
                let dist = d.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    center.offset(&d, radius / dist)
                }
            }
            ConvexSet::AxisBox { lo, hi } => Point::from(
                x.coords()
                    .iter()
                    .zip(lo.coords().iter().zip(hi.coords()))
                    .map(|(v, (l, h))| v.max(*l).min(*h))
                    .collect::<Vec<_>>(),
            ),
            ConvexSet::Segment { p, q } => snap(x, project_segment(p, q, x)),
            ConvexSet::Line { base, direction } => {
                let t = (x - base).dot(direction);
                snap(x, base.offset(direction, t))
            }
            ConvexSet::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.offset(normal, -excess)
                }
            }
            ConvexSet::Polygon2D { vertices } => {
                if polygon_contains(vertices, x) {
                    x.clone()
                } else {
                    let n = vertices.len();
                    let mut best: Option<(f64, Point)> = None;
                    for i in 0..n {
                        let y = project_segment(&vertices[i], &vertices[(i + 1) % n], x);
                        let d = y.distance(x);
                        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                            best = Some((d, y));
                        }
                    }
                    best.map(|(_, y)| y).expect("polygon has edges")
                }
            }
        })
    }

    /// Euclidean distance from `x` to the set.
    pub fn distance_to(&self, x: &Point) -> Result<f64> {
        Ok(self.project(x)?.distance(x))
    }

    pub fn contains(&self, x: &Point, tol: f64) -> Result<bool> {
        if tol < 0.0 {
            return Err(Error::InvalidConfig("membership tolerance must be >= 0".into()));
        }
        Ok(self.distance_to(x)? <= tol)
    }

    /// Projection of `v` onto the normal cone `N(x)` of the set at `x`.
    pub fn normal_cone_projection(&self, x: &Point, v: &Point) -> Result<Point> {
        self.normal_cone_projection_tol(x, v, MEMBERSHIP_TOL)
    }

    /// As [`normal_cone_projection`](Self::normal_cone_projection) with an
    /// explicit membership and boundary-detection tolerance.
    pub fn normal_cone_projection_tol(&self, x: &Point, v: &Point, tol: f64) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(v)?;
        let outside = self.distance_to(x)?;
        if outside > tol {
            return Err(Error::NotInSet { distance: outside });
        }
        let dim = x.dim();
        Ok(match self {
            ConvexSet::Ball { center, radius } => {
                let d = x - center;
                if d.norm() < radius - tol {
                    Point::zeros(dim)
                } else {
                    let n = d.normalized().expect("boundary point differs from center");
                    ray_projection(&n, v)
                }
            }
            ConvexSet::AxisBox { lo, hi } => Point::from(
                (0..dim)
                    .map(|j| {
                        let at_lo = x[j] <= lo[j] + tol;
                        let at_hi = x[j] >= hi[j] - tol;
                        match (at_lo, at_hi) {
                            (true, true) => v[j],
                            (false, true) => v[j].max(0.0),
                            (true, false) => v[j].min(0.0),
                            (false, false) => 0.0,
                        }
                    })
                    .collect::<Vec<_>>(),
            ),
            ConvexSet::Segment { p, q } => {
                let u = (q - p).normalized().expect("segment endpoints differ");
                let along = v.dot(&u);
                let removed = if x.distance(p) <= tol {
                    along.max(0.0)
                } else if x.distance(q) <= tol {
                    along.min(0.0)
                } else {
                    along
                };
                v.offset(&u, -removed)
            }
            ConvexSet::Line { direction, .. } => v.offset(direction, -v.dot(direction)),
            ConvexSet::Halfspace { normal, offset } => {
                if normal.dot(x) < offset - tol {
                    Point::zeros(dim)
                } else {
                    ray_projection(normal, v)
                }
            }
            ConvexSet::Polygon2D { vertices } => {
                let n = vertices.len();
                let active: Vec<Point> = (0..n)
                    .filter_map(|i| {
                        let normal = edge_normal(&vertices[i], &vertices[(i + 1) % n]);
                        (normal.dot(&(x - &vertices[i])) >= -tol).then_some(normal)
                    })
                    .collect();
                planar_cone_projection(&active, v)
            }
        })
    }

    /// Distance from `v` to the normal cone `N(x)`; zero iff `v ∈ N(x)`.
    pub fn normal_cone_distance(&self, x: &Point, v: &Point) -> Result<f64> {
        self.normal_cone_distance_tol(x, v, MEMBERSHIP_TOL)
    }

    pub fn normal_cone_distance_tol(&self, x: &Point, v: &Point, tol: f64) -> Result<f64> {
        Ok(self.normal_cone_projection_tol(x, v, tol)?.distance(v))
    }

    /// Whether `x` (assumed in the set) lies on its boundary.
    pub fn on_boundary(&self, x: &Point) -> Result<bool> {
        let probe = Point::from(vec![1.0; x.dim()]);
        // N(x) = {0} exactly at interior points; test with a probe in every orthant
        for sign in [1.0, -1.0] {
            let v = probe.scaled(sign);
            if self.normal_cone_projection(x, &v)?.norm() > 0.0 {
                return Ok(true);
            }
        }
        Ok(match self {
            ConvexSet::Ball { center, radius } => x.distance(center) >= radius - MEMBERSHIP_TOL,
            ConvexSet::Halfspace { normal, offset } => normal.dot(x) >= offset - MEMBERSHIP_TOL,
            _ => false,
        })
    }
}

/// Distance between two convex sets by alternating projections, started from
/// the midpoint of the two representative points.
pub fn set_distance(a: &ConvexSet, b: &ConvexSet) -> Result<SetDistance> {
    const STALL: f64 = 1e-13;
    const MAX_ITER: usize = 10_000;

    if a.dimension() != b.dimension() {
        return Err(Error::DimensionMismatch { expected: a.dimension(), found: b.dimension() });
    }
    let start = a.representative_point().midpoint(&b.representative_point());
    let mut on_a = a.project(&start)?;
    let mut on_b = b.project(&on_a)?;
    let mut dist = on_a.distance(&on_b);
    for _ in 0..MAX_ITER {
        on_a = a.project(&on_b)?;
        on_b = b.project(&on_a)?;
        let next = on_a.distance(&on_b);
        let change = (dist - next).abs();
        dist = next;
        if change < STALL {
            break;
        }
    }
    Ok(SetDistance { distance: dist, on_a, on_b })
}

/// Ordered tuple of convex sets sharing one ambient dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    sets: Vec<ConvexSet>,
    dimension: usize,
}

impl Problem {
    pub fn new(sets: Vec<ConvexSet>) -> Result<Self> {
        if sets.len() < 2 {
            return Err(Error::InvalidProblem(format!(
                "need at least 2 sets, got {}",
                sets.len()
            )));
        }
        for set in &sets {
            set.validate()?;
        }
        let dimension = sets[0].dimension();
        for set in &sets[1..] {
            if let ConvexSet::Polygon2D { .. } = set {
                if dimension != 2 {
                    return Err(Error::PolygonDimension(dimension));
                }
            }
            if set.dimension() != dimension {
                return Err(Error::DimensionMismatch { expected: dimension, found: set.dimension() });
            }
        }
        Ok(Problem { sets, dimension })
    }

    pub fn sets(&self) -> &[ConvexSet] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &ConvexSet {
        &self.sets[i]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Cyclic predecessor (`0 ↦ m − 1`).
    pub fn prev(&self, i: usize) -> usize {
        (i + self.len() - 1) % self.len()
    }

    /// Cyclic successor (`m − 1 ↦ 0`).
    pub fn next(&self, i: usize) -> usize {
        (i + 1) % self.len()
    }

    /// Largest distance between representative points (at least 1).
    pub fn diameter(&self) -> f64 {
        let reps: Vec<Point> = self.sets.iter().map(|s| s.representative_point()).collect();
        let mut d: f64 = 1.0;
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                d = d.max(reps[i].distance(&reps[j]));
            }
        }
        d
    }
}

fn cross(a: &Point, b: &Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

/// Outward unit normal of the counterclockwise edge `a → b`.
fn edge_normal(a: &Point, b: &Point) -> Point {
    let e = b - a;
    Point::from([e[1], -e[0]]).normalized().expect("polygon edges are nondegenerate")
}

fn project_segment(p: &Point, q: &Point, x: &Point) -> Point {
    let u = q - p;
    let t = ((x - p).dot(&u) / u.dot(&u)).clamp(0.0, 1.0);
    p.offset(&u, t)
}

/// Returns `x` itself when the computed projection agrees with it to rounding,
/// so members are fixed points bit for bit.
fn snap(x: &Point, y: Point) -> Point {
    let scale = 1.0 + x.norm();
    if y.distance(x) <= 4.0 * f64::EPSILON * scale {
        x.clone()
    } else {
        y
    }
}

fn polygon_contains(vertices: &[Point], x: &Point) -> bool {
    let n = vertices.len();
    (0..n).all(|i| cross(&(&vertices[(i + 1) % n] - &vertices[i]), &(x - &vertices[i])) >= 0.0)
}

/// Projection of `v` onto the ray `{t n : t >= 0}` (`n` unit).
fn ray_projection(n: &Point, v: &Point) -> Point {
    n.scaled(v.dot(n).max(0.0))
}

/// Projection onto the cone spanned by planar generators.
fn planar_cone_projection(generators: &[Point], v: &Point) -> Point {
    match generators.len() {
        0 => Point::zeros(2),
        1 => ray_projection(&generators[0], v),
        _ => {
            // inside a pairwise cone: v = s a + t b with s, t >= 0
            for (i, a) in generators.iter().enumerate() {
                for b in &generators[i + 1..] {
                    let det = cross(a, b);
                    if det.abs() < 1e-15 {
                        continue;
                    }
                    let s = cross(v, b) / det;
                    let t = cross(a, v) / det;
                    if s >= 0.0 && t >= 0.0 {
                        return v.clone();
                    }
                }
            }
            generators
                .iter()
                .map(|g| ray_projection(g, v))
                .min_by(|p, q| p.distance(v).total_cmp(&q.distance(v)))
                .expect("at least two generators")
        }
    }
}

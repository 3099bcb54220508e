//! Static SVG figures of a solve.
//!
//! Planar problems are drawn as they are. Problems in space use a fixed
//! orthographic view; set outlines are drawn back to front.

use std::fmt::Write as _;
use std::path::Path;

use waist_core::{ConvexSet, Point, Problem, SolveResult};

use crate::output::write_file;
use crate::CliError;

const WIDTH: f64 = 640.0;
const PAD: f64 = 24.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const AZIMUTH: f64 = -0.6;
const ELEVATION: f64 = 0.45;

type P2 = [f64; 2];

enum Shape {
    Circle { center: P2, radius: f64 },
    Polygon(Vec<P2>),
    Segments(Vec<(P2, P2)>),
    /// Unbounded line through `point` along `direction`; clipped to the figure.
    Infinite { point: P2, direction: P2 },
}

struct View {
    dim: usize,
    right: [f64; 3],
    up: [f64; 3],
    toward: [f64; 3],
}

impl View {
    fn new(dim: usize) -> Self {
        let (sa, ca) = AZIMUTH.sin_cos();
        let (se, ce) = ELEVATION.sin_cos();
        View {
            dim,
            right: [-sa, ca, 0.0],
            up: [-se * ca, -se * sa, ce],
            toward: [ce * ca, ce * sa, se],
        }
    }

    fn project(&self, p: &Point) -> P2 {
        if self.dim == 2 {
            return [p[0], p[1]];
        }
        let dot = |v: &[f64; 3]| v[0] * p[0] + v[1] * p[1] + v[2] * p[2];
        [dot(&self.right), dot(&self.up)]
    }

    fn depth(&self, p: &Point) -> f64 {
        if self.dim == 2 {
            return 0.0;
        }
        self.toward[0] * p[0] + self.toward[1] * p[1] + self.toward[2] * p[2]
    }

    fn shape(&self, set: &ConvexSet) -> Option<Shape> {
        Some(match set {
            ConvexSet::Ball { center, radius } => Shape::Circle { center: self.project(center), radius: *radius },
            ConvexSet::Polygon2D { vertices } => Shape::Polygon(vertices.iter().map(|v| self.project(v)).collect()),
            ConvexSet::Segment { p, q } => Shape::Segments(vec![(self.project(p), self.project(q))]),
            ConvexSet::AxisBox { lo, hi } if self.dim == 2 => Shape::Polygon(vec![
                [lo[0], lo[1]],
                [hi[0], lo[1]],
                [hi[0], hi[1]],
                [lo[0], hi[1]],
            ]),
            ConvexSet::AxisBox { lo, hi } => {
                let corner = |b: usize| {
                    Point::from([
                        if b & 1 == 0 { lo[0] } else { hi[0] },
                        if b & 2 == 0 { lo[1] } else { hi[1] },
                        if b & 4 == 0 { lo[2] } else { hi[2] },
                    ])
                };
                let mut edges = Vec::new();
                for b in 0..8usize {
                    for bit in [1, 2, 4] {
                        if b & bit == 0 {
                            edges.push((self.project(&corner(b)), self.project(&corner(b | bit))));
                        }
                    }
                }
                Shape::Segments(edges)
            }
            ConvexSet::Line { base, direction } => {
                let d = self.project(&base.offset(direction, 1.0));
                let b = self.project(base);
                Shape::Infinite { point: b, direction: [d[0] - b[0], d[1] - b[1]] }
            }
            ConvexSet::Halfspace { normal, offset } if self.dim == 2 => Shape::Infinite {
                point: [normal[0] * offset, normal[1] * offset],
                direction: [-normal[1], normal[0]],
            },
            ConvexSet::Halfspace { .. } => return None,
        })
    }
}

struct Frame {
    min: P2,
    max: P2,
}

impl Frame {
    fn include(&mut self, p: P2, r: f64) {
        for a in 0..2 {
            self.min[a] = self.min[a].min(p[a] - r);
            self.max[a] = self.max[a].max(p[a] + r);
        }
    }

    fn scale(&self) -> f64 {
        let span = (self.max[0] - self.min[0]).max(self.max[1] - self.min[1]).max(1e-9);
        (WIDTH - 2.0 * PAD) / span
    }

    fn height(&self) -> f64 {
        (self.max[1] - self.min[1]) * self.scale() + 2.0 * PAD
    }

    fn map(&self, p: P2) -> P2 {
        let s = self.scale();
        [(p[0] - self.min[0]) * s + PAD, (self.max[1] - p[1]) * s + PAD]
    }

    fn fmt(&self, p: P2) -> String {
        let q = self.map(p);
        format!("{:.3},{:.3}", q[0], q[1])
    }
}

/// SVG document showing the sets, start points, iterate paths and final chain.
pub fn render_svg(problem: &Problem, result: &SolveResult) -> Result<String, CliError> {
    let n = problem.dimension();
    if !(2..=3).contains(&n) {
        return Err(CliError::RenderDimension(n));
    }
    let view = View::new(n);
    let mut shapes: Vec<(usize, f64, Shape)> = problem
        .sets()
        .iter()
        .enumerate()
        .filter_map(|(i, s)| view.shape(s).map(|sh| (i, view.depth(&s.representative_point()), sh)))
        .collect();
    // back to front
    shapes.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let mut paths: Vec<Vec<P2>> = vec![Vec::new(); problem.len()];
    for cfg in std::iter::once(&result.start).chain(result.trace.iter().map(|r| &r.points)) {
        for (path, p) in paths.iter_mut().zip(&cfg.points) {
            path.push(view.project(p));
        }
    }
    let finals: Vec<P2> = result.final_config.points.iter().map(|p| view.project(p)).collect();

    let first = finals[0];
    let mut frame = Frame { min: first, max: first };
    for (_, _, s) in &shapes {
        match s {
            Shape::Circle { center, radius } => frame.include(*center, *radius),
            Shape::Polygon(v) => v.iter().for_each(|p| frame.include(*p, 0.0)),
            Shape::Segments(e) => e.iter().for_each(|(a, b)| {
                frame.include(*a, 0.0);
                frame.include(*b, 0.0);
            }),
            Shape::Infinite { point, .. } => frame.include(*point, 0.0),
        }
    }
    paths.iter().flatten().for_each(|p| frame.include(*p, 0.0));
    let margin = 0.05 * (frame.max[0] - frame.min[0]).max(frame.max[1] - frame.min[1]).max(1.0);
    let corner = frame.min;
    frame.include(corner, margin);
    let corner = frame.max;
    frame.include(corner, margin);
    let reach = (frame.max[0] - frame.min[0]) + (frame.max[1] - frame.min[1]);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}">"#,
        w = WIDTH,
        h = frame.height()
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let scale = frame.scale();
    for (i, _, shape) in &shapes {
        let color = PALETTE[i % PALETTE.len()];
        let style = format!(r#"fill="{color}" fill-opacity="0.12" stroke="{color}" stroke-width="1.5""#);
        match shape {
            Shape::Circle { center, radius } => {
                let c = frame.map(*center);
                let _ = writeln!(svg, r#"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" {style}/>"#, c[0], c[1], radius * scale);
            }
            Shape::Polygon(v) => {
                let pts: Vec<String> = v.iter().map(|p| frame.fmt(*p)).collect();
                let _ = writeln!(svg, r#"<polygon points="{}" {style}/>"#, pts.join(" "));
            }
            Shape::Segments(edges) => {
                for (a, b) in edges {
                    let _ = writeln!(svg, r#"<polyline points="{} {}" fill="none" stroke="{color}" stroke-width="2"/>"#, frame.fmt(*a), frame.fmt(*b));
                }
            }
            Shape::Infinite { point, direction } => {
                let len = direction[0].hypot(direction[1]);
                if len > 0.0 {
                    let t = reach / len;
                    let a = [point[0] - t * direction[0], point[1] - t * direction[1]];
                    let b = [point[0] + t * direction[0], point[1] + t * direction[1]];
                    let _ = writeln!(svg, r#"<polyline points="{} {}" fill="none" stroke="{color}" stroke-width="2"/>"#, frame.fmt(a), frame.fmt(b));
                }
            }
        }
    }
    for (i, path) in paths.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = path.iter().map(|p| frame.fmt(*p)).collect();
        let _ = writeln!(svg, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1" stroke-dasharray="4 3"/>"#, pts.join(" "));
        let s = frame.map(path[0]);
        let _ = writeln!(svg, r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="white" stroke="{color}" stroke-width="1.5"/>"#, s[0], s[1]);
    }
    let chain: Vec<String> = finals.iter().map(|p| frame.fmt(*p)).collect();
    let _ = writeln!(svg, r#"<polygon points="{}" fill="none" stroke="black" stroke-width="2"/>"#, chain.join(" "));
    for (i, p) in finals.iter().enumerate() {
        let q = frame.map(*p);
        let _ = writeln!(svg, r#"<circle cx="{:.3}" cy="{:.3}" r="4" fill="black"/>"#, q[0], q[1]);
        let _ = writeln!(svg, r#"<text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="13">a{}*</text>"#, q[0] + 6.0, q[1] - 6.0, i + 1);
    }
    let _ = writeln!(svg, r#"<text x="{PAD}" y="{:.3}" font-family="sans-serif" font-size="13">D* = {:.6}</text>"#, PAD - 6.0, result.value);
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn render_figure(problem: &Problem, result: &SolveResult, path: &Path) -> Result<(), CliError> {
    write_file(path, &render_svg(problem, result)?)
}

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

use waist_core::objective::{perimeter, subgradient};
use waist_core::solver::{
    aitken_transform, aitken_transform_stacked, psd_solve, Refresh, StepRule,
};
use waist_core::{Configuration, ConvexSet, Point, Problem, SolverConfig};

pub fn pt(c: &[f64]) -> Point {
    Point::from(c.to_vec())
}

pub fn config(points: &[&[f64]]) -> Configuration {
    Configuration::new(points.iter().map(|p| pt(p)).collect())
}

pub fn discs() -> Problem {
    Problem::new(vec![
        ConvexSet::ball(pt(&[2.0, 3.0]), 1.0).unwrap(),
        ConvexSet::ball(pt(&[8.0, 4.0]), 2.0).unwrap(),
        ConvexSet::ball(pt(&[4.0, 11.0]), 3.0).unwrap(),
    ])
    .unwrap()
}

pub fn disc_start() -> Configuration {
    config(&[&[1.0, 3.0], &[10.0, 4.0], &[1.0, 11.0]])
}

pub fn spheres() -> Problem {
    Problem::new(vec![
        ConvexSet::ball(pt(&[2.0, 3.0, -1.0]), 2.0).unwrap(),
        ConvexSet::ball(pt(&[4.0, -2.0, 1.0]), 2.0).unwrap(),
        ConvexSet::ball(pt(&[6.0, 3.0, 2.0]), 2.0).unwrap(),
    ])
    .unwrap()
}

pub fn sphere_start() -> Configuration {
    config(&[&[3.0, 3.0, -1.0], &[5.0, -2.0, 1.0], &[6.0, 4.0, 2.0]])
}

pub fn two_balls() -> Problem {
    Problem::new(vec![
        ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap(),
        ConvexSet::ball(pt(&[5.0, 0.0]), 1.0).unwrap(),
    ])
    .unwrap()
}

/// Vertical lines through `(0,0)`, `(4,0)`, `(0,3)`.
pub fn parallel_lines() -> Problem {
    let up = pt(&[0.0, 0.0, 1.0]);
    Problem::new(vec![
        ConvexSet::line(pt(&[0.0, 0.0, 0.0]), up.clone()).unwrap(),
        ConvexSet::line(pt(&[4.0, 0.0, 0.0]), up.clone()).unwrap(),
        ConvexSet::line(pt(&[0.0, 3.0, 0.0]), up).unwrap(),
    ])
    .unwrap()
}

pub fn mixed_plane() -> Problem {
    Problem::new(vec![
        ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap(),
        ConvexSet::segment(pt(&[5.0, -1.0]), pt(&[6.0, 2.0])).unwrap(),
        ConvexSet::polygon(vec![pt(&[1.0, 5.0]), pt(&[3.0, 5.0]), pt(&[2.0, 7.0])]).unwrap(),
    ])
    .unwrap()
}

pub fn mixed_space() -> Problem {
    Problem::new(vec![
        ConvexSet::axis_box(pt(&[0.0, 0.0, 0.0]), pt(&[1.0, 1.0, 1.0])).unwrap(),
        ConvexSet::ball(pt(&[5.0, 0.0, 0.0]), 1.0).unwrap(),
        ConvexSet::segment(pt(&[2.0, 4.0, -1.0]), pt(&[2.0, 4.0, 3.0])).unwrap(),
    ])
    .unwrap()
}

pub fn four_sets() -> Problem {
    Problem::new(vec![
        ConvexSet::ball(pt(&[0.0, 0.0]), 1.0).unwrap(),
        ConvexSet::ball(pt(&[6.0, 0.0]), 1.5).unwrap(),
        ConvexSet::axis_box(pt(&[5.0, 5.0]), pt(&[7.0, 6.0])).unwrap(),
        ConvexSet::halfspace(pt(&[-1.0, 0.0]), 3.0).unwrap(),
    ])
    .unwrap()
}

/// Each set's projection of the centroid of the other sets' representatives.
pub fn centroid_start(problem: &Problem) -> Configuration {
    let reps: Vec<Point> = problem.sets().iter().map(|s| s.representative_point()).collect();
    let m = reps.len();
    Configuration::new(
        (0..m)
            .map(|i| {
                let mut c = Point::zeros(problem.dimension());
                for (j, r) in reps.iter().enumerate() {
                    if j != i {
                        c = &c + r;
                    }
                }
                problem.set(i).project(&c.scaled(1.0 / (m - 1) as f64)).unwrap()
            })
            .collect(),
    )
}

/// `(name, problem, start, constant step)` for every catalog problem.
pub fn catalog() -> Vec<(&'static str, Problem, Configuration, f64)> {
    let with_centroid = |name, p: Problem, alpha| {
        let s = centroid_start(&p);
        (name, p, s, alpha)
    };
    vec![
        ("discs", discs(), disc_start(), 2.0707749),
        ("spheres", spheres(), sphere_start(), 1.7432),
        ("two balls", two_balls(), config(&[&[0.0, 1.0], &[5.0, -1.0]]), 0.5),
        (
            "parallel lines",
            parallel_lines(),
            config(&[&[0.0, 0.0, 1.0], &[4.0, 0.0, 2.0], &[0.0, 3.0, -0.5]]),
            0.5,
        ),
        with_centroid("ball, segment, polygon", mixed_plane(), 0.3),
        with_centroid("box, ball, segment in 3D", mixed_space(), 0.3),
        with_centroid("four sets with a halfspace", four_sets(), 0.3),
    ]
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

pub type PropResult = Result<(), TestError<String>>;

fn stringify<T: std::fmt::Debug>(r: Result<(), TestError<T>>) -> PropResult {
    r.map_err(|e| match e {
        TestError::Abort(a) => TestError::Abort(a),
        TestError::Fail(why, v) => TestError::Fail(why, format!("{v:?}")),
    })
}

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn point(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(coord(), dim).prop_map(Point::from)
}

fn unit(dim: usize) -> impl Strategy<Value = Point> {
    prop::collection::vec(-1.0..1.0f64, dim)
        .prop_filter("nonzero direction", |v| v.iter().map(|c| c * c).sum::<f64>() > 1e-4)
        .prop_map(|v| Point::from(v).normalized().unwrap())
}

/// Random set of every variant in dimension 2 or 3 (polygons in 2).
pub fn any_set() -> impl Strategy<Value = ConvexSet> {
    (2usize..=3).prop_flat_map(|dim| {
        prop_oneof![
            (point(dim), 0.1..5.0f64).prop_map(|(c, r)| ConvexSet::ball(c, r).unwrap()),
            (point(dim), prop::collection::vec(0.0..4.0f64, dim)).prop_map(|(lo, ext)| {
                let hi = Point::from(lo.coords().iter().zip(&ext).map(|(l, e)| l + e).collect::<Vec<_>>());
                ConvexSet::axis_box(lo, hi).unwrap()
            }),
            (point(dim), unit(dim), 0.1..6.0f64)
                .prop_map(|(p, u, len)| ConvexSet::segment(p.clone(), p.offset(&u, len)).unwrap()),
            (point(dim), unit(dim)).prop_map(|(b, d)| ConvexSet::line(b, d).unwrap()),
            (unit(dim), -5.0..5.0f64).prop_map(|(n, o)| ConvexSet::halfspace(n, o).unwrap()),
            polygon_strategy(),
        ]
    })
}

fn polygon_strategy() -> impl Strategy<Value = ConvexSet> {
    (point(2), 0.5..4.0f64, prop::collection::vec(0.05..1.0f64, 3..8)).prop_map(|(c, r, gaps)| {
        // sorted angles on a circle give a strictly convex counterclockwise polygon
        let total: f64 = gaps.iter().sum();
        let mut acc = 0.0;
        let vertices = gaps
            .iter()
            .map(|g| {
                let th = std::f64::consts::TAU * acc / total;
                acc += g;
                Point::from([c[0] + r * th.cos(), c[1] + r * th.sin()])
            })
            .collect();
        ConvexSet::polygon(vertices).unwrap()
    })
}

fn set_and_points(k: usize) -> impl Strategy<Value = (ConvexSet, Vec<Point>)> {
    any_set().prop_flat_map(move |s| {
        let d = s.dimension();
        (Just(s), prop::collection::vec(point(d), k))
    })
}

pub fn projection_idempotent(cases: u32) -> PropResult {
    stringify(runner(cases).run(&set_and_points(1), |(s, x)| {
        let y = s.project(&x[0]).unwrap();
        let z = s.project(&y).unwrap();
        prop_assert!(y.distance(&z) <= 1e-12, "{s:?} {y} {z}");
        prop_assert!(s.contains(&y, 1e-9).unwrap());
        Ok(())
    }))
}

pub fn projection_nonexpansive(cases: u32) -> PropResult {
    stringify(runner(cases).run(&set_and_points(2), |(s, x)| {
        let a = s.project(&x[0]).unwrap();
        let b = s.project(&x[1]).unwrap();
        prop_assert!(a.distance(&b) <= x[0].distance(&x[1]) + 1e-12);
        Ok(())
    }))
}

pub fn projection_variational_inequality(cases: u32) -> PropResult {
    stringify(runner(cases).run(&set_and_points(2), |(s, x)| {
        let y = s.project(&x[0]).unwrap();
        let z = s.project(&x[1]).unwrap();
        for member in [z, s.representative_point()] {
            let lhs = (&x[0] - &y).dot(&(&member - &y));
            prop_assert!(lhs <= 1e-9, "{s:?}: {lhs}");
        }
        Ok(())
    }))
}

pub fn zero_in_normal_cone(cases: u32) -> PropResult {
    stringify(runner(cases).run(&set_and_points(1), |(s, x)| {
        let y = s.project(&x[0]).unwrap();
        prop_assert_eq!(s.normal_cone_distance(&y, &Point::zeros(y.dim())).unwrap(), 0.0);
        // the projection residual is always a normal direction
        let v = &x[0] - &y;
        prop_assert!(s.normal_cone_distance(&y, &v).unwrap() <= 1e-9 * (1.0 + v.norm()));
        Ok(())
    }))
}

pub fn ball_strictly_convex(cases: u32) -> PropResult {
    let strat = (point(3), 0.1..5.0f64, unit(3), unit(3))
        .prop_filter("distinct points", |(_, _, u, v)| u.distance(v) > 1e-3);
    stringify(runner(cases).run(&strat, |(c, r, u, v)| {
        let ball = ConvexSet::ball(c.clone(), r).unwrap();
        let mid = c.offset(&u, r).midpoint(&c.offset(&v, r));
        prop_assert!(mid.distance(&c) < r);
        prop_assert!(!ball.on_boundary(&mid).unwrap());
        Ok(())
    }))
}

fn smooth_configuration() -> impl Strategy<Value = Configuration> {
    (2usize..=5, 2usize..=3)
        .prop_flat_map(|(m, d)| prop::collection::vec(point(d), m))
        .prop_filter("adjacent points apart", |pts| {
            let m = pts.len();
            (0..m).all(|i| pts[i].distance(&pts[(i + 1) % m]) > 0.5)
        })
        .prop_map(Configuration::new)
}

pub fn subgradient_matches_finite_differences(cases: u32) -> PropResult {
    stringify(runner(cases).run(&smooth_configuration(), |a| {
        let g = subgradient(&a).unwrap();
        let h = 1e-6;
        for i in 0..a.len() {
            for j in 0..a.points[i].dim() {
                let mut e = vec![0.0; a.points[i].dim()];
                e[j] = 1.0;
                let e = Point::from(e);
                let mut plus = a.clone();
                plus.points[i] = a.points[i].offset(&e, h);
                let mut minus = a.clone();
                minus.points[i] = a.points[i].offset(&e, -h);
                let fd = (perimeter(&plus) - perimeter(&minus)) / (2.0 * h);
                prop_assert!((fd - g.vectors[i][j]).abs() <= 1e-5, "block {i} coord {j}: {fd} vs {}", g.vectors[i][j]);
            }
        }
        Ok(())
    }))
}

pub fn subgradient_inequality(cases: u32) -> PropResult {
    let pair = smooth_configuration().prop_flat_map(|x| {
        let (m, d) = (x.len(), x.points[0].dim());
        (Just(x), prop::collection::vec(point(d), m).prop_map(Configuration::new))
    });
    stringify(runner(cases).run(&pair, |(x, y)| {
        let g = subgradient(&x).unwrap();
        let linear: f64 = g
            .vectors
            .iter()
            .zip(x.points.iter().zip(&y.points))
            .map(|(gi, (xi, yi))| gi.dot(&(yi - xi)))
            .sum();
        prop_assert!(perimeter(&y) >= perimeter(&x) + linear - 1e-9);
        for gi in &g.vectors {
            prop_assert!(gi.norm() <= 2.0 + 1e-12);
        }
        Ok(())
    }))
}

pub fn perimeter_invariances(cases: u32) -> PropResult {
    let strat = smooth_configuration().prop_flat_map(|a| {
        let d = a.points[0].dim();
        (Just(a), point(d), 0.01..100.0f64)
    });
    stringify(runner(cases).run(&strat, |(a, t, lambda)| {
        let moved = Configuration::new(a.points.iter().map(|p| p + &t).collect());
        let scaled = Configuration::new(a.points.iter().map(|p| p.scaled(lambda)).collect());
        let d = perimeter(&a);
        prop_assert!((perimeter(&moved) - d).abs() <= 1e-12 * (1.0 + d) * 10.0);
        prop_assert!((perimeter(&scaled) - lambda * d).abs() <= 1e-12 * lambda * d * 10.0);
        let (g, gm) = (subgradient(&a).unwrap(), subgradient(&moved).unwrap());
        for (u, v) in g.vectors.iter().zip(&gm.vectors) {
            prop_assert!(u.distance(v) <= 1e-9);
        }
        Ok(())
    }))
}

pub fn aitken_exact_on_geometric_sequences(cases: u32) -> PropResult {
    let strat = (
        prop::collection::vec((-10.0..10.0f64, 0.1..5.0f64, 0.05..0.95f64, any::<bool>()), 1..8),
    );
    stringify(runner(cases).run(&strat, |(terms,)| {
        // coordinate j follows c + b q^k with q of either sign
        let seq = |k: i32| {
            Configuration::new(vec![Point::from(
                terms
                    .iter()
                    .map(|(c, b, q, neg)| c + b * if *neg { -q } else { *q }.powi(k))
                    .collect::<Vec<_>>(),
            )])
        };
        let (s0, s1, s2) = (seq(0), seq(1), seq(2));
        let t = aitken_transform(&s0, &s1, &s2, 1e-12).unwrap();
        for (j, (c, ..)) in terms.iter().enumerate() {
            prop_assert!((t.points[0][j] - c).abs() <= 1e-9 * (1.0 + c.abs()) * 100.0);
        }
        if terms.len() == 1 {
            let t = aitken_transform_stacked(&s0, &s1, &s2, 1e-12).unwrap();
            prop_assert!((t.points[0][0] - terms[0].0).abs() <= 1e-9 * (1.0 + terms[0].0.abs()) * 100.0);
        }
        Ok(())
    }))
}

/// Every catalog problem under per-iteration exact line search.
pub fn line_search_trace_monotone() -> Result<(), String> {
    for (name, p, start, _) in catalog() {
        let cfg = SolverConfig::constant(1.0, 1e-12)
            .with_step_rule(StepRule::ExactLineSearch { alpha_max: 1.0, refresh: Refresh::EveryIteration })
            .with_max_iterations(300);
        let r = psd_solve(&p, &start, &cfg).map_err(|e| format!("{name}: {e}"))?;
        let mut prev = perimeter(&r.start);
        for row in &r.trace {
            if row.value > prev {
                return Err(format!("{name}: D rose from {prev} to {} at k = {}", row.value, row.k));
            }
            prev = row.value;
        }
    }
    Ok(())
}

/// Two runs of every solver variant on every catalog problem give identical traces.
pub fn deterministic_traces() -> Result<(), String> {
    use waist_core::solver::{solve, Method};
    for (name, p, start, alpha) in catalog() {
        for (method, aitken) in [(Method::Psd, false), (Method::Psd, true), (Method::Nag, false)] {
            let cfg = SolverConfig::constant(alpha, 1e-12).with_aitken(aitken).with_max_iterations(2000);
            let a = solve(&p, &start, &cfg, method).map_err(|e| format!("{name}: {e}"))?;
            let b = solve(&p, &start, &cfg, method).map_err(|e| format!("{name}: {e}"))?;
            let bits = |r: &waist_core::SolveResult| -> Vec<u64> {
                r.trace
                    .iter()
                    .flat_map(|row| {
                        row.points
                            .points
                            .iter()
                            .flat_map(|q| q.coords().to_vec())
                            .chain([row.value, row.delta])
                            .map(f64::to_bits)
                            .collect::<Vec<_>>()
                    })
                    .collect()
            };
            if bits(&a) != bits(&b) {
                return Err(format!("{name} ({method:?}, aitken {aitken}): traces differ"));
            }
        }
    }
    Ok(())
}

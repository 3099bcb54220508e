use crate::geometry::Problem;
use crate::objective::{perimeter, Configuration, SubgradientField};
use crate::{Error, Result};

const WIDTH: f64 = 1e-10;
const MAX_DOUBLINGS: usize = 60;

/// Step minimising `φ(α) = D(P_C(a + α p))` along the projected path.
///
/// `direction` is the descent direction `p` itself (normally `−g`). The
/// bracket starts at `[0, alpha_max]` and doubles while `φ` still decreases
/// at its right end; golden-section search then narrows it to width 1e-10.
/// Returns 0 when no step improves on `φ(0) = D(a)`.
pub fn exact_line_search(
    problem: &Problem,
    config: &Configuration,
    direction: &SubgradientField,
    alpha_max: f64,
) -> Result<f64> {
    if !(alpha_max.is_finite() && alpha_max > 0.0) {
        return Err(Error::InvalidConfig(format!("alpha_max must be > 0, got {alpha_max}")));
    }
    if direction.vectors.len() != config.len() {
        return Err(Error::InvalidProblem("direction and configuration lengths differ".into()));
    }
    if direction.vectors.iter().all(|p| p.coords().iter().all(|c| *c == 0.0)) {
        return Ok(0.0);
    }
    let phi = |alpha: f64| -> Result<f64> {
        let points = problem
            .sets()
            .iter()
            .zip(config.points.iter().zip(&direction.vectors))
            .map(|(set, (a, p))| set.project(&a.offset(p, alpha)))
            .collect::<Result<Vec<_>>>()?;
        let v = perimeter(&Configuration::new(points));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("line search objective"))
        }
    };
    let phi0 = perimeter(config);
    if !phi0.is_finite() {
        return Err(Error::NonFinite("line search objective"));
    }

    // [lo, hi] brackets the minimiser once phi stops decreasing past hi
    let (mut lo, mut hi) = (0.0_f64, alpha_max);
    let mut f_hi = phi(hi)?;
    for _ in 0..MAX_DOUBLINGS {
        let f_next = phi(2.0 * hi)?;
        if f_next >= f_hi {
            if lo > 0.0 {
                hi *= 2.0;
            }
            break;
        }
        lo = hi;
        hi *= 2.0;
        f_hi = f_next;
    }

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (phi(c)?, phi(d)?);
    while b - a > WIDTH {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = phi(d)?;
        }
    }
    let (alpha, f) = if fc < fd { (c, fc) } else { (d, fd) };
    Ok(if f < phi0 { alpha } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexSet, Point};
    use crate::objective::subgradient;
    use crate::solver::negate;

    #[test]
    fn zero_direction_gives_zero_step() {
        let p = Problem::new(vec![
            ConvexSet::ball(Point::from([0.0, 0.0]), 1.0).unwrap(),
            ConvexSet::ball(Point::from([5.0, 0.0]), 1.0).unwrap(),
        ])
        .unwrap();
        let a = Configuration::new(vec![Point::from([1.0, 0.0]), Point::from([4.0, 0.0])]);
        let zero = SubgradientField { vectors: vec![Point::zeros(2), Point::zeros(2)] };
        assert_eq!(exact_line_search(&p, &a, &zero, 1.0).unwrap(), 0.0);
        // at the optimum every descent direction is blocked by the projections
        let g = negate(&subgradient(&a).unwrap());
        assert_eq!(exact_line_search(&p, &a, &g, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn matches_dense_grid_on_strictly_convex_profile() {
        // both blocks slide along their lines; phi(t) = 2 sqrt((4 - 3.2 t)^2 + 9)
        let p = Problem::new(vec![
            ConvexSet::line(Point::from([0.0, 0.0]), Point::from([1.0, 0.0])).unwrap(),
            ConvexSet::line(Point::from([0.0, 3.0]), Point::from([1.0, 0.0])).unwrap(),
        ])
        .unwrap();
        let a = Configuration::new(vec![Point::from([0.0, 0.0]), Point::from([4.0, 3.0])]);
        let dir = negate(&subgradient(&a).unwrap());
        let alpha = exact_line_search(&p, &a, &dir, 0.5).unwrap();
        let phi = |t: f64| {
            let pts = p
                .sets()
                .iter()
                .zip(a.points.iter().zip(&dir.vectors))
                .map(|(s, (x, d))| s.project(&x.offset(d, t)).unwrap())
                .collect();
            perimeter(&Configuration::new(pts))
        };
        let n = 1_000_000;
        let (mut best_t, mut best) = (0.0, phi(0.0));
        for i in 1..=n {
            let t = 2.0 * i as f64 / n as f64;
            let v = phi(t);
            if v < best {
                best = v;
                best_t = t;
            }
        }
        assert!((alpha - best_t).abs() < 1e-6, "{alpha} vs {best_t}");
        assert!((alpha - 1.25).abs() < 1e-6);
    }

    #[test]
    fn disc_start_profile_minimum() {
        let p = Problem::new(vec![
            ConvexSet::ball(Point::from([2.0, 3.0]), 1.0).unwrap(),
            ConvexSet::ball(Point::from([8.0, 4.0]), 2.0).unwrap(),
            ConvexSet::ball(Point::from([4.0, 11.0]), 3.0).unwrap(),
        ])
        .unwrap();
        let a = Configuration::new(vec![
            Point::from([1.0, 3.0]),
            Point::from([10.0, 4.0]),
            Point::from([1.0, 11.0]),
        ]);
        let dir = negate(&subgradient(&a).unwrap());
        let alpha = exact_line_search(&p, &a, &dir, 1.0).unwrap();
        // dense-grid minimiser of the projected profile at this start
        assert!((alpha - 4.6017).abs() < 1e-3, "{alpha}");
    }
}

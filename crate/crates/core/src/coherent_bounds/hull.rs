//! Concave majorants of sampled curves in the variable `n̄`.

use super::{uniform_grid, BoundCurve, CurveKind, Table, Tail, CEILING};
use crate::error::{Error, Result};

/// Indices of the upper concave hull of points sorted by `x` (monotone chain).
pub fn upper_hull_indices(xs: &[f64], ys: &[f64]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (xs[a] - xs[o]) * (ys[i] - ys[o]) - (ys[a] - ys[o]) * (xs[i] - xs[o]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    hull
}

fn hull_table(xs: &[f64], ys: &[f64], tail: Tail) -> Table {
    let idx = upper_hull_indices(xs, ys);
    Table { xs: idx.iter().map(|&i| xs[i]).collect(), ys: idx.iter().map(|&i| ys[i]).collect(), tail }
}

fn check_points(points: usize, grid_max: f64) -> Result<()> {
    if points < 3 {
        return Err(Error::InvalidParams(format!("concave hull needs at least 3 grid points, got {points}")));
    }
    if !(grid_max > 0.0 && grid_max.is_finite()) {
        return Err(Error::InvalidParams(format!("hull grid maximum must be positive, got {grid_max}")));
    }
    Ok(())
}

/// Smallest concave majorant of the curve's samples on a uniform grid over
/// `[0, grid_max]`, continued past the grid along its final segment.
///
/// Dominance is guaranteed at the grid points only.
pub fn concave_hull(curve: &BoundCurve, grid_max: f64, points: usize) -> Result<BoundCurve> {
    check_points(points, grid_max)?;
    let xs = uniform_grid(grid_max, points);
    let ys: Vec<f64> = xs.iter().map(|&x| curve.eval(x)).collect();
    let mut out = BoundCurve::new(curve.class, curve.guarantee, true, CurveKind::Table(hull_table(&xs, &ys, Tail::ExtendFinalSegment)));
    out.notes = curve.notes.clone();
    Ok(out)
}

/// Concave majorant valid everywhere, not only at the samples, for curves that are
/// monotone between consecutive grid points (all the closed-form classes are).
///
/// Knot `i` carries the largest sample among its neighbours, so the concave hull is at
/// least `max(f(x_i), f(x_{i+1}))` on each cell; past the grid nothing is known and the
/// curve sits at the ceiling.
pub fn certified_concave_majorant(curve: &BoundCurve, grid_max: f64, points: usize) -> Result<BoundCurve> {
    check_points(points, grid_max)?;
    let xs = uniform_grid(grid_max, points);
    let fs: Vec<f64> = xs.iter().map(|&x| curve.eval(x)).collect();
    let last = points - 1;
    let ys: Vec<f64> = (0..points)
        .map(|i| if i == last { CEILING } else { fs[i.saturating_sub(1)].max(fs[i]).max(fs[i + 1]) })
        .collect();
    let mut out = BoundCurve::new(curve.class, curve.guarantee, true, CurveKind::Table(hull_table(&xs, &ys, Tail::Ceiling)));
    out.notes = curve.notes.clone();
    out.notes.insert("certified_grid_max".into(), grid_max);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent_bounds::{gaussian_bound, lipschitz_bound, step_bound, InDistributionGuarantee};
    use proptest::prelude::*;

    fn g() -> InDistributionGuarantee {
        InDistributionGuarantee::new(0.3, 1.0).unwrap()
    }

    #[test]
    fn concave_input_is_unchanged_on_grid() {
        let c = gaussian_bound(g()).unwrap();
        let h = concave_hull(&c, 20.0, 201).unwrap();
        for x in uniform_grid(20.0, 201) {
            assert!((h.eval(x) - c.eval(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn step_hull_is_a_chord_to_the_ceiling() {
        // Grid spacing 0.1: the first sample past τ² = 1 is 1.1.
        let h = concave_hull(&step_bound(g()), 10.0, 101).unwrap();
        let t = h.table().unwrap();
        assert_eq!(t.xs.len(), 3);
        assert!((t.xs[1] - 1.1).abs() < 1e-12);
        assert!((h.eval(0.55) - (0.3 + 0.5 * 1.7)).abs() < 1e-12);
        assert_eq!(h.eval(5.0), 2.0);
    }

    #[test]
    fn idempotent() {
        let h = concave_hull(&lipschitz_bound(g()), 30.0, 121).unwrap();
        let hh = concave_hull(&h, 30.0, 121).unwrap();
        for x in uniform_grid(30.0, 241) {
            assert!((h.eval(x) - hh.eval(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(concave_hull(&step_bound(g()), 1.0, 2).is_err());
        assert!(certified_concave_majorant(&step_bound(g()), 0.0, 10).is_err());
    }

    proptest! {
        #[test]
        fn certified_majorant_dominates_off_grid(x in 0.0f64..40.0, eps0 in 1e-4f64..1.5, tau in 0.3f64..2.0) {
            let gg = InDistributionGuarantee::new(eps0, tau).unwrap();
            for c in [step_bound(gg), lipschitz_bound(gg)] {
                let h = certified_concave_majorant(&c, 30.0, 301).unwrap();
                prop_assert!(h.eval(x) >= c.eval(x) - 1e-12);
                let (a, b) = (0.37 * x, x);
                prop_assert!(0.5 * (h.eval(a) + h.eval(b)) <= h.eval(0.5 * (a + b)) + 1e-12);
            }
        }

        #[test]
        fn grid_hull_dominates_samples(eps0 in 1e-4f64..1.5, tau in 0.3f64..2.0) {
            let gg = InDistributionGuarantee::new(eps0, tau).unwrap();
            let c = lipschitz_bound(gg);
            let h = concave_hull(&c, 25.0, 126).unwrap();
            for x in uniform_grid(25.0, 126) {
                prop_assert!(h.eval(x) >= c.eval(x) - 1e-12);
            }
        }
    }
}

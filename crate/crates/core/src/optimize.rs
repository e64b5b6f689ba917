//! One-dimensional minimization: a deterministic grid seeds a golden-section refinement.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`. Returns `(x, f(x))`.
pub fn golden_section_minimize<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, max_evals: usize) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut evals = 2;
    while evals < max_evals && (b - a) > 1e-14 * (a.abs() + b.abs()).max(1e-300) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        evals += 1;
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimizes `f` over `[lo, hi]` in `ln x`: a `grid`-point scan, then golden-section
/// refinement in the bracket around the best grid point. Ties keep the smaller `x`.
pub fn minimize_log_scale<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    assert!(lo > 0.0 && hi > lo && grid >= 3);
    let (la, lb) = (lo.ln(), hi.ln());
    let xs: Vec<f64> = (0..grid).map(|i| (la + (lb - la) * i as f64 / (grid - 1) as f64).exp()).collect();
    let mut best = (xs[0], f(xs[0]));
    let mut best_i = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let left = xs[best_i.saturating_sub(1)].ln();
    let right = xs[(best_i + 1).min(grid - 1)].ln();
    let (lx, v) = golden_section_minimize(|t| f(t.exp()), left, right, 80);
    if v < best.1 {
        (lx.exp(), v)
    } else {
        best
    }
}

/// Same as [`minimize_log_scale`] on a linear axis.
pub fn minimize_linear<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    assert!(hi > lo && grid >= 3);
    let xs: Vec<f64> = (0..grid).map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64).collect();
    let mut best = (xs[0], f(xs[0]));
    let mut best_i = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        let v = f(x);
        if v < best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let left = xs[best_i.saturating_sub(1)];
    let right = xs[(best_i + 1).min(grid - 1)];
    let (x, v) = golden_section_minimize(&mut f, left, right, 80);
    if v < best.1 {
        (x, v)
    } else {
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let (x, v) = golden_section_minimize(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_scale_finds_small_minimizer() {
        let (x, _) = minimize_log_scale(|s| (s.ln() - (1e-6f64).ln()).powi(2), 1e-8, 0.499, 20);
        assert!((x / 1e-6 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn grid_beats_refinement_on_plateau() {
        let (x, v) = minimize_linear(|x| if x < 0.5 { 1.0 } else { 2.0 }, 0.0, 1.0, 11);
        assert_eq!(v, 1.0);
        assert_eq!(x, 0.0);
    }
}

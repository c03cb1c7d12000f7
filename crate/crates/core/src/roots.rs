//! Bracketed scalar root finding and one-dimensional maximisation.

use crate::error::{RateError, Result};

const MAX_ITER: usize = 2000;

/// Bisection on `[lo, hi]`, which must bracket a sign change of `f`.
/// Stops once the bracket is narrower than `xtol` or a zero is hit exactly.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64, what: &'static str) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(RateError::NoBracket { what, lo, hi });
    }
    let neg_at_a = fa < 0.0;
    for _ in 0..MAX_ITER {
        let m = 0.5 * (a + b);
        if b - a <= xtol || m <= a || m >= b {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
    }
    Err(RateError::Numeric(format!("bisection on `{what}` did not converge")))
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x, f(x))`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > xtol {
        if fc >= fd {
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
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // keep the best point seen at the end
    [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |best, p| if p.1 > best.1 { p } else { best })
}

/// Maximise `f` over `[lo, hi]` (both positive) on a logarithmic axis: a
/// coarse scan of `scan` points picks the best cell, then golden-section
/// search refines inside the neighbouring cells. Non-finite values of `f`
/// count as `-inf`.
pub fn log_scan_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, scan: usize, log_tol: f64) -> (f64, f64) {
    let g = |t: f64| {
        let v = f(t.exp());
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let (la, lb) = (lo.ln(), hi.ln());
    let n = scan.max(3);
    let grid: Vec<f64> = (0..n).map(|i| la + (lb - la) * i as f64 / (n - 1) as f64).collect();
    let best = grid
        .iter()
        .map(|&t| g(t))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    let left = grid[best.0.saturating_sub(1)];
    let right = grid[(best.0 + 1).min(n - 1)];
    let (t, v) = golden_max(g, left, right, log_tol);
    let (t, v) = if best.1 > v { (grid[best.0], best.1) } else { (t, v) };
    (t.exp().clamp(lo, hi), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, "sq").unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn bisect_endpoint_root() {
        assert_eq!(bisect(|x| x - 1.0, 0.0, 1.0, 1e-12, "lin").unwrap(), 1.0);
    }

    #[test]
    fn bisect_no_bracket() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, "pos"),
            Err(RateError::NoBracket { .. })
        ));
    }

    #[test]
    fn golden_parabola() {
        let (x, fx) = golden_max(|x| -(x - 0.3).powi(2), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-9);
        assert!(fx.abs() < 1e-18);
    }

    #[test]
    fn log_scan_finds_interior_max() {
        let (x, _) = log_scan_max(|m| m * (-m / 0.004).exp(), 1e-6, 2.0, 64, 1e-10);
        assert!((x / 0.004 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn log_scan_edge_max() {
        let (x, _) = log_scan_max(|m| -m, 1e-3, 1.0, 16, 1e-10);
        assert!((x - 1e-3).abs() < 1e-9);
    }
}

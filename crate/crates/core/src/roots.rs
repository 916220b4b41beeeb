//! Bracketed scalar root finding.

/// Boundary of a predicate on `[lo, hi]`: `pred(lo)` is assumed true and
/// `pred(hi)` false. Returns the last point known to satisfy `pred` once the
/// bracket is narrower than `tol`.
pub fn bisect_predicate<P: Fn(f64) -> bool>(pred: P, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Root of an increasing function on `[lo, hi]` with `g(lo) ≤ 0 ≤ g(hi)`.
///
/// `g` returns the value and derivative. Newton steps that leave the bracket
/// or fail to halve it fall back to bisection.
pub fn newton_bracketed<G>(g: G, mut lo: f64, mut hi: f64, x0: f64, xtol: f64, max_iter: usize) -> f64
where
    G: Fn(f64) -> (f64, f64),
{
    let mut x = if x0 > lo && x0 < hi { x0 } else { 0.5 * (lo + hi) };
    let mut dx_old = hi - lo;
    for _ in 0..max_iter {
        let (v, d) = g(x);
        if v == 0.0 {
            return x;
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = if d > 0.0 && d.is_finite() { x - v / d } else { f64::NAN };
        let dx;
        if newton.is_finite() && newton > lo && newton < hi && (newton - x).abs() < 0.5 * dx_old {
            dx = (newton - x).abs();
            x = newton;
        } else {
            let mid = 0.5 * (lo + hi);
            dx = (mid - x).abs();
            x = mid;
        }
        dx_old = dx;
        if dx <= xtol * (1.0 + x.abs()) || hi - lo <= xtol * (1.0 + x.abs()) {
            return x;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_two() {
        let r = newton_bracketed(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, 1.0, 1e-15, 100);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn predicate_edge() {
        let (lo, hi) = bisect_predicate(|x| x < 0.3, 0.0, 1.0, 1e-12);
        assert!(lo < 0.3 && hi >= 0.3 && hi - lo <= 1e-12);
    }
}

//! Bracketed bisection for monotone scalar equations.

pub const MAX_BISECTION_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub point: f64,
    /// `|g(point)|`
    pub residual: f64,
    pub iterations: usize,
}

/// Find `x` in `[lo, hi]` with `|g(x)| <= tol`, where `g(lo)` and `g(hi)`
/// have opposite signs. Stops after `max_iter` halvings or when the bracket
/// can no longer shrink; the best evaluated point is returned then.
pub fn bisect<G>(mut g: G, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Root
where
    G: FnMut(f64) -> f64,
{
    let g_lo = g(lo);
    let g_hi = g(hi);
    if g_lo.abs() <= tol {
        return Root { point: lo, residual: g_lo.abs(), iterations: 0 };
    }
    if g_hi.abs() <= tol {
        return Root { point: hi, residual: g_hi.abs(), iterations: 0 };
    }
    debug_assert!(g_lo.signum() != g_hi.signum(), "root is not bracketed");
    let lo_negative = g_lo < 0.0;
    let mut best = if g_lo.abs() < g_hi.abs() { (lo, g_lo.abs()) } else { (hi, g_hi.abs()) };

    for it in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Root { point: best.0, residual: best.1, iterations: it };
        }
        let gm = g(mid);
        if gm.abs() < best.1 {
            best = (mid, gm.abs());
        }
        if gm.abs() <= tol {
            return Root { point: mid, residual: gm.abs(), iterations: it };
        }
        if (gm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Root { point: best.0, residual: best.1, iterations: max_iter }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, MAX_BISECTION_ITERATIONS);
        assert!((r.point - 2f64.sqrt()).abs() < 1e-14);
        assert!(r.residual <= 1e-14);
    }

    #[test]
    fn handles_decreasing_functions() {
        let r = bisect(|x| 1.0 - x, 0.0, 3.0, 1e-15, MAX_BISECTION_ITERATIONS);
        assert!((r.point - 1.0).abs() < 1e-15);
    }

    #[test]
    fn endpoint_roots_return_immediately() {
        let r = bisect(|x| x, 0.0, 1.0, 0.0, 10);
        assert_eq!(r.point, 0.0);
        assert_eq!(r.iterations, 0);
    }
}

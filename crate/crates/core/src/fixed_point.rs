use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default residual target for accident-probability fixed points.
pub const FIXED_POINT_TOL: f64 = 1e-10;

pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub value: f64,
    /// `|map(value) - value|`
    pub residual: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

/// Finds `x` in `[lo, hi]` with `map(x) = x` by bisection on `map(x) - x`.
///
/// The gap must change sign over the bracket (or vanish at an endpoint).
/// Bisection runs until the bracket cannot be split further, so the returned
/// point is as accurate as the map allows; `tol` only bounds the accepted
/// residual.
pub fn fixed_point_bisect<F>(map: F, lo: f64, hi: f64, tol: f64) -> Result<FixedPointReport>
where
    F: Fn(f64) -> f64,
{
    let gap = |x: f64| map(x) - x;
    let bracket = (lo, hi);
    let (g_lo, g_hi) = (gap(lo), gap(hi));
    if g_lo.abs() <= tol {
        return Ok(FixedPointReport {
            value: lo,
            residual: g_lo.abs(),
            iterations: 0,
            bracket,
        });
    }
    if g_hi.abs() <= tol {
        return Ok(FixedPointReport {
            value: hi,
            residual: g_hi.abs(),
            iterations: 0,
            bracket,
        });
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Bracket { lo, hi });
    }

    let lo_positive = g_lo > 0.0;
    let (mut a, mut b) = (lo, hi);
    let (mut best, mut best_gap) = if g_lo.abs() < g_hi.abs() {
        (lo, g_lo.abs())
    } else {
        (hi, g_hi.abs())
    };
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let g = gap(mid);
        if g.abs() < best_gap {
            best = mid;
            best_gap = g.abs();
        }
        if g == 0.0 {
            break;
        }
        if (g > 0.0) == lo_positive {
            a = mid;
        } else {
            b = mid;
        }
    }
    if best_gap > tol {
        return Err(Error::NonConvergence {
            residual: best_gap,
            iterations,
        });
    }
    Ok(FixedPointReport {
        value: best,
        residual: best_gap,
        iterations,
        bracket,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn linear_map() {
        let rep = fixed_point_bisect(|p| 0.28 - 0.08 * p, 0.25, 0.375, FIXED_POINT_TOL).unwrap();
        assert!((rep.value - 0.28 / 1.08).abs() < 1e-15);
        assert!(rep.residual <= FIXED_POINT_TOL);
    }

    #[test]
    fn constant_map() {
        let rep = fixed_point_bisect(|_| 0.3, 0.1, 0.9, FIXED_POINT_TOL).unwrap();
        assert!((rep.value - 0.3).abs() < 1e-15);
    }

    #[test]
    fn identity_map_returns_lower_end() {
        let rep = fixed_point_bisect(|p| p, 0.2, 0.7, FIXED_POINT_TOL).unwrap();
        assert_eq!(rep.value, 0.2);
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            fixed_point_bisect(|p| p + 0.1, 0.0, 1.0, FIXED_POINT_TOL),
            Err(Error::Bracket { .. })
        ));
    }

    #[test]
    fn jump_without_fixed_point() {
        let step = |p: f64| if p < 0.5 { 0.9 } else { 0.1 };
        assert!(matches!(
            fixed_point_bisect(step, 0.0, 1.0, FIXED_POINT_TOL),
            Err(Error::NonConvergence { .. })
        ));
    }

    proptest! {
        #[test]
        fn decreasing_affine_maps(c in 0.0..1.0f64, slope in 0.0..3.0f64) {
            let map = |p: f64| c - slope * p;
            let rep = fixed_point_bisect(map, -1.0, 2.0, FIXED_POINT_TOL).unwrap();
            prop_assert!((rep.value - c / (1.0 + slope)).abs() <= 1e-12);
            prop_assert!(rep.residual <= FIXED_POINT_TOL);
        }
    }
}

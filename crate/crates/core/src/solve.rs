//! Bisection on monotone threshold curves.

use crate::{Error, Result};

/// Locates the boundary of a monotone predicate by bisection.
///
/// Requires `pred(lo) == false` and `pred(hi) == true`; returns the midpoint
/// of the final bracket once its width drops below
/// `abs_tol + rel_tol * |mid|`. The predicate is assumed monotone (false
/// below the boundary, true at and above it), which is how every threshold
/// in this crate presents itself.
pub fn bisect_predicate(
    pred: impl Fn(f64) -> bool,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("bad bracket [{lo}, {hi}]")));
    }
    if pred(lo) {
        return Err(Error::NonBracketing(format!(
            "predicate already true at lo = {lo}"
        )));
    }
    if !pred(hi) {
        return Err(Error::NonBracketing(format!(
            "predicate still false at hi = {hi}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket collapsed to adjacent floats
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= abs_tol + rel_tol * mid.abs() {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_a_step_boundary() {
        let root = bisect_predicate(|x| x * x >= 2.0, 0.0, 2.0, 0.0, 1e-14).unwrap();
        assert!((root - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn converges_to_machine_precision_bracket() {
        let root = bisect_predicate(|x| x >= 1.0 / 3.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert!((root - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_bracketing_ranges() {
        assert!(matches!(
            bisect_predicate(|x| x > 0.0, 1.0, 2.0, 1e-12, 0.0),
            Err(Error::NonBracketing(_))
        ));
        assert!(matches!(
            bisect_predicate(|x| x > 10.0, 1.0, 2.0, 1e-12, 0.0),
            Err(Error::NonBracketing(_))
        ));
        assert!(bisect_predicate(|x| x > 0.0, 2.0, 1.0, 1e-12, 0.0).is_err());
    }
}

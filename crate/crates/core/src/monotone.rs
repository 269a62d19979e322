//! Inversion of strictly decreasing functions of a positive variable.

use crate::error::{Error, Result};

const MAX_BISECTIONS: usize = 400;

/// Search window in the positive variable of a decreasing function.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Window {
    pub lo: f64,
    pub hi: f64,
    /// First probe point of the geometric bracket search.
    pub start: f64,
}

/// Solve `f(u) = target` for a strictly decreasing `f` on `window`.
///
/// The bracket is grown geometrically (factor 16) from `window.start` until it
/// straddles the target, then refined by bisection on `log u` until the
/// bracket endpoints are adjacent doubles.
pub(crate) fn invert_decreasing<F>(
    function: &'static str,
    f: F,
    target: f64,
    window: Window,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let not_found = || Error::BracketNotFound {
        function,
        target,
        lo: window.lo,
        hi: window.hi,
    };

    let mut lo = window.start;
    let mut hi = window.start;
    let f_start = f(window.start)?;
    if f_start == target {
        return Ok(window.start);
    }
    if f_start > target {
        // root lies to the right
        loop {
            if hi >= window.hi {
                return Err(not_found());
            }
            lo = hi;
            hi = (hi * 16.0).min(window.hi);
            if f(hi)? <= target {
                break;
            }
        }
    } else {
        loop {
            if lo <= window.lo {
                return Err(not_found());
            }
            hi = lo;
            lo = (lo / 16.0).max(window.lo);
            if f(lo)? >= target {
                break;
            }
        }
    }

    // f(lo) >= target >= f(hi)
    for _ in 0..MAX_BISECTIONS {
        // split the square root so tiny brackets do not underflow
        let mid = lo.sqrt() * hi.sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v == target {
            return Ok(mid);
        }
        if v > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w() -> Window {
        Window {
            lo: 1e-12,
            hi: 1e12,
            start: 1.0,
        }
    }

    #[test]
    fn inverts_reciprocal() {
        for &y in &[1e-9, 0.5, 1.0, 3.0, 1e10] {
            let x = invert_decreasing("1/x", |x| Ok(1.0 / x), y, w()).unwrap();
            assert!((x * y - 1.0).abs() < 1e-14, "{x} {y}");
        }
    }

    #[test]
    fn reports_out_of_window() {
        let err = invert_decreasing("1/x", |x| Ok(1.0 / x), 1e-13, w()).unwrap_err();
        assert!(matches!(err, Error::BracketNotFound { .. }));
        let err = invert_decreasing("1/x", |x| Ok(1.0 / x), 1e13, w()).unwrap_err();
        assert!(matches!(err, Error::BracketNotFound { .. }));
    }
}

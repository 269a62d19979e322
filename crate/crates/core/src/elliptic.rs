//! Complete elliptic integral of the first kind and the Grötzsch ring
//! modulus, both evaluated through the arithmetic-geometric mean.
//!
//! Every exact planar capacity in this crate reduces to ratios of AGM values,
//! so the functions here also come in "pair" form taking a modulus together
//! with its complement `r' = sqrt(1 - r^2)`. Callers that already know `r'`
//! to full relative precision (tiny `1 - r`) should use those.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{finite, Error, Result};

/// Relative gap `|a - b| / a` at which the AGM iteration stops.
pub const AGM_TOLERANCE: f64 = 1e-15;
/// Hard cap on AGM iterations; convergence is quadratic so this is never hit
/// for finite positive input.
pub const AGM_MAX_ITERATIONS: usize = 64;

/// Outcome of an AGM evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticResult {
    pub value: f64,
    pub iterations: usize,
    /// Final relative gap between the arithmetic and geometric means.
    pub residual: f64,
}

/// Arithmetic-geometric mean with its iteration record.
pub fn agm_detailed(a: f64, b: f64) -> Result<EllipticResult> {
    finite("a", a)?;
    finite("b", b)?;
    if a <= 0.0 {
        return Err(Error::Domain {
            name: "a",
            value: a,
            expected: "a > 0",
        });
    }
    if b < 0.0 {
        return Err(Error::Domain {
            name: "b",
            value: b,
            expected: "b >= 0",
        });
    }
    if b == 0.0 {
        return Ok(EllipticResult {
            value: 0.0,
            iterations: 0,
            residual: 0.0,
        });
    }

    let (mut a, mut b) = (a, b);
    let mut iterations = 0;
    loop {
        let gap = (a - b).abs() / a.max(b);
        if gap < AGM_TOLERANCE {
            return Ok(EllipticResult {
                value: 0.5 * (a + b),
                iterations,
                residual: gap,
            });
        }
        if iterations == AGM_MAX_ITERATIONS {
            return Err(Error::IterationCap {
                what: "arithmetic-geometric mean",
                cap: AGM_MAX_ITERATIONS,
            });
        }
        let next_a = 0.5 * (a + b);
        b = a.sqrt() * b.sqrt();
        a = next_a;
        iterations += 1;
    }
}

/// Arithmetic-geometric mean of `a > 0` and `b >= 0`.
pub fn agm(a: f64, b: f64) -> Result<f64> {
    agm_detailed(a, b).map(|r| r.value)
}

/// `sqrt(1 - r^2)` without cancellation near `r = 1`.
#[inline]
pub fn complement(r: f64) -> f64 {
    ((1.0 - r) * (1.0 + r)).max(0.0).sqrt()
}

/// Complete elliptic integral of the first kind `K(r)`, `0 <= r < 1`, with
/// `r` the modulus (not the parameter `m = r^2`).
pub fn ellint_k(r: f64) -> Result<f64> {
    finite("r", r)?;
    if !(0.0..1.0).contains(&r) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "0 <= r < 1",
        });
    }
    ellint_k_from_complement(complement(r))
}

/// `K(r)` given only the complementary modulus `r'`.
pub(crate) fn ellint_k_from_complement(rc: f64) -> Result<f64> {
    Ok(PI / (2.0 * agm(1.0, rc)?))
}

/// Grötzsch ring modulus `mu(r) = (pi/2) K(r') / K(r)`, `0 < r < 1`.
pub fn mu(r: f64) -> Result<f64> {
    finite("r", r)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "0 < r < 1",
        });
    }
    mu_pair(r, complement(r))
}

/// `mu` for a modulus given together with its complement. Both must be in
/// `(0, 1)` and satisfy `r^2 + rc^2 = 1` up to rounding.
pub(crate) fn mu_pair(r: f64, rc: f64) -> Result<f64> {
    // K(r') / K(r) = agm(1, r') / agm(1, r)
    Ok(FRAC_PI_2 * agm(1.0, rc)? / agm(1.0, r)?)
}

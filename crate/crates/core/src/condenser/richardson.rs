//! Richardson extrapolation over three nested grids.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    /// Extrapolant, or the finest value when extrapolation was refused.
    pub value: f64,
    /// Fitted convergence order `q` in `C(h) = C + a h^q`.
    pub order: Option<f64>,
    pub refused: bool,
}

/// Extrapolate values computed at `h`, `h/2`, `h/4`.
///
/// The differences must share a sign and shrink; otherwise the finest value is
/// returned with `refused` set.
pub fn richardson_extrapolate(coarse: f64, medium: f64, fine: f64) -> Extrapolation {
    let d1 = medium - coarse;
    let d2 = fine - medium;
    // differences at rounding level: the sequence has converged
    let noise = 64.0 * f64::EPSILON * fine.abs();
    if d1.abs() <= noise && d2.abs() <= noise {
        return Extrapolation {
            value: fine,
            order: None,
            refused: false,
        };
    }
    let refuse = Extrapolation {
        value: fine,
        order: None,
        refused: true,
    };
    if !(d1 * d2 > 0.0) || d2.abs() >= d1.abs() {
        return refuse;
    }
    let ratio = d1 / d2;
    let order = ratio.log2();
    // C = C3 + d2 / (2^q - 1) with 2^q = d1 / d2
    let value = fine + d2 / (ratio - 1.0);
    if !value.is_finite() {
        return refuse;
    }
    Extrapolation {
        value,
        order: Some(order),
        refused: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence() {
        let e = richardson_extrapolate(3.5, 3.5, 3.5);
        assert_eq!(e.value, 3.5);
        assert!(!e.refused);
    }

    #[test]
    fn rounding_noise_counts_as_converged() {
        let e = richardson_extrapolate(6.283185307179592, 6.2831853071795924, 6.283185307179563);
        assert!(!e.refused);
        assert_eq!(e.value, 6.283185307179563);
    }

    #[test]
    fn oscillating_sequence_is_refused() {
        let e = richardson_extrapolate(1.0, 1.2, 1.1);
        assert!(e.refused);
        assert_eq!(e.value, 1.1);
    }

    #[test]
    fn recovers_power_law() {
        let f = |h: f64| 2.0 + 0.3 * h.powf(1.5);
        let e = richardson_extrapolate(f(0.4), f(0.2), f(0.1));
        assert!((e.value - 2.0).abs() < 1e-12);
        assert!((e.order.unwrap() - 1.5).abs() < 1e-12);
    }
}

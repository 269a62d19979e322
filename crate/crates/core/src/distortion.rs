//! Distortion functions `phi_{K,n}` and `psi_{K,n}`.
//!
//! `phi_{K,n}(r) = 1 / gamma_n^{-1}(K gamma_n(1/r))` on `(0, 1)` with the
//! endpoints fixed, and `psi_{K,n}(r) = sqrt(1 - phi_{1/K,n}(sqrt(1 - r^2))^2)`.
//! Both are computed on modulus pairs `(r, sqrt(1 - r^2))` so that values
//! pinned against 0 or 1 keep their complement to full relative precision.

use crate::capacity::CapacityEvaluator;
use crate::elliptic::complement;
use crate::error::{finite, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionParams {
    pub k: f64,
    pub dimension: usize,
}

impl DistortionParams {
    pub fn new(k: f64, dimension: usize) -> Result<Self> {
        finite("K", k)?;
        if k <= 0.0 {
            return Err(Error::Domain {
                name: "K",
                value: k,
                expected: "K > 0",
            });
        }
        Ok(DistortionParams { k, dimension })
    }

    pub fn planar(k: f64) -> Result<Self> {
        Self::new(k, 2)
    }

    fn evaluator(&self) -> Result<CapacityEvaluator> {
        let ev = CapacityEvaluator::new(self.dimension)?;
        if !ev.can_evaluate() {
            return Err(Error::AbstractEvaluation(self.dimension));
        }
        Ok(ev)
    }
}

/// A number in `[0, 1]` together with `sqrt(1 - value^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusPair {
    pub value: f64,
    pub complement: f64,
}

impl ModulusPair {
    pub fn from_value(r: f64) -> Self {
        ModulusPair {
            value: r,
            complement: complement(r),
        }
    }

    pub fn swapped(self) -> Self {
        ModulusPair {
            value: self.complement,
            complement: self.value,
        }
    }

    /// `1/t` and its complement for `t = sqrt(1 + e)`.
    fn from_excess(e: f64) -> Self {
        ModulusPair {
            value: 1.0 / (1.0 + e).sqrt(),
            complement: (e / (1.0 + e)).sqrt(),
        }
    }
}

fn unit_interval(r: f64) -> Result<()> {
    finite("r", r)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "0 <= r <= 1",
        });
    }
    Ok(())
}

impl CapacityEvaluator {
    /// `phi_{K,n}` on a modulus pair, returning the image pair.
    pub fn phi_pair(&self, k: f64, r: ModulusPair) -> Result<ModulusPair> {
        if r.value == 0.0 || r.value == 1.0 {
            return Ok(r);
        }
        // gamma(1/r) in the excess variable: 1/r^2 - 1 = (r'/r)^2
        let e_in = (r.complement / r.value).powi(2);
        let e_out = self.gamma_inv_excess(k * self.gamma_excess(e_in)?)?;
        Ok(ModulusPair::from_excess(e_out))
    }

    pub fn phi(&self, k: f64, r: f64) -> Result<f64> {
        unit_interval(r)?;
        Ok(self.phi_pair(k, ModulusPair::from_value(r))?.value)
    }

    /// `psi_{K,n}` on a modulus pair.
    pub fn psi_pair(&self, k: f64, r: ModulusPair) -> Result<ModulusPair> {
        // psi_K(r) is the complement of phi_{1/K}(r')
        Ok(self.phi_pair(1.0 / k, r.swapped())?.swapped())
    }

    pub fn psi(&self, k: f64, r: f64) -> Result<f64> {
        unit_interval(r)?;
        Ok(self.psi_pair(k, ModulusPair::from_value(r))?.value)
    }

    /// Right-hand side of `tau^{-1}(K tau(t)) = (1 - phi^2) / phi^2` with
    /// `phi = phi_{K,n}(1/sqrt(1 + t))`.
    pub fn tau_inv_scaled(&self, k: f64, t: f64) -> Result<f64> {
        finite("t", t)?;
        if t <= 0.0 {
            return Err(Error::Domain {
                name: "t",
                value: t,
                expected: "t > 0",
            });
        }
        let arg = ModulusPair::from_excess(t);
        let phi = self.phi_pair(k, arg)?;
        Ok((phi.complement / phi.value).powi(2))
    }
}

pub fn phi(params: &DistortionParams, r: f64) -> Result<f64> {
    params.evaluator()?.phi(params.k, r)
}

pub fn psi(params: &DistortionParams, r: f64) -> Result<f64> {
    params.evaluator()?.psi(params.k, r)
}

pub fn tau_inv_scaled(params: &DistortionParams, t: f64) -> Result<f64> {
    params.evaluator()?.tau_inv_scaled(params.k, t)
}

/// The two ratios bounded by the classical `psi` estimate for `K >= 1`:
/// `2^(1-2K) <= psi_{1/K}(r) / r^K <= 1` and `1 <= psi_K(r) / r^(1/K) <= 2^(2-1/K)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiBoundMargins {
    pub k: f64,
    pub r: f64,
    /// `psi_{1/K}(r) / r^K`
    pub contracting_ratio: f64,
    pub contracting_bounds: (f64, f64),
    /// `psi_K(r) / r^(1/K)`
    pub expanding_ratio: f64,
    pub expanding_bounds: (f64, f64),
}

impl PsiBoundMargins {
    /// Smallest distance of either ratio to the edge of its interval;
    /// negative means a violation.
    pub fn margin(&self) -> f64 {
        let m = |x: f64, (lo, hi): (f64, f64)| (x - lo).min(hi - x);
        m(self.contracting_ratio, self.contracting_bounds)
            .min(m(self.expanding_ratio, self.expanding_bounds))
    }

    pub fn holds(&self, rel_tol: f64) -> bool {
        let within =
            |x: f64, (lo, hi): (f64, f64)| x >= lo * (1.0 - rel_tol) && x <= hi * (1.0 + rel_tol);
        within(self.contracting_ratio, self.contracting_bounds)
            && within(self.expanding_ratio, self.expanding_bounds)
    }
}

pub fn psi_bound_margins(params: &DistortionParams, r: f64) -> Result<PsiBoundMargins> {
    let k = params.k;
    if k < 1.0 {
        return Err(Error::Domain {
            name: "K",
            value: k,
            expected: "K >= 1 for the psi bounds",
        });
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "0 < r <= 1",
        });
    }
    let ev = params.evaluator()?;
    Ok(PsiBoundMargins {
        k,
        r,
        contracting_ratio: ev.psi(1.0 / k, r)? / r.powf(k),
        contracting_bounds: (2f64.powf(1.0 - 2.0 * k), 1.0),
        expanding_ratio: ev.psi(k, r)? / r.powf(1.0 / k),
        expanding_bounds: (1.0, 2f64.powf(2.0 - 1.0 / k)),
    })
}

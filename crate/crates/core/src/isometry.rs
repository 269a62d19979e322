//! Candidate maps of the punctured plane and the measurements applied to
//! them: `lambda`-distortion on pairs where `lambda` is known exactly, sampled
//! linear dilatation, the quantitative dilatation bounds for `lambda`-isometries,
//! and the spot check that `e1`'s metric sphere through `r e1` bulges outward.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::CapacityEvaluator;
use crate::condenser::{solve_capacity, CondenserSpec, SolveReport};
use crate::distortion::ModulusPair;
use crate::error::{finite, Error, Result};
use crate::lambda::{lambda_punctured, PairClass, PuncturedPair};

/// Samples per circle in dilatation estimates.
pub const DEFAULT_SAMPLES: usize = 64;
pub const MIN_SAMPLES: usize = 8;
/// Largest `lambda` discrepancy accepted as an isometry.
pub const ISOMETRY_TOLERANCE: f64 = 1e-10;
/// Dilatation bound for `lambda`-isometries of the punctured plane.
pub const ISOMETRY_ESTIMATE_BOUND: f64 = 4.0;
/// Dilatation bound for `lambda`-isometries of general domains.
pub const DILATATION_BOUND: f64 = 256.0;
/// Relative accuracy credited to the condenser oracle.
pub const ORACLE_TOLERANCE: f64 = 0.02;

/// A map of the extended plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PlaneMap {
    /// `z -> (a z + b) / (c z + d)`
    Mobius {
        a: Complex64,
        b: Complex64,
        c: Complex64,
        d: Complex64,
    },
    /// `z -> z |z|^(exponent - 1)`
    RadialPower { exponent: f64 },
    /// Applied first to last.
    Composition { maps: Vec<PlaneMap> },
}

fn cfinite(name: &'static str, z: Complex64) -> Result<()> {
    finite(name, z.re)?;
    finite(name, z.im)?;
    Ok(())
}

impl PlaneMap {
    pub fn mobius(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<PlaneMap> {
        for (n, z) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            cfinite(n, z)?;
        }
        if a * d - b * c == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidMap(
                "Möbius determinant ad - bc is zero".into(),
            ));
        }
        Ok(PlaneMap::Mobius { a, b, c, d })
    }

    pub fn identity() -> PlaneMap {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        PlaneMap::Mobius {
            a: one,
            b: zero,
            c: zero,
            d: one,
        }
    }

    /// `z -> c z`
    pub fn scaling(c: Complex64) -> Result<PlaneMap> {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::mobius(c, zero, zero, one)
    }

    /// `z -> c / z`
    pub fn inversion(c: Complex64) -> Result<PlaneMap> {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self::mobius(zero, c, one, zero)
    }

    pub fn radial_power(exponent: f64) -> Result<PlaneMap> {
        finite("exponent", exponent)?;
        if exponent <= 0.0 {
            return Err(Error::InvalidMap(
                "radial-power exponent must be positive".into(),
            ));
        }
        Ok(PlaneMap::RadialPower { exponent })
    }

    /// Composition applying `maps[0]` first. Nested compositions are
    /// flattened and neighbouring Möbius maps multiplied out.
    pub fn compose(maps: Vec<PlaneMap>) -> Result<PlaneMap> {
        if maps.is_empty() {
            return Err(Error::InvalidMap("empty composition".into()));
        }
        let mut flat: Vec<PlaneMap> = Vec::new();
        for m in maps {
            m.validate()?;
            let parts = match m {
                PlaneMap::Composition { maps } => maps,
                other => vec![other],
            };
            for p in parts {
                match (flat.last_mut(), p) {
                    (
                        Some(PlaneMap::Mobius { a, b, c, d }),
                        PlaneMap::Mobius {
                            a: a2,
                            b: b2,
                            c: c2,
                            d: d2,
                        },
                    ) => {
                        // second after first: [a2 b2; c2 d2] [a b; c d]
                        let (na, nb) = (a2 * *a + b2 * *c, a2 * *b + b2 * *d);
                        let (nc, nd) = (c2 * *a + d2 * *c, c2 * *b + d2 * *d);
                        *a = na;
                        *b = nb;
                        *c = nc;
                        *d = nd;
                    }
                    (_, p) => flat.push(p),
                }
            }
        }
        if flat.len() == 1 {
            Ok(flat.pop().unwrap())
        } else {
            Ok(PlaneMap::Composition { maps: flat })
        }
    }

    /// Check the invariants of a deserialized map.
    pub fn validate(&self) -> Result<()> {
        match self {
            PlaneMap::Mobius { a, b, c, d } => Self::mobius(*a, *b, *c, *d).map(|_| ()),
            PlaneMap::RadialPower { exponent } => Self::radial_power(*exponent).map(|_| ()),
            PlaneMap::Composition { maps } => {
                if maps.is_empty() {
                    return Err(Error::InvalidMap("empty composition".into()));
                }
                maps.iter().try_for_each(PlaneMap::validate)
            }
        }
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        cfinite("z", z)?;
        match self {
            PlaneMap::Mobius { a, b, c, d } => {
                let den = c * z + d;
                if den == Complex64::new(0.0, 0.0) {
                    return Err(Error::Pole { re: z.re, im: z.im });
                }
                let w = (a * z + b) / den;
                if !(w.re.is_finite() && w.im.is_finite()) {
                    return Err(Error::Pole { re: z.re, im: z.im });
                }
                Ok(w)
            }
            PlaneMap::RadialPower { exponent } => {
                let r = z.norm();
                if r == 0.0 {
                    return Ok(z);
                }
                Ok(z * r.powf(exponent - 1.0))
            }
            PlaneMap::Composition { maps } => maps.iter().try_fold(z, |w, m| m.apply(w)),
        }
    }

    /// Whether the map preserves `{0, inf}` as a set, i.e. maps the punctured
    /// plane onto itself.
    pub fn punctured_compatible(&self) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            PlaneMap::Mobius { a, b, c, d } => {
                (*b == zero && *c == zero) || (*a == zero && *d == zero)
            }
            PlaneMap::RadialPower { .. } => true,
            PlaneMap::Composition { maps } => maps.iter().all(PlaneMap::punctured_compatible),
        }
    }

    /// Finite pole of the first stage, if it is Möbius.
    fn leading_pole(&self) -> Option<Complex64> {
        match self {
            PlaneMap::Mobius { c, d, .. } if *c != Complex64::new(0.0, 0.0) => Some(-d / c),
            PlaneMap::Composition { maps } => maps[0].leading_pole(),
            _ => None,
        }
    }
}

/// Pairs of the punctured plane on which `lambda` has a closed form: 50 on
/// rays from the origin and 50 with `|x| = |y|`. Fixed, seed-free.
pub fn certified_pairs() -> Vec<PuncturedPair> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut out = Vec::with_capacity(100);
    for k in 0..50 {
        let phase = 2.0 * PI * ((k as f64 * golden) % 1.0);
        let rho = (-2.0 + 4.0 * k as f64 / 49.0).exp();
        let stretch = 1.0 + 0.05 + 3.0 * ((k as f64 * 0.37) % 1.0);
        let x = Complex64::from_polar(rho, phase);
        out.push(PuncturedPair::planar(x, x * stretch).expect("distinct nonzero points"));
    }
    for k in 0..50 {
        let phase = 2.0 * PI * ((k as f64 * golden + 0.25) % 1.0);
        let rho = (-2.0 + 4.0 * ((k as f64 * 0.61) % 1.0)).exp();
        let angle = 0.05 + (2.0 * PI - 0.1) * ((k as f64 * 0.29 + 0.13) % 1.0);
        let x = Complex64::from_polar(rho, phase);
        let y = Complex64::from_polar(rho, phase + angle);
        out.push(PuncturedPair::planar(x, y).expect("distinct nonzero points"));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    /// `max |lambda(f x, f y) - lambda(x, y)|` over the pairs checked.
    pub max_discrepancy: f64,
    pub checked: usize,
    /// Pairs whose source or image has no closed-form `lambda`.
    pub skipped: usize,
    /// Index of the pair attaining the maximum.
    pub worst: Option<usize>,
}

fn to_complex(p: &[f64]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Largest change of the exact planar `lambda` under `map` over `pairs`.
pub fn lambda_distortion(map: &PlaneMap, pairs: &[PuncturedPair]) -> Result<DistortionReport> {
    map.validate()?;
    if !map.punctured_compatible() {
        return Err(Error::InvalidMap(
            "map does not preserve the punctured plane".into(),
        ));
    }
    let ev = CapacityEvaluator::planar();
    let mut report = DistortionReport {
        max_discrepancy: 0.0,
        checked: 0,
        skipped: 0,
        worst: None,
    };
    for (k, pair) in pairs.iter().enumerate() {
        if pair.dimension() != 2 || pair.classify() == PairClass::General {
            report.skipped += 1;
            continue;
        }
        let fx = map.apply(to_complex(pair.x()))?;
        let fy = map.apply(to_complex(pair.y()))?;
        let image = PuncturedPair::planar(fx, fy)?;
        if image.classify() == PairClass::General {
            report.skipped += 1;
            continue;
        }
        let before = lambda_punctured(&ev, pair)?;
        let after = lambda_punctured(&ev, &image)?;
        debug_assert!(before.exact && after.exact);
        let gap = (after.lower - before.lower).abs();
        report.checked += 1;
        if report.worst.is_none() || gap > report.max_discrepancy {
            report.max_discrepancy = gap;
            report.worst = Some(k);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DilatationReport {
    pub point: Complex64,
    /// Decreasing radii.
    pub radii: Vec<f64>,
    /// `max |f(x) - f(y)| / min |f(x) - f(z)|` over the sampled circle of each radius.
    pub ratios: Vec<f64>,
    /// Max of the ratios over the three smallest radii.
    pub limsup: f64,
}

/// `count` radii `start, start/10, ...`.
pub fn geometric_radii(start: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| start * 10f64.powi(-(k as i32)))
        .collect()
}

/// Sampled linear dilatation of `map` at `x`.
pub fn linear_dilatation(
    map: &PlaneMap,
    x: Complex64,
    radii: &[f64],
    samples: usize,
) -> Result<DilatationReport> {
    map.validate()?;
    if samples < MIN_SAMPLES {
        return Err(Error::Domain {
            name: "samples",
            value: samples as f64,
            expected: "at least 8 samples",
        });
    }
    if radii.is_empty() {
        return Err(Error::Domain {
            name: "radii",
            value: 0.0,
            expected: "at least one radius",
        });
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::Domain {
                name: "radii",
                value: w[1],
                expected: "strictly decreasing radii",
            });
        }
    }
    if !(radii[radii.len() - 1] > 0.0) || !radii[0].is_finite() {
        return Err(Error::Domain {
            name: "radii",
            value: radii[radii.len() - 1],
            expected: "positive finite radii",
        });
    }
    let fx = map.apply(x)?;
    if let Some(pole) = map.leading_pole() {
        if radii[0] >= (x - pole).norm() {
            return Err(Error::Pole {
                re: pole.re,
                im: pole.im,
            });
        }
    }
    let mut ratios = Vec::with_capacity(radii.len());
    for &r in radii {
        let (mut hi, mut lo) = (0.0f64, f64::INFINITY);
        for k in 0..samples {
            let y = x + Complex64::from_polar(r, 2.0 * PI * k as f64 / samples as f64);
            let d = (map.apply(y)? - fx).norm();
            hi = hi.max(d);
            lo = lo.min(d);
        }
        if !(lo > 0.0) || !hi.is_finite() {
            return Err(Error::InvalidMap(format!(
                "map collapses or blows up the circle of radius {r}"
            )));
        }
        ratios.push(hi / lo);
    }
    let tail = ratios.len().saturating_sub(3);
    let limsup = ratios[tail..]
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DilatationReport {
        point: x,
        radii: radii.to_vec(),
        ratios,
        limsup,
    })
}

fn open_unit(r: f64) -> Result<()> {
    finite("r", r)?;
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "0 < r < 1",
        });
    }
    Ok(())
}

/// The ratio bounding `H(f)` at scale `r` in the dilatation estimate for
/// `lambda`-isometries:
/// `2 tau^{-1}(tau(r^2/(1-r^2))/2) / sqrt(X / (1 + X))`, `X = tau^{-1}(2 tau(r/2))`.
pub fn dilatation_bound_profile(r: f64) -> Result<f64> {
    open_unit(r)?;
    let ev = CapacityEvaluator::planar();
    let t = r * r / ((1.0 - r) * (1.0 + r));
    let num = 2.0 * ev.tau_inv(0.5 * ev.tau(t)?)?;
    let x = ev.tau_inv(2.0 * ev.tau(0.5 * r)?)?;
    Ok(num / (x / (1.0 + x)).sqrt())
}

/// The profile and its rewrites through distortion functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRoutes {
    pub r: f64,
    /// [`dilatation_bound_profile`]
    pub tau_form: f64,
    /// `2 psi_2(r)^2 / (phi_{1/2}(r')^2 psi_{1/2}(sqrt(r/(r+2))))`, equal to
    /// the tau form.
    pub psi_form: f64,
    /// `2 psi_2(r)^2 / psi_{1/2}(sqrt(r/(r+2)))`, which drops the factor
    /// `phi_{1/2}(r')^2 -> 1` and agrees with the others only as `r -> 0`.
    pub limit_form: f64,
}

pub fn dilatation_profile_routes(r: f64) -> Result<ProfileRoutes> {
    open_unit(r)?;
    let ev = CapacityEvaluator::planar();
    let pair = ModulusPair::from_value(r);
    let psi2 = ev.psi_pair(2.0, pair)?.value;
    let phi_half = ev.phi_pair(0.5, pair.swapped())?.value;
    let s = ModulusPair {
        value: (r / (r + 2.0)).sqrt(),
        complement: (2.0 / (r + 2.0)).sqrt(),
    };
    let psi_half = ev.psi_pair(0.5, s)?.value;
    let limit_form = 2.0 * psi2 * psi2 / psi_half;
    Ok(ProfileRoutes {
        r,
        tau_form: dilatation_bound_profile(r)?,
        psi_form: limit_form / (phi_half * phi_half),
        limit_form,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsometryBoundReport {
    pub distortion: DistortionReport,
    pub dilatations: Vec<DilatationReport>,
    /// Largest limsup estimate over the sample points.
    pub max_estimate: f64,
    pub holds: bool,
}

/// Points off the unit circle used by default in dilatation checks.
pub fn default_sample_points() -> Vec<Complex64> {
    vec![
        Complex64::from_polar(0.5, 1.0),
        Complex64::from_polar(2.0, 2.0),
        Complex64::from_polar(3.7, 4.0),
        Complex64::from_polar(1.3, PI / 3.0),
        Complex64::from_polar(0.2, 5.5),
    ]
}

/// Certify `map` as a `lambda`-isometry on [`certified_pairs`], then estimate
/// its linear dilatation at `points` (radii `|x|/10, |x|/100, |x|/1000`).
pub fn isometry_bound_check(map: &PlaneMap, points: &[Complex64]) -> Result<IsometryBoundReport> {
    let distortion = lambda_distortion(map, &certified_pairs())?;
    if distortion.max_discrepancy > ISOMETRY_TOLERANCE || distortion.checked == 0 {
        return Err(Error::NotIsometry(distortion.max_discrepancy));
    }
    let dilatations = points
        .par_iter()
        .map(|&x| {
            if x.norm() == 0.0 {
                return Err(Error::OutsideDomain);
            }
            linear_dilatation(map, x, &geometric_radii(0.1 * x.norm(), 3), DEFAULT_SAMPLES)
        })
        .collect::<Result<Vec<_>>>()?;
    let max_estimate = dilatations.iter().map(|d| d.limsup).fold(1.0, f64::max);
    Ok(IsometryBoundReport {
        distortion,
        dilatations,
        max_estimate,
        holds: max_estimate <= ISOMETRY_ESTIMATE_BOUND,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereMarginPoint {
    pub theta: f64,
    pub z: Complex64,
    /// `lambda(e1, r e1) = tau(r - 1)`
    pub axis_value: f64,
    /// Oracle estimate of the capacity of `([0, e1], [z, inf])`.
    pub oracle: f64,
    pub report: SolveReport,
    /// `axis_value - oracle`
    pub margin: f64,
}

impl SphereMarginPoint {
    /// The margin exceeds the oracle tolerance.
    pub fn strict(&self) -> bool {
        self.margin > ORACLE_TOLERANCE * self.axis_value
    }

    /// The oracle does not exceed the axis value beyond its tolerance.
    pub fn bracketed(&self) -> bool {
        self.oracle <= self.axis_value * (1.0 + ORACLE_TOLERANCE)
    }
}

/// For `z = r e^{i theta}`, compare `tau(r - 1)` with the oracle capacity of
/// the segment `[0, e1]` against the radial ray from `z`, which bounds
/// `lambda(e1, z)` from above.
pub fn metric_sphere_margins(r: f64, thetas: &[f64]) -> Result<Vec<SphereMarginPoint>> {
    finite("r", r)?;
    if r <= 1.0 {
        return Err(Error::Domain {
            name: "r",
            value: r,
            expected: "r > 1",
        });
    }
    for &t in thetas {
        finite("theta", t)?;
        let s = t.rem_euclid(2.0 * PI);
        if s < 1e-12 || 2.0 * PI - s < 1e-12 {
            return Err(Error::Domain {
                name: "theta",
                value: t,
                expected: "theta not a multiple of 2 pi",
            });
        }
    }
    let axis_value = CapacityEvaluator::planar().tau(r - 1.0)?;
    thetas
        .par_iter()
        .map(|&theta| {
            let z = Complex64::from_polar(r, theta);
            let report = solve_capacity(&CondenserSpec::segment_ray(z), None)?;
            let oracle = report.best();
            Ok(SphereMarginPoint {
                theta,
                z,
                axis_value,
                oracle,
                report,
                margin: axis_value - oracle,
            })
        })
        .collect()
}

//! Ferrand's conformal invariant `lambda_D(x, y)`.
//!
//! Closed forms exist in the unit ball and, for special configurations, in
//! the punctured space `R^n \ {0}`. Everywhere else the functions here return
//! certified two-sided bounds as a [`BoundedValue`].

mod sphere;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::capacity::{CapacityEvaluator, Mode};
use crate::elliptic::agm;
use crate::error::{finite, Error, Result};

pub use sphere::{trace_metric_sphere, trace_ray, MetricSphereTrace, RayTrace};

/// Angular tolerance (radians) below which a normalized pair counts as
/// collinear with the origin.
pub const COLLINEAR_TOLERANCE: f64 = 1e-12;
/// Tolerance on `| |ratio| - 1 |` for the unit-circle closed form.
pub const UNIT_CIRCLE_TOLERANCE: f64 = 1e-12;

/// Slack allowed when intersecting bounds that coincide up to rounding.
const INTERSECTION_SLACK: f64 = 1e-12;

/// A value known exactly or only through a certified enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedValue {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl BoundedValue {
    pub fn exact(value: f64) -> Self {
        BoundedValue {
            lower: value,
            upper: value,
            exact: true,
        }
    }

    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        if !(lower <= upper) {
            return Err(Error::EmptyIntersection { lower, upper });
        }
        Ok(BoundedValue {
            lower,
            upper,
            exact: false,
        })
    }

    /// Max of the lowers, min of the uppers. Disjoint inputs are a bug
    /// somewhere upstream, so they are reported rather than repaired.
    pub fn intersect(&self, other: &BoundedValue) -> Result<Self> {
        let lower = self.lower.max(other.lower);
        let upper = self.upper.min(other.upper);
        if lower > upper * (1.0 + INTERSECTION_SLACK) {
            return Err(Error::EmptyIntersection { lower, upper });
        }
        if self.exact || other.exact {
            let v = if self.exact { self.lower } else { other.lower };
            return Ok(BoundedValue::exact(v));
        }
        Ok(BoundedValue {
            lower,
            upper: upper.max(lower),
            exact: false,
        })
    }

    /// Whether `v` lies in `[lower, upper]` up to a relative tolerance.
    pub fn contains(&self, v: f64, rel_tol: f64) -> bool {
        v >= self.lower * (1.0 - rel_tol) && v <= self.upper * (1.0 + rel_tol)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

impl fmt::Display for BoundedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exact {
            write!(f, "{:.15}", self.lower)
        } else {
            write!(f, "[{:.15}, {:.15}]", self.lower, self.upper)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    UnitBall,
    PuncturedSpace,
    General,
}

type DistanceFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A proper subdomain `G` of `R^n`, known through its boundary distance.
#[derive(Clone)]
pub struct DomainSpec {
    kind: DomainKind,
    dimension: usize,
    distance: Option<DistanceFn>,
}

impl fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DomainSpec")
            .field("kind", &self.kind)
            .field("dimension", &self.dimension)
            .finish()
    }
}

impl DomainSpec {
    pub fn unit_ball(n: usize) -> Self {
        DomainSpec {
            kind: DomainKind::UnitBall,
            dimension: n,
            distance: None,
        }
    }

    /// `R^n \ {0}`.
    pub fn punctured(n: usize) -> Self {
        DomainSpec {
            kind: DomainKind::PuncturedSpace,
            dimension: n,
            distance: None,
        }
    }

    /// A domain given by `x -> d(x, boundary)`.
    pub fn general<F>(n: usize, boundary_distance: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        DomainSpec {
            kind: DomainKind::General,
            dimension: n,
            distance: Some(Arc::new(boundary_distance)),
        }
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `d_G(x)`; must be strictly positive.
    pub fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        check_dimension(self.dimension, x)?;
        let d = match self.kind {
            DomainKind::UnitBall => 1.0 - norm(x),
            DomainKind::PuncturedSpace => norm(x),
            DomainKind::General => (self.distance.as_ref().expect("general domain"))(x),
        };
        finite("d_G(x)", d)?;
        if d <= 0.0 {
            return Err(Error::OutsideDomain);
        }
        Ok(d)
    }
}

fn check_dimension(n: usize, x: &[f64]) -> Result<()> {
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    for &c in x {
        finite("point coordinate", c)?;
    }
    Ok(())
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

pub(crate) fn distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// `sinh^2(rho/2) = |x-y|^2 / ((1-|x|^2)(1-|y|^2))` in the unit ball.
fn ball_sinh2_half(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    check_dimension(x.len(), x)?;
    check_dimension(y.len(), y)?;
    let (nx, ny) = (norm(x), norm(y));
    if nx >= 1.0 || ny >= 1.0 {
        return Err(Error::OutsideDomain);
    }
    let d = distance(x, y);
    Ok(d * d / ((1.0 - nx) * (1.0 + nx) * (1.0 - ny) * (1.0 + ny)))
}

/// Hyperbolic distance in the unit ball (curvature -1).
pub fn hyperbolic_distance_ball(x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(2.0 * ball_sinh2_half(x, y)?.sqrt().asinh())
}

/// `lambda` of the unit ball: `(1/2) tau_n(sinh^2(rho(x,y)/2))`.
pub fn lambda_ball(ev: &CapacityEvaluator, x: &[f64], y: &[f64]) -> Result<BoundedValue> {
    check_dimension(ev.dimension(), x)?;
    let s = ball_sinh2_half(x, y)?;
    if s == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(BoundedValue::exact(0.5 * ev.tau(s)?))
}

/// `p(s e1) = tau_n(s - 1)` for `s > 1`.
pub fn p_axis(ev: &CapacityEvaluator, s: f64) -> Result<f64> {
    finite("s", s)?;
    if s <= 1.0 {
        return Err(Error::Domain {
            name: "s",
            value: s,
            expected: "s > 1",
        });
    }
    ev.tau(s - 1.0)
}

/// Planar `p(e^{i theta})` on the unit circle:
/// `(K(a)^2 + K(b)^2) / (K(a) K(b))` with `a = sin(theta/4)`, `b = cos(theta/4)`.
pub fn p_unit_circle(theta: f64) -> Result<f64> {
    finite("theta", theta)?;
    let t = theta.rem_euclid(2.0 * PI);
    if t == 0.0 {
        return Err(Error::Domain {
            name: "theta",
            value: theta,
            expected: "theta not a multiple of 2 pi",
        });
    }
    let (s, c) = (t / 4.0).sin_cos();
    // K(s) / K(c) = agm(1, s) / agm(1, c), since s and c are complementary
    let q = agm(1.0, s)? / agm(1.0, c)?;
    Ok(q + 1.0 / q)
}

/// Similarity-normalized shape of a pair: `|y|/|x|` and the angle between
/// `x` and `y` in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedRatio {
    pub modulus: f64,
    pub angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairClass {
    /// `x`, `y` on one ray from the origin.
    Collinear,
    /// `|x| = |y|` in the plane.
    UnitCircle,
    General,
}

/// Two distinct points of `R^n \ {0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PuncturedPair {
    x: Vec<f64>,
    y: Vec<f64>,
    ratio: NormalizedRatio,
}

impl PuncturedPair {
    pub fn new(x: &[f64], y: &[f64]) -> Result<Self> {
        check_dimension(x.len(), y)?;
        check_dimension(x.len(), x)?;
        let (nx, ny) = (norm(x), norm(y));
        if nx == 0.0 || ny == 0.0 {
            return Err(Error::OutsideDomain);
        }
        if x == y {
            return Err(Error::CoincidentPoints);
        }
        // angle between unit vectors, stable at both ends
        let (mut minus, mut plus) = (0.0, 0.0);
        for (a, b) in x.iter().zip(y) {
            let (ua, ub) = (a / nx, b / ny);
            minus += (ua - ub) * (ua - ub);
            plus += (ua + ub) * (ua + ub);
        }
        let angle = 2.0 * minus.sqrt().atan2(plus.sqrt());
        Ok(PuncturedPair {
            x: x.to_vec(),
            y: y.to_vec(),
            ratio: NormalizedRatio {
                modulus: ny / nx,
                angle,
            },
        })
    }

    pub fn planar(x: Complex64, y: Complex64) -> Result<Self> {
        Self::new(&[x.re, x.im], &[y.re, y.im])
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn dimension(&self) -> usize {
        self.x.len()
    }

    /// Shape of `r_x(y)`, the image of `y` under the similarity sending
    /// `0 -> 0` and `x -> e1`.
    pub fn ratio(&self) -> NormalizedRatio {
        self.ratio
    }

    pub fn classify(&self) -> PairClass {
        if self.ratio.angle <= COLLINEAR_TOLERANCE {
            PairClass::Collinear
        } else if self.dimension() == 2 && (self.ratio.modulus - 1.0).abs() <= UNIT_CIRCLE_TOLERANCE
        {
            PairClass::UnitCircle
        } else {
            PairClass::General
        }
    }

    /// `min(|x|, |y|)`
    pub fn min_norm(&self) -> f64 {
        norm(&self.x).min(norm(&self.y))
    }

    pub fn separation(&self) -> f64 {
        distance(&self.x, &self.y)
    }
}

/// Enclosure `tau(|x-y|/m) <= lambda <= tau(|x-y|/(2m))`, `m = min(|x|, |y|)`.
pub fn punctured_sandwich(ev: &CapacityEvaluator, pair: &PuncturedPair) -> Result<BoundedValue> {
    let q = pair.separation() / pair.min_norm();
    BoundedValue::interval(ev.tau(q)?, ev.tau(q / 2.0)?)
}

/// Lower bound on `lambda = min(p(r_x(y)), p(r_y(x)))` from
/// `p(w) >= tau(min(|w|, |w - e1|))` applied to both arguments.
fn punctured_p_lower(ev: &CapacityEvaluator, pair: &PuncturedPair) -> Result<f64> {
    let (nx, ny) = (norm(&pair.x), norm(&pair.y));
    let d = pair.separation();
    let a = ev.tau((ny / nx).min(d / nx))?;
    let b = ev.tau((nx / ny).min(d / ny))?;
    Ok(a.min(b))
}

/// `lambda` of the punctured space `R^n \ {0}`.
///
/// Exact for pairs on a ray from the origin (any `n`) and for `|x| = |y|` in
/// the plane; otherwise the certified enclosure.
pub fn lambda_punctured(ev: &CapacityEvaluator, pair: &PuncturedPair) -> Result<BoundedValue> {
    if pair.dimension() != ev.dimension() {
        return Err(Error::DimensionMismatch {
            expected: ev.dimension(),
            got: pair.dimension(),
        });
    }
    match pair.classify() {
        PairClass::Collinear => {
            let (nx, ny) = (norm(&pair.x), norm(&pair.y));
            let (lo, hi) = if nx < ny { (nx, ny) } else { (ny, nx) };
            Ok(BoundedValue::exact(ev.tau((hi - lo) / lo)?))
        }
        PairClass::UnitCircle if ev.mode() == Mode::Exact => {
            // r_y(x) is the conjugate of r_x(y); both branches of the min agree
            Ok(BoundedValue::exact(p_unit_circle(pair.ratio.angle)?))
        }
        _ => {
            let sandwich = punctured_sandwich(ev, pair)?;
            let lower = punctured_p_lower(ev, pair)?;
            sandwich.intersect(&BoundedValue::interval(lower, f64::INFINITY)?)
        }
    }
}

/// Two-sided estimate in a general domain for `y` in the ball
/// `B(x, d_G(x))`: with `r = |x - y| / d_G(x) < 1`,
/// `(1/2) tau(r^2 / (1 - r^2)) <= lambda_G(x, y) <= tau(r / 2)`.
pub fn lambda_general_bounds(
    ev: &CapacityEvaluator,
    domain: &DomainSpec,
    x: &[f64],
    y: &[f64],
) -> Result<BoundedValue> {
    if domain.dimension() != ev.dimension() {
        return Err(Error::DimensionMismatch {
            expected: ev.dimension(),
            got: domain.dimension(),
        });
    }
    check_dimension(domain.dimension(), y)?;
    let d = domain.boundary_distance(x)?;
    let sep = distance(x, y);
    if sep == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let r = sep / d;
    if r >= 1.0 {
        return Err(Error::Domain {
            name: "r_G(x, y)",
            value: r,
            expected: "r_G < 1 (y inside the ball B(x, d_G(x)))",
        });
    }
    let lower = 0.5 * ev.tau(r * r / ((1.0 - r) * (1.0 + r)))?;
    let upper = ev.tau(r / 2.0)?;
    BoundedValue::interval(lower, upper)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptic::{complement, mu};
    use approx::assert_relative_eq;

    fn ev() -> CapacityEvaluator {
        CapacityEvaluator::planar()
    }

    fn tau(s: f64) -> f64 {
        ev().tau(s).unwrap()
    }

    #[test]
    fn hyperbolic_distance_examples() {
        assert_eq!(
            hyperbolic_distance_ball(&[0.0, 0.0], &[0.0, 0.0]).unwrap(),
            0.0
        );
        assert_relative_eq!(
            hyperbolic_distance_ball(&[0.0, 0.0], &[0.5, 0.0]).unwrap(),
            3f64.ln(),
            max_relative = 1e-14
        );
        let a = hyperbolic_distance_ball(&[0.1, 0.2], &[-0.3, 0.5]).unwrap();
        // rotate both by 90 degrees
        let b = hyperbolic_distance_ball(&[-0.2, 0.1], &[-0.5, -0.3]).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
        assert!(hyperbolic_distance_ball(&[1.0, 0.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn lambda_ball_closed_form() {
        let t: f64 = 0.5;
        let v = lambda_ball(&ev(), &[0.0, 0.0], &[t, 0.0]).unwrap();
        assert!(v.exact);
        let expected = PI / (2.0 * mu(complement(t)).unwrap());
        assert_relative_eq!(v.lower, expected, max_relative = 1e-12);
        let w = lambda_ball(&ev(), &[0.0, 0.0], &[0.0, t]).unwrap();
        assert_relative_eq!(v.lower, w.lower, max_relative = 1e-12);
        assert!(matches!(
            lambda_ball(&ev(), &[0.2, 0.1], &[0.2, 0.1]),
            Err(Error::CoincidentPoints)
        ));
    }

    #[test]
    fn p_axis_examples() {
        assert_relative_eq!(p_axis(&ev(), 2.0).unwrap(), 2.0, max_relative = 1e-12);
        assert!(p_axis(&ev(), 3.0).unwrap() < p_axis(&ev(), 1.5).unwrap());
        assert!(p_axis(&ev(), 1.0).is_err());
    }

    #[test]
    fn p_unit_circle_examples() {
        assert_relative_eq!(p_unit_circle(PI).unwrap(), 2.0, max_relative = 1e-14);
        assert_relative_eq!(
            p_unit_circle(PI / 3.0).unwrap(),
            p_unit_circle(5.0 * PI / 3.0).unwrap(),
            max_relative = 1e-12
        );
        for &th in &[PI / 2.0, PI, 1.5 * PI] {
            let chord = 2.0 * (th / 2.0).sin().abs();
            assert!(p_unit_circle(th).unwrap() >= tau(chord.min(1.0)) * (1.0 - 1e-14));
        }
        assert!(p_unit_circle(0.0).is_err());
        assert!(p_unit_circle(2.0 * PI).is_err());
    }

    #[test]
    fn punctured_exact_cases() {
        let v = lambda_punctured(
            &ev(),
            &PuncturedPair::new(&[1.0, 0.0], &[2.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert!(v.exact);
        assert_relative_eq!(v.lower, 2.0, max_relative = 1e-12);

        let v = lambda_punctured(
            &ev(),
            &PuncturedPair::new(&[1.0, 0.0], &[-1.0, 0.0]).unwrap(),
        )
        .unwrap();
        assert!(v.exact);
        assert_relative_eq!(v.lower, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn punctured_off_axis_interval() {
        let y = Complex64::from_polar(2.0, PI / 4.0);
        let pair = PuncturedPair::planar(Complex64::new(1.0, 0.0), y).unwrap();
        assert_eq!(pair.classify(), PairClass::General);
        let v = lambda_punctured(&ev(), &pair).unwrap();
        let d = (y - 1.0).norm();
        assert!(!v.exact);
        assert_relative_eq!(v.lower, tau(d), max_relative = 1e-12);
        assert_relative_eq!(v.upper, tau(d / 2.0), max_relative = 1e-12);
        assert!(v.lower <= v.upper);
    }

    #[test]
    fn punctured_errors() {
        assert!(matches!(
            PuncturedPair::new(&[0.0, 0.0], &[1.0, 0.0]),
            Err(Error::OutsideDomain)
        ));
        assert!(matches!(
            PuncturedPair::new(&[1.0, 1.0], &[1.0, 1.0]),
            Err(Error::CoincidentPoints)
        ));
        assert!(PuncturedPair::new(&[1.0, 1.0], &[1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn general_bounds_bracket_collinear_value() {
        let dom = DomainSpec::punctured(2);
        let b = lambda_general_bounds(&ev(), &dom, &[1.0, 0.0], &[1.5, 0.0]).unwrap();
        assert!(!b.exact);
        assert_relative_eq!(b.lower, 0.5 * tau(0.25 / 0.75), max_relative = 1e-12);
        assert_relative_eq!(b.upper, tau(0.25), max_relative = 1e-12);
        assert!(b.contains(tau(0.5), 0.0));
    }

    #[test]
    fn general_bounds_blow_up_as_points_merge() {
        let dom = DomainSpec::general(2, |_| 1.0);
        let mut prev = 0.0;
        for &r in &[0.5, 0.1, 0.01] {
            let b = lambda_general_bounds(&ev(), &dom, &[0.0, 0.0], &[r, 0.0]).unwrap();
            assert!(b.lower <= b.upper);
            assert!(b.lower > prev);
            prev = b.lower;
        }
        assert!(lambda_general_bounds(&ev(), &dom, &[0.0, 0.0], &[1.2, 0.0]).is_err());
        let bad = DomainSpec::general(2, |_| 0.0);
        assert!(matches!(
            lambda_general_bounds(&ev(), &bad, &[0.0, 0.0], &[0.1, 0.0]),
            Err(Error::OutsideDomain)
        ));
    }

    #[test]
    fn intersection_rules() {
        let a = BoundedValue::interval(1.0, 3.0).unwrap();
        let b = BoundedValue::interval(2.0, 5.0).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!((c.lower, c.upper, c.exact), (2.0, 3.0, false));
        let far = BoundedValue::interval(4.0, 5.0).unwrap();
        assert!(matches!(
            a.intersect(&far),
            Err(Error::EmptyIntersection { .. })
        ));
        assert!(BoundedValue::interval(2.0, 1.0).is_err());
    }
}

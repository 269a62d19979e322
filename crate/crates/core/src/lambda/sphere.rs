//! Tracing the level set `lambda_{R^2 \ {0}}(c, z) = M` along rays from `c`.
//!
//! On the ray `z = c + t u` the enclosure
//! `tau(g(t)) <= lambda <= tau(g(t)/2)` with `g(t) = t / min(|c|, |z|)` reduces
//! the two crossings to `g(t) = tau^{-1}(M)` (inner, where the lower bound
//! meets `M`) and `g(t) = 2 tau^{-1}(M)` (outer). `g` is increasing from
//! `t = 0` up to the window end reported per ray; certification is only
//! claimed inside that window.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::CapacityEvaluator;
use crate::error::{finite, Error, Result};

/// Rays farther than this many `|c|` are treated as unbounded.
const FAR_FACTOR: f64 = 1e8;
const AXIS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayTrace {
    /// Direction of the ray, radians.
    pub direction: f64,
    /// `lambda >= M` for `0 < t < r_in`.
    pub r_in: f64,
    /// `lambda <= M` for `r_out < t <= window`.
    pub r_out: f64,
    /// End of the interval on which `g` is monotone.
    pub window: f64,
    /// The ray lies on the line through the origin, where the crossing is
    /// exact and `r_in == r_out`.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSphereTrace {
    pub center: Complex64,
    pub level: f64,
    pub rays: Vec<RayTrace>,
}

impl MetricSphereTrace {
    pub fn inner(&self) -> Vec<Complex64> {
        self.rays
            .iter()
            .map(|r| self.center + Complex64::from_polar(r.r_in, r.direction))
            .collect()
    }

    pub fn outer(&self) -> Vec<Complex64> {
        self.rays
            .iter()
            .map(|r| self.center + Complex64::from_polar(r.r_out, r.direction))
            .collect()
    }
}

/// `g(t) = t / min(|c|, |c + t u|)` and the end of its increasing stretch.
struct RayGeometry {
    c: Complex64,
    u: Complex64,
    window: f64,
}

impl RayGeometry {
    fn new(c: Complex64, direction: f64) -> Self {
        let u = Complex64::from_polar(1.0, direction);
        let rc = c.norm();
        let a = c.re * u.re + c.im * u.im;
        // g = t/|c + t u| while |c + t u| < |c|, i.e. t < -2a; that branch
        // peaks at t* = |c|^2 / (-a) and only matters if t* < -2a.
        let window = if a < 0.0 && rc * rc < 2.0 * a * a {
            rc * rc / -a
        } else {
            FAR_FACTOR * rc
        };
        RayGeometry { c, u, window }
    }

    fn g(&self, t: f64) -> f64 {
        let m = self.c.norm().min((self.c + self.u * t).norm());
        t / m
    }

    /// Solve `g(t) = level` on `(0, window]` by bisection.
    fn solve(&self, level: f64) -> Option<f64> {
        if self.g(self.window) < level {
            return None;
        }
        let (mut lo, mut hi) = (0.0, self.window);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.g(mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

fn check_level(ev: &CapacityEvaluator, center: Complex64, level: f64) -> Result<f64> {
    if ev.dimension() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: ev.dimension(),
        });
    }
    finite("center", center.re + center.im)?;
    if center.norm() == 0.0 {
        return Err(Error::OutsideDomain);
    }
    finite("level", level)?;
    if level <= 0.0 {
        return Err(Error::Domain {
            name: "level",
            value: level,
            expected: "M > 0",
        });
    }
    ev.tau_inv(level)
}

fn trace_with(center: Complex64, level: f64, q: f64, direction: f64) -> Result<RayTrace> {
    let geo = RayGeometry::new(center, direction);
    let r_in = geo.solve(q).ok_or(Error::LevelNotCrossed(level))?;
    let r_out = geo.solve(2.0 * q).ok_or(Error::LevelNotCrossed(level))?;
    let off_axis = (direction - center.arg()).sin().abs();
    let exact = off_axis <= AXIS_TOLERANCE;
    Ok(RayTrace {
        direction,
        r_in,
        // on the axis the lower bound is the exact value
        r_out: if exact { r_in } else { r_out },
        window: geo.window,
        exact,
    })
}

/// Crossings of the level `M` on a single ray leaving `center` in direction
/// `direction` (radians).
pub fn trace_ray(
    ev: &CapacityEvaluator,
    center: Complex64,
    level: f64,
    direction: f64,
) -> Result<RayTrace> {
    let q = check_level(ev, center, level)?;
    trace_with(center, level, q, direction)
}

/// Inner and outer certified polylines of the metric sphere of level `M`
/// around `center`, on `rays` equally spaced directions starting at the
/// direction away from the origin.
pub fn trace_metric_sphere(
    ev: &CapacityEvaluator,
    center: Complex64,
    level: f64,
    rays: usize,
) -> Result<MetricSphereTrace> {
    let q = check_level(ev, center, level)?;
    if rays < 3 {
        return Err(Error::Domain {
            name: "rays",
            value: rays as f64,
            expected: "at least 3 rays",
        });
    }
    let start = center.arg();
    let step = 2.0 * std::f64::consts::PI / rays as f64;
    let traced = (0..rays)
        .into_par_iter()
        .map(|k| trace_with(center, level, q, start + step * k as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricSphereTrace {
        center,
        level,
        rays: traced,
    })
}

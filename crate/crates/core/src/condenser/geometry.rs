//! Plate primitives, the two computational frames, and polyline images of
//! primitives in frame coordinates.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

fn c(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Building blocks of a plate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Primitive {
    Segment {
        a: Point,
        b: Point,
    },
    /// `from + t * direction`, `t >= 0`, including the point at infinity.
    Ray {
        from: Point,
        direction: Point,
    },
    /// Counter-clockwise from `start` to `end` (radians).
    Arc {
        center: Point,
        radius: f64,
        start: f64,
        end: f64,
    },
    Circle {
        center: Point,
        radius: f64,
    },
    /// Closed filled disk.
    Disk {
        center: Point,
        radius: f64,
    },
}

impl Primitive {
    pub fn contains_infinity(&self) -> bool {
        matches!(self, Primitive::Ray { .. })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Condenser(m.to_string()));
        let finite = |p: Point| p[0].is_finite() && p[1].is_finite();
        match *self {
            Primitive::Segment { a, b } => {
                if !finite(a) || !finite(b) {
                    return bad("segment endpoint is not finite");
                }
                if a == b {
                    return bad("degenerate segment");
                }
            }
            Primitive::Ray { from, direction } => {
                if !finite(from) || !finite(direction) {
                    return bad("ray is not finite");
                }
                if direction == [0.0, 0.0] {
                    return bad("ray direction is zero");
                }
            }
            Primitive::Arc {
                center,
                radius,
                start,
                end,
            } => {
                if !finite(center) || !(radius > 0.0) || !start.is_finite() || !end.is_finite() {
                    return bad("arc needs a finite center and positive radius");
                }
                if end <= start {
                    return bad("arc must have end > start");
                }
            }
            Primitive::Circle { center, radius } | Primitive::Disk { center, radius } => {
                if !finite(center) || !(radius > 0.0 && radius.is_finite()) {
                    return bad("circle needs a finite center and positive radius");
                }
            }
        }
        Ok(())
    }

    /// Curve traced by the primitive (the boundary circle for a disk).
    fn curve(&self) -> Curve {
        match *self {
            Primitive::Segment { a, b } => Curve::Segment(c(a), c(b)),
            Primitive::Ray { from, direction } => {
                let d = c(direction);
                Curve::Ray(c(from), d / d.norm())
            }
            Primitive::Arc {
                center,
                radius,
                start,
                end,
            } => Curve::Arc(c(center), radius, start, end.min(start + 2.0 * PI)),
            Primitive::Circle { center, radius } | Primitive::Disk { center, radius } => {
                Curve::Arc(c(center), radius, 0.0, 2.0 * PI)
            }
        }
    }

    pub(crate) fn filled_contains(&self, z: Complex64) -> bool {
        match *self {
            Primitive::Disk { center, radius } => (z - c(center)).norm() <= radius,
            _ => false,
        }
    }

    /// Smallest and largest distance from `p` to the primitive.
    pub(crate) fn radial_extent(&self, p: Complex64) -> (f64, f64) {
        match *self {
            Primitive::Segment { a, b } => {
                let (a, b) = (c(a), c(b));
                let far = (a - p).norm().max((b - p).norm());
                (point_segment_distance(p, a, b), far)
            }
            Primitive::Ray { from, direction } => {
                let d = c(direction);
                let d = d / d.norm();
                let t = ((p - c(from)) * d.conj()).re.max(0.0);
                ((c(from) + d * t - p).norm(), f64::INFINITY)
            }
            Primitive::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let k = c(center);
                let dc = (k - p).norm();
                let angle = (p - k).arg();
                let covers = |a: f64| {
                    let rel = (a - start).rem_euclid(2.0 * PI);
                    rel <= end - start
                };
                let e0 = k + Complex64::from_polar(radius, start);
                let e1 = k + Complex64::from_polar(radius, end);
                let mut lo = (e0 - p).norm().min((e1 - p).norm());
                let mut hi = (e0 - p).norm().max((e1 - p).norm());
                if covers(angle) {
                    lo = lo.min((dc - radius).abs());
                }
                if covers(angle + PI) {
                    hi = hi.max(dc + radius);
                }
                (lo, hi)
            }
            Primitive::Circle { center, radius } => {
                let dc = (c(center) - p).norm();
                ((dc - radius).abs(), dc + radius)
            }
            Primitive::Disk { center, radius } => {
                let dc = (c(center) - p).norm();
                ((dc - radius).max(0.0), dc + radius)
            }
        }
    }

    /// Points where the primitive ends: candidates for grid alignment.
    pub(crate) fn endpoints(&self) -> Vec<Complex64> {
        match *self {
            Primitive::Segment { a, b } => vec![c(a), c(b)],
            Primitive::Ray { from, .. } => vec![c(from)],
            Primitive::Arc {
                center,
                radius,
                start,
                end,
            } if end - start < 2.0 * PI => vec![
                c(center) + Complex64::from_polar(radius, start),
                c(center) + Complex64::from_polar(radius, end),
            ],
            _ => Vec::new(),
        }
    }

    /// Radius if this is a circle or disk centered at `p`.
    pub(crate) fn centered_radius(&self, p: Complex64) -> Option<f64> {
        match *self {
            Primitive::Circle { center, radius } | Primitive::Disk { center, radius }
                if (c(center) - p).norm() <= 1e-12 * radius =>
            {
                Some(radius)
            }
            _ => None,
        }
    }

    pub(crate) fn scaled(&self, k: f64) -> Primitive {
        let s = |p: Point| [p[0] * k, p[1] * k];
        match *self {
            Primitive::Segment { a, b } => Primitive::Segment { a: s(a), b: s(b) },
            Primitive::Ray { from, direction } => Primitive::Ray {
                from: s(from),
                direction,
            },
            Primitive::Arc {
                center,
                radius,
                start,
                end,
            } => Primitive::Arc {
                center: s(center),
                radius: radius * k,
                start,
                end,
            },
            Primitive::Circle { center, radius } => Primitive::Circle {
                center: s(center),
                radius: radius * k,
            },
            Primitive::Disk { center, radius } => Primitive::Disk {
                center: s(center),
                radius: radius * k,
            },
        }
    }
}

pub(crate) fn point_segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0)
    };
    (a + d * t - p).norm()
}

#[derive(Debug, Clone, Copy)]
enum Curve {
    Segment(Complex64, Complex64),
    Ray(Complex64, Complex64),
    Arc(Complex64, f64, f64, f64),
}

impl Curve {
    /// Point at parameter `s` in `[0, 1]`; a ray reaches infinity at 1.
    fn at(&self, s: f64, ray_scale: f64) -> Complex64 {
        match *self {
            Curve::Segment(a, b) => a + (b - a) * s,
            Curve::Ray(from, dir) => from + dir * (ray_scale * s / (1.0 - s)),
            Curve::Arc(k, r, a0, a1) => k + Complex64::from_polar(r, a0 + s * (a1 - a0)),
        }
    }
}

/// Coordinates in which the 5-point grid lives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum FrameMap {
    /// The plane itself.
    Plane,
    /// `zeta = log(z - center)`: `x = log|z - center|`, `y = arg(z - center)`,
    /// periodic in `y`.
    Log { center: Complex64 },
}

impl FrameMap {
    pub fn plane_point(self, x: f64, y: f64) -> Complex64 {
        match self {
            FrameMap::Plane => Complex64::new(x, y),
            FrameMap::Log { center } => center + Complex64::from_polar(x.exp(), y),
        }
    }

    /// Frame coordinates of `z`, with the angle chosen next to `near_y`.
    fn frame_point(self, z: Complex64, near_y: Option<(Complex64, f64)>) -> [f64; 2] {
        match self {
            FrameMap::Plane => [z.re, z.im],
            FrameMap::Log { center } => {
                let w = z - center;
                let y = match near_y {
                    Some((z0, y0)) => y0 + (w / (z0 - center)).arg(),
                    None => w.arg(),
                };
                [w.norm().ln(), y]
            }
        }
    }
}

/// Frame-coordinate polylines approximating a primitive, split wherever the
/// curve leaves the window `|z - center|` in `[rmin, rmax]` (log frame).
pub(crate) fn frame_polylines(
    prim: &Primitive,
    frame: FrameMap,
    max_step: f64,
    radial_window: (f64, f64),
) -> Vec<Vec<[f64; 2]>> {
    let curve = prim.curve();
    let (center, in_window): (Complex64, Box<dyn Fn(Complex64) -> bool>) = match frame {
        FrameMap::Plane => (
            Complex64::new(0.0, 0.0),
            Box::new(|z: Complex64| z.is_finite()),
        ),
        FrameMap::Log { center } => {
            let (lo, hi) = radial_window;
            (
                center,
                Box::new(move |z: Complex64| {
                    let r = (z - center).norm();
                    z.is_finite() && r >= lo && r <= hi
                }),
            )
        }
    };
    let ray_scale = match curve {
        Curve::Ray(from, _) => (from - center).norm().max(1.0),
        _ => 1.0,
    };
    let s_end = match curve {
        Curve::Ray(..) => 1.0 - 1e-15,
        _ => 1.0,
    };

    // Uniform pre-sampling catches window exits; refinement then bounds the
    // chord length in frame coordinates.
    let coarse = 256;
    let at = |s: f64| curve.at(s, ray_scale);
    // last parameter inside the window between an inside and an outside sample
    let boundary = |mut inside: f64, mut outside: f64| {
        for _ in 0..60 {
            let mid = 0.5 * (inside + outside);
            if in_window(at(mid)) {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let mut lines = Vec::new();
    let mut current: Vec<[f64; 2]> = Vec::new();
    let mut last: Option<(f64, Complex64, [f64; 2])> = None;
    let mut prev_s = 0.0;
    for k in 0..=coarse {
        let s = s_end * k as f64 / coarse as f64;
        let z = at(s);
        let inside = in_window(z);
        match (last, inside) {
            (Some(start), true) => {
                refine(
                    &curve,
                    ray_scale,
                    frame,
                    &*in_window,
                    max_step,
                    start,
                    s,
                    0,
                    &mut current,
                );
                last = Some((s, z, *current.last().unwrap()));
            }
            (Some(start), false) => {
                let sb = boundary(start.0, s);
                if sb > start.0 {
                    refine(
                        &curve,
                        ray_scale,
                        frame,
                        &*in_window,
                        max_step,
                        start,
                        sb,
                        0,
                        &mut current,
                    );
                }
                if current.len() > 1 {
                    lines.push(std::mem::take(&mut current));
                }
                current.clear();
                last = None;
            }
            (None, true) => {
                let s0 = if k == 0 { s } else { boundary(s, prev_s) };
                let z0 = at(s0);
                let p0 = frame.frame_point(z0, None);
                current.push(p0);
                last = Some((s0, z0, p0));
                if s0 < s {
                    refine(
                        &curve,
                        ray_scale,
                        frame,
                        &*in_window,
                        max_step,
                        (s0, z0, p0),
                        s,
                        0,
                        &mut current,
                    );
                    last = Some((s, z, *current.last().unwrap()));
                }
            }
            (None, false) => {}
        }
        prev_s = s;
    }
    if current.len() > 1 {
        lines.push(current);
    }
    lines
}

#[allow(clippy::too_many_arguments)]
fn refine(
    curve: &Curve,
    ray_scale: f64,
    frame: FrameMap,
    in_window: &dyn Fn(Complex64) -> bool,
    max_step: f64,
    start: (f64, Complex64, [f64; 2]),
    s1: f64,
    depth: usize,
    out: &mut Vec<[f64; 2]>,
) {
    let (s0, z0, p0) = start;
    let z1 = curve.at(s1, ray_scale);
    let p1 = frame.frame_point(z1, Some((z0, p0[1])));
    let step = ((p1[0] - p0[0]).powi(2) + (p1[1] - p0[1]).powi(2)).sqrt();
    if step <= max_step || depth >= 48 {
        out.push(p1);
        return;
    }
    let sm = 0.5 * (s0 + s1);
    let zm = curve.at(sm, ray_scale);
    if !in_window(zm) {
        out.push(p1);
        return;
    }
    let pm = frame.frame_point(zm, Some((z0, p0[1])));
    refine(
        curve,
        ray_scale,
        frame,
        in_window,
        max_step,
        (s0, z0, p0),
        sm,
        depth + 1,
        out,
    );
    refine(
        curve,
        ray_scale,
        frame,
        in_window,
        max_step,
        (sm, zm, pm),
        s1,
        depth + 1,
        out,
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_segment_maps_to_horizontal_line() {
        let prim = Primitive::Segment {
            a: [-1.0, 0.0],
            b: [-0.01, 0.0],
        };
        let frame = FrameMap::Log {
            center: Complex64::new(0.0, 0.0),
        };
        let lines = frame_polylines(&prim, frame, 0.05, (1e-6, 1e6));
        assert_eq!(lines.len(), 1);
        for p in &lines[0] {
            assert!((p[1].abs() - PI).abs() < 1e-12);
        }
        let xs: Vec<f64> = lines[0].iter().map(|p| p[0]).collect();
        assert!((xs[0] - 0.0).abs() < 1e-12);
        assert!((xs.last().unwrap() - 0.01f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ray_is_cut_at_window() {
        let prim = Primitive::Ray {
            from: [2.0, 0.0],
            direction: [1.0, 0.0],
        };
        let frame = FrameMap::Log {
            center: Complex64::new(0.0, 0.0),
        };
        let lines = frame_polylines(&prim, frame, 0.1, (1e-3, 1e3));
        let last = lines[0].last().unwrap();
        assert!(last[0] <= 1e3f64.ln() + 1e-9);
        assert!(last[0] > 1e3f64.ln() - 0.2);
    }

    #[test]
    fn extents() {
        let seg = Primitive::Segment {
            a: [1.0, 1.0],
            b: [1.0, -1.0],
        };
        let (lo, hi) = seg.radial_extent(Complex64::new(0.0, 0.0));
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 2f64.sqrt()).abs() < 1e-15);
        let disk = Primitive::Disk {
            center: [0.0, 0.0],
            radius: 1.0,
        };
        assert_eq!(disk.radial_extent(Complex64::new(0.5, 0.0)).0, 0.0);
        assert!(disk.filled_contains(Complex64::new(0.5, 0.0)));
        assert!(Primitive::Segment {
            a: [0.0, 0.0],
            b: [0.0, 0.0]
        }
        .validate()
        .is_err());
    }
}

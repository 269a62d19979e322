//! Tensor grids in frame coordinates, plate rasterization and the
//! vertex-centered finite-volume 5-point system.

use std::f64::consts::PI;

use super::geometry::{frame_polylines, FrameMap, Primitive};
use super::{CondenserSpec, Frame, Plate};
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Grid extent in the log frame beyond the plates' radial features.
const CORE_PAD: f64 = 2.0;
/// Growth ratio of the spacing in the log-frame tails.
const TAIL_RATIO: f64 = 1.2;

/// Node coordinates of a tensor grid; `y` is periodic in the log frame.
#[derive(Debug, Clone)]
pub(crate) struct Axes {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub periodic: bool,
}

impl Axes {
    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn hy(&self) -> f64 {
        if self.periodic {
            2.0 * PI / self.ys.len() as f64
        } else {
            self.ys[1] - self.ys[0]
        }
    }

    /// Local node spacing used for the rasterization tolerance.
    fn spacing_x(&self, i: usize) -> f64 {
        let n = self.xs.len();
        if i == 0 {
            self.xs[1] - self.xs[0]
        } else if i + 1 == n {
            self.xs[n - 1] - self.xs[n - 2]
        } else {
            0.5 * (self.xs[i + 1] - self.xs[i - 1])
        }
    }

    /// Subdivide every interval into `2^level` equal parts.
    pub fn refined(&self, level: u32) -> Axes {
        let k = 1usize << level;
        let sub = |v: &[f64]| {
            let mut out = Vec::with_capacity((v.len() - 1) * k + 1);
            for w in v.windows(2) {
                for m in 0..k {
                    out.push(w[0] + (w[1] - w[0]) * m as f64 / k as f64);
                }
            }
            out.push(*v.last().unwrap());
            out
        };
        let ys = if self.periodic {
            let n = self.ys.len() * k;
            (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
        } else {
            sub(&self.ys)
        };
        Axes {
            xs: sub(&self.xs),
            ys,
            periodic: self.periodic,
        }
    }
}

/// Everything about the geometry that does not depend on the grid level.
#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub frame: FrameMap,
    /// Coarsest grid; finer grids are nested refinements.
    pub base: Axes,
    /// Radial window `[rmin, rmax]` of the log frame.
    pub window: (f64, f64),
    /// Dirichlet value imposed on the first / last column (log frame).
    pub left_end: Option<f64>,
    pub right_end: Option<f64>,
    /// Nominal spacing of the base grid.
    pub h: f64,
}

fn plate_extent(plate: &Plate, p: Complex64) -> (f64, f64) {
    plate
        .primitives
        .iter()
        .map(|q| q.radial_extent(p))
        .fold((f64::INFINITY, 0.0), |(a, b), (c, d)| (a.min(c), b.max(d)))
}

fn contains_point(plate: &Plate, p: Complex64) -> bool {
    plate.primitives.iter().any(|q| {
        let (lo, hi) = q.radial_extent(p);
        lo <= 1e-12 * hi.clamp(1e-300, 1.0) || q.filled_contains(p)
    })
}

fn contains_infinity(plate: &Plate) -> bool {
    plate.primitives.iter().any(Primitive::contains_infinity)
}

/// Uniform nodes `k * h` covering `[lo, hi]`.
fn aligned_nodes(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let a = (lo / h).floor() as i64;
    let b = (hi / h).ceil() as i64;
    (a..=b).map(|k| k as f64 * h).collect()
}

impl Layout {
    pub fn new(spec: &CondenserSpec, h: f64) -> Result<Layout> {
        match spec.frame {
            Frame::Box {
                xmin,
                xmax,
                ymin,
                ymax,
            } => {
                for plate in [&spec.plate_e, &spec.plate_f] {
                    if contains_infinity(plate) {
                        return Err(Error::Condenser(format!(
                            "plate {} contains infinity and needs the log-polar frame",
                            plate.id
                        )));
                    }
                }
                let xs = aligned_nodes(xmin, xmax, h);
                let ys = aligned_nodes(ymin, ymax, h);
                if xs.len() < 3 || ys.len() < 3 {
                    return Err(Error::TooCoarse {
                        h,
                        reason: "box spans fewer than 3 nodes".into(),
                    });
                }
                Ok(Layout {
                    frame: FrameMap::Plane,
                    base: Axes {
                        xs,
                        ys,
                        periodic: false,
                    },
                    window: (0.0, f64::INFINITY),
                    left_end: None,
                    right_end: None,
                    h,
                })
            }
            Frame::LogPolar { center, margin } => {
                let c = Complex64::new(center[0], center[1]);
                let (e_lo, e_hi) = plate_extent(&spec.plate_e, c);
                let (f_lo, f_hi) = plate_extent(&spec.plate_f, c);
                let mut radii: Vec<f64> = [e_lo, e_hi, f_lo, f_hi]
                    .into_iter()
                    .filter(|r| *r > 0.0 && r.is_finite())
                    .collect();
                let mut features: Vec<f64> = Vec::new();
                for prim in spec
                    .plate_e
                    .primitives
                    .iter()
                    .chain(&spec.plate_f.primitives)
                {
                    for p in prim.endpoints() {
                        let r = (p - c).norm();
                        if r > 0.0 {
                            features.push(r.ln());
                            radii.push(r);
                        }
                    }
                    if let Some(r) = prim.centered_radius(c) {
                        features.push(r.ln());
                    }
                }
                if radii.is_empty() {
                    return Err(Error::Condenser(
                        "plates have no finite radial extent".into(),
                    ));
                }
                let core_lo = radii.iter().fold(f64::INFINITY, |a, r| a.min(r.ln()));
                let core_hi = radii.iter().fold(f64::NEG_INFINITY, |a, r| a.max(r.ln()));
                // align the extreme features with nodes
                let (anchor, hx) = match (
                    features.iter().cloned().reduce(f64::min),
                    features.iter().cloned().reduce(f64::max),
                ) {
                    (Some(a), Some(b)) if b - a > 1e-9 => (a, (b - a) / ((b - a) / h).ceil()),
                    (Some(a), _) => (a, h),
                    _ => (core_lo, h),
                };
                let lo = core_lo - CORE_PAD;
                let hi = core_hi + CORE_PAD;
                let k0 = ((lo - anchor) / hx).floor() as i64;
                let k1 = ((hi - anchor) / hx).ceil() as i64;
                let mut xs: Vec<f64> = (k0..=k1).map(|k| anchor + k as f64 * hx).collect();
                let x_first = xs[0] - margin;
                let x_last = *xs.last().unwrap() + margin;
                let mut step = hx;
                let mut left = Vec::new();
                let mut x = xs[0];
                while x > x_first {
                    step *= TAIL_RATIO;
                    x -= step;
                    left.push(x);
                }
                left.reverse();
                let mut step = hx;
                let mut x = *xs.last().unwrap();
                while x < x_last {
                    step *= TAIL_RATIO;
                    x += step;
                    xs.push(x);
                }
                left.extend(xs);
                let xs = left;
                let ny = ((2.0 * PI / h / 8.0).ceil() as usize).max(1) * 8;
                let ys = (0..ny).map(|j| 2.0 * PI * j as f64 / ny as f64).collect();
                let end_value = |test: &dyn Fn(&Plate) -> bool| -> Result<Option<f64>> {
                    match (test(&spec.plate_e), test(&spec.plate_f)) {
                        (true, true) => Err(Error::Condenser(
                            "both plates reach the same end of the log-polar frame".into(),
                        )),
                        (true, false) => Ok(Some(1.0)),
                        (false, true) => Ok(Some(0.0)),
                        (false, false) => Ok(None),
                    }
                };
                let left_end = end_value(&|p| contains_point(p, c))?;
                let right_end = end_value(&|p| contains_infinity(p))?;
                let window = (xs[0].exp(), xs.last().unwrap().exp());
                Ok(Layout {
                    frame: FrameMap::Log { center: c },
                    base: Axes {
                        xs,
                        ys,
                        periodic: true,
                    },
                    window,
                    left_end,
                    right_end,
                    h,
                })
            }
        }
    }
}

/// Node state on one grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Node {
    Free,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub(crate) struct Grid {
    pub axes: Axes,
    pub nodes: Vec<Node>,
    /// Plate chords passing within one spacing of a node, sorted by node.
    near: Vec<(u32, Chord)>,
}

pub(crate) type Chord = [[f64; 2]; 2];

impl Grid {
    pub fn id(&self, i: usize, j: usize) -> usize {
        i * self.axes.ny() + j
    }
}

/// Visit nodes within one local spacing of a polyline, flagging those
/// within half a spacing (the plate nodes). The chord is passed shifted by a
/// multiple of the period to sit next to the node's canonical position.
fn scan_polyline(axes: &Axes, line: &[[f64; 2]], mut visit: impl FnMut(usize, usize, Chord, bool)) {
    let hy = axes.hy();
    let nx = axes.nx();
    let ny = axes.ny() as i64;
    let y0 = axes.ys[0];
    for w in line.windows(2) {
        let (p, q) = (w[0], w[1]);
        let (xa, xb) = (p[0].min(q[0]), p[0].max(q[0]));
        let (ya, yb) = (p[1].min(q[1]), p[1].max(q[1]));
        let i0 = axes.xs.partition_point(|&x| x < xa).saturating_sub(3);
        let i1 = (axes.xs.partition_point(|&x| x <= xb) + 3).min(nx);
        let j0 = ((ya - y0) / hy).floor() as i64 - 2;
        let j1 = ((yb - y0) / hy).ceil() as i64 + 2;
        for i in i0..i1 {
            let sx = axes.spacing_x(i);
            for ju in j0..=j1 {
                let (j, ny_ok) = if axes.periodic {
                    (ju.rem_euclid(ny), true)
                } else {
                    (ju, ju >= 0 && ju < ny)
                };
                if !ny_ok {
                    continue;
                }
                let node = [axes.xs[i], y0 + ju as f64 * hy];
                let scale = |v: [f64; 2]| [(v[0] - node[0]) / sx, (v[1] - node[1]) / hy];
                let d = segment_origin_distance(scale(p), scale(q));
                if d <= 1.0 {
                    let shift = (ju - j) as f64 * hy;
                    let chord = [[p[0], p[1] - shift], [q[0], q[1] - shift]];
                    visit(i, j as usize, chord, d <= 0.5 + 1e-9);
                }
            }
        }
    }
}

fn segment_origin_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 == 0.0 {
        0.0
    } else {
        (-(a[0] * d[0] + a[1] * d[1]) / len2).clamp(0.0, 1.0)
    };
    (a[0] + t * d[0]).hypot(a[1] + t * d[1])
}

impl Layout {
    /// Frame-coordinate polylines of a plate.
    pub fn polylines(&self, plate: &Plate, max_step: f64) -> Vec<Vec<[f64; 2]>> {
        plate
            .primitives
            .iter()
            .flat_map(|p| {
                frame_polylines(
                    p,
                    self.frame,
                    max_step,
                    (0.5 * self.window.0, 2.0 * self.window.1),
                )
            })
            .collect()
    }

    /// Rasterize both plates on the grid `2^level` times finer than the base.
    pub fn grid(&self, spec: &CondenserSpec, level: u32) -> Result<Grid> {
        let axes = self.base.refined(level);
        let (nx, ny) = (axes.nx(), axes.ny());
        let h = self.h / (1u64 << level) as f64;
        let mut owner = vec![0u8; nx * ny];
        let mut near: Vec<(u32, Chord)> = Vec::new();
        for (bit, plate) in [(1u8, &spec.plate_e), (2u8, &spec.plate_f)] {
            let mut count = 0usize;
            let mut set = |i: usize, j: usize| {
                let k = i * ny + j;
                if owner[k] & bit == 0 {
                    owner[k] |= bit;
                    count += 1;
                }
            };
            for line in self.polylines(plate, 0.25 * h) {
                scan_polyline(&axes, &line, |i, j, chord, on_plate| {
                    if on_plate {
                        set(i, j);
                    }
                    near.push(((i * ny + j) as u32, chord));
                });
            }
            let disks: Vec<&Primitive> = plate
                .primitives
                .iter()
                .filter(|p| matches!(p, Primitive::Disk { .. }))
                .collect();
            if !disks.is_empty() {
                for i in 0..nx {
                    for j in 0..ny {
                        let z = self.frame.plane_point(axes.xs[i], axes.ys[j]);
                        if disks.iter().any(|d| d.filled_contains(z)) {
                            set(i, j);
                        }
                    }
                }
            }
            let end_columns = [(0usize, self.left_end), (nx - 1, self.right_end)];
            for (i, value) in end_columns {
                let v = if bit == 1 { 1.0 } else { 0.0 };
                if value == Some(v) {
                    for j in 0..ny {
                        set(i, j);
                    }
                }
            }
            if count < 3 {
                return Err(Error::TooCoarse {
                    h,
                    reason: format!("plate {} covers fewer than 3 nodes", plate.id),
                });
            }
        }
        if owner.contains(&3) {
            return Err(Error::Condenser(
                "plates intersect after rasterization".into(),
            ));
        }
        let nodes = owner
            .into_iter()
            .map(|o| match o {
                1 => Node::Fixed(1.0),
                2 => Node::Fixed(0.0),
                _ => Node::Free,
            })
            .collect();
        near.sort_by_key(|e| e.0);
        Ok(Grid { axes, nodes, near })
    }
}

/// Sparse symmetric system on the free nodes: at most four neighbours each.
#[derive(Debug, Clone)]
pub(crate) struct System {
    pub diag: Vec<f64>,
    pub nbr: Vec<[u32; 4]>,
    pub cond: Vec<[f64; 4]>,
    pub rhs: Vec<f64>,
    /// Free-node index of every grid node.
    pub index: Vec<u32>,
    edges: Vec<(usize, usize, f64)>,
}

pub(crate) const NONE: u32 = u32::MAX;

impl Grid {
    fn chords_at(&self, k: usize) -> &[(u32, Chord)] {
        let lo = self.near.partition_point(|e| (e.0 as usize) < k);
        let hi = self.near.partition_point(|e| (e.0 as usize) <= k);
        &self.near[lo..hi]
    }

    /// Nearest crossings of the line `p + t e` with plate chords recorded at
    /// `nodes`: the smallest `t` in `(0, up]` and the largest in `[-down, 0)`.
    fn crossings(
        &self,
        nodes: &[usize],
        p: [f64; 2],
        e: [f64; 2],
        up: f64,
        down: f64,
    ) -> (f64, f64) {
        let cross = |u: [f64; 2], v: [f64; 2]| u[0] * v[1] - u[1] * v[0];
        let shifts: &[f64] = if self.axes.periodic {
            &[-2.0 * PI, 0.0, 2.0 * PI]
        } else {
            &[0.0]
        };
        let (mut plus, mut minus) = (up, -down);
        for &k in nodes {
            for (_, [c, d]) in self.chords_at(k) {
                let f = [d[0] - c[0], d[1] - c[1]];
                let den = cross(e, f);
                if den.abs() <= 1e-12 * e[0].hypot(e[1]) * f[0].hypot(f[1]) {
                    continue;
                }
                for &sh in shifts {
                    let ca = [c[0] - p[0], c[1] + sh - p[1]];
                    let t = cross(ca, f) / den;
                    let s = cross(ca, e) / den;
                    if !(-1e-12..=1.0 + 1e-12).contains(&s) {
                        continue;
                    }
                    if t > 0.0 && t < plus {
                        plus = t;
                    } else if t < 0.0 && t > minus {
                        minus = t;
                    }
                }
            }
        }
        (plus, minus)
    }

    /// Offsets of the neighbours before and after index `i` along an axis.
    fn half_widths(coords: &[f64], i: usize, periodic_step: Option<f64>) -> (f64, f64) {
        if let Some(h) = periodic_step {
            return (0.5 * h, 0.5 * h);
        }
        let n = coords.len();
        let below = if i > 0 {
            0.5 * (coords[i] - coords[i - 1])
        } else {
            0.0
        };
        let above = if i + 1 < n {
            0.5 * (coords[i + 1] - coords[i])
        } else {
            0.0
        };
        (below, above)
    }
}

/// Grid edges with cut-cell conductances. The dual face of every edge is
/// clipped where it meets a plate, and a free-to-plate edge is shortened to
/// the point where it meets the plate curve.
fn edges(grid: &Grid) -> Vec<(usize, usize, f64)> {
    let ax = &grid.axes;
    let (nx, ny) = (ax.nx(), ax.ny());
    let periodic_step = ax.periodic.then(|| ax.hy());
    let mut out = Vec::with_capacity(2 * nx * ny);
    let mut push =
        |a: usize, b: usize, pa: [f64; 2], e: [f64; 2], face: [f64; 2], widths: (f64, f64)| {
            let (fa, fb) = (grid.nodes[a], grid.nodes[b]);
            if fa != Node::Free && fb != Node::Free {
                out.push((a, b, 0.0));
                return;
            }
            let len = e[0].hypot(e[1]);
            let near = [a, b];
            let touched = grid.chords_at(a).len() + grid.chords_at(b).len() > 0;
            let (below, above) = widths;
            let mut width = below + above;
            let mut frac = 1.0;
            if touched {
                let mid = [pa[0] + 0.5 * e[0], pa[1] + 0.5 * e[1]];
                let (up, down) = grid.crossings(&near, mid, face, above, below);
                width = (up - down).max(0.1 * width);
                let from_free = match (fa, fb) {
                    (Node::Free, Node::Fixed(_)) => Some((pa, e)),
                    (Node::Fixed(_), Node::Free) => {
                        Some(([pa[0] + e[0], pa[1] + e[1]], [-e[0], -e[1]]))
                    }
                    _ => None,
                };
                if let Some((p, dir)) = from_free {
                    let (t, _) = grid.crossings(&near, p, dir, 1.5, 0.0);
                    frac = t.clamp(0.1, 1.5);
                }
            }
            out.push((a, b, width / (frac * len)));
        };
    for i in 0..nx {
        for j in 0..ny {
            let pa = [ax.xs[i], ax.ys[j]];
            if i + 1 < nx {
                let widths = Grid::half_widths(&ax.ys, j, periodic_step);
                let e = [ax.xs[i + 1] - ax.xs[i], 0.0];
                push(grid.id(i, j), grid.id(i + 1, j), pa, e, [0.0, 1.0], widths);
            }
            let next = if j + 1 < ny {
                Some(j + 1)
            } else if ax.periodic {
                Some(0)
            } else {
                None
            };
            if let Some(jn) = next {
                let widths = Grid::half_widths(&ax.xs, i, None);
                let e = [0.0, ax.hy()];
                push(grid.id(i, j), grid.id(i, jn), pa, e, [1.0, 0.0], widths);
            }
        }
    }
    out.retain(|e| e.2 > 0.0);
    out
}

pub(crate) fn assemble(grid: &Grid) -> System {
    let mut index = vec![NONE; grid.nodes.len()];
    let mut n = 0u32;
    for (k, node) in grid.nodes.iter().enumerate() {
        if *node == Node::Free {
            index[k] = n;
            n += 1;
        }
    }
    let n = n as usize;
    let mut diag = vec![0.0; n];
    let mut nbr = vec![[NONE; 4]; n];
    let mut cond = vec![[0.0; 4]; n];
    let mut rhs = vec![0.0; n];
    let push = |k: usize, other: u32, c: f64, nbr: &mut Vec<[u32; 4]>, cond: &mut Vec<[f64; 4]>| {
        let slot = nbr[k]
            .iter()
            .position(|&x| x == NONE)
            .expect("at most four neighbours");
        nbr[k][slot] = other;
        cond[k][slot] = c;
    };
    let edges = edges(grid);
    for &(a, b, c) in &edges {
        match (grid.nodes[a], grid.nodes[b]) {
            (Node::Free, Node::Free) => {
                let (ia, ib) = (index[a], index[b]);
                diag[ia as usize] += c;
                diag[ib as usize] += c;
                push(ia as usize, ib, c, &mut nbr, &mut cond);
                push(ib as usize, ia, c, &mut nbr, &mut cond);
            }
            (Node::Free, Node::Fixed(v)) => {
                diag[index[a] as usize] += c;
                rhs[index[a] as usize] += c * v;
            }
            (Node::Fixed(v), Node::Free) => {
                diag[index[b] as usize] += c;
                rhs[index[b] as usize] += c * v;
            }
            _ => {}
        }
    }
    System {
        diag,
        nbr,
        cond,
        rhs,
        index,
        edges,
    }
}

/// Discrete Dirichlet energy `sum c_e (u_a - u_b)^2` of a free-node solution.
pub(crate) fn energy(grid: &Grid, sys: &System, u: &[f64]) -> f64 {
    let value = |k: usize| match grid.nodes[k] {
        Node::Free => u[sys.index[k] as usize],
        Node::Fixed(v) => v,
    };
    sys.edges
        .iter()
        .map(|&(a, b, c)| c * (value(a) - value(b)).powi(2))
        .sum()
}

/// Smallest frame-coordinate distance between the two plates' images.
pub(crate) fn separation(layout: &Layout, spec: &CondenserSpec) -> Result<f64> {
    let step = 1e-2 * layout_scale(layout);
    let e = layout.polylines(&spec.plate_e, step);
    let f = layout.polylines(&spec.plate_f, step);
    let inside = |plate: &Plate, lines: &[Vec<[f64; 2]>]| {
        lines.iter().flatten().any(|p| {
            let z = layout.frame.plane_point(p[0], p[1]);
            plate.primitives.iter().any(|q| q.filled_contains(z))
        })
    };
    if inside(&spec.plate_e, &f) || inside(&spec.plate_f, &e) {
        return Err(Error::Condenser("plates intersect".into()));
    }
    let mut best = f64::INFINITY;
    let period = matches!(layout.frame, FrameMap::Log { .. });
    for a in e.iter().flatten() {
        for lb in &f {
            for w in lb.windows(2) {
                best = best.min(periodic_distance(*a, w[0], w[1], period));
            }
            if lb.len() == 1 {
                best = best.min(periodic_distance(*a, lb[0], lb[0], period));
            }
        }
    }
    for b in f.iter().flatten() {
        for la in &e {
            for w in la.windows(2) {
                best = best.min(periodic_distance(*b, w[0], w[1], period));
            }
        }
    }
    if !(best > 0.0) {
        return Err(Error::Condenser("plates intersect".into()));
    }
    Ok(best)
}

fn layout_scale(layout: &Layout) -> f64 {
    match layout.frame {
        FrameMap::Plane => {
            let ax = &layout.base;
            (ax.xs.last().unwrap() - ax.xs[0]).max(ax.ys.last().unwrap() - ax.ys[0])
        }
        FrameMap::Log { .. } => 2.0 * PI,
    }
}

fn periodic_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2], periodic: bool) -> f64 {
    // unwrapped angles may run past one period
    let shifts = if periodic { -3..=3 } else { 0..=0 };
    shifts
        .map(|k| {
            let q = [p[0], p[1] + 2.0 * PI * k as f64];
            let rel = |v: [f64; 2]| [v[0] - q[0], v[1] - q[1]];
            segment_origin_distance(rel(a), rel(b))
        })
        .fold(f64::INFINITY, f64::min)
}

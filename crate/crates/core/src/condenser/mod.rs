//! Grid oracle for the capacity (curve-family modulus) of plane condensers.
//!
//! The potential is 1 on plate E and 0 on plate F; the capacity is the
//! Dirichlet energy of the discrete harmonic solution. Two frames are
//! available:
//!
//! * `box`: the plane itself, truncated to a rectangle with insulated sides.
//!   Suitable when the field outside the rectangle vanishes, for instance
//!   when one plate encloses the other.
//! * `log-polar`: the conformal coordinates `zeta = log(z - center)`. The
//!   punctured plane becomes a periodic strip, a plate through `center` or
//!   through infinity becomes an end of the strip, and the energy is
//!   unchanged. The strip is truncated `margin` units beyond the plates,
//!   where the field decays like `exp(-|x|)`.
//!
//! Grids are vertex-centered and nested: level `k` splits every base
//! interval into `2^k` pieces, so plate tips placed on base nodes stay on
//! nodes and Richardson extrapolation over `h, h/2, h/4` sees a smooth error.
//!
//! # Spec files
//!
//! Specs are TOML:
//!
//! ```toml
//! [frame]
//! kind = "log-polar"       # or "box" with xmin, xmax, ymin, ymax
//! center = [0.0, 0.0]
//! margin = 12.0            # optional
//!
//! [plate_e]
//! id = "E"
//! primitives = [{ kind = "segment", a = [-1.0, 0.0], b = [0.0, 0.0] }]
//!
//! [plate_f]
//! id = "F"
//! primitives = [{ kind = "ray", from = [1.0, 0.0], direction = [1.0, 0.0] }]
//! ```
//!
//! Primitive kinds: `segment {a, b}`, `ray {from, direction}`,
//! `arc {center, radius, start, end}` (radians, counter-clockwise),
//! `circle {center, radius}`, `disk {center, radius}`.

mod cg;
mod geometry;
mod mesh;
mod richardson;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use geometry::{Point, Primitive};
pub use richardson::{richardson_extrapolate, Extrapolation};

/// Relative residual at which the linear solve stops.
pub const SOLVER_TOLERANCE: f64 = 1e-10;
/// Iteration cap of the linear solve.
pub const SOLVER_MAX_ITERATIONS: usize = 100_000;
/// Default base spacing is the plate separation divided by this.
pub const DEFAULT_SPACING_DIVISOR: f64 = 16.0;
/// Separation must be at least this many base spacings.
pub const MIN_SEPARATION_CELLS: f64 = 4.0;
pub const DEFAULT_LOG_MARGIN: f64 = 12.0;

fn default_margin() -> f64 {
    DEFAULT_LOG_MARGIN
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Frame {
    Box {
        xmin: f64,
        xmax: f64,
        ymin: f64,
        ymax: f64,
    },
    LogPolar {
        center: Point,
        #[serde(default = "default_margin")]
        margin: f64,
    },
}

impl Frame {
    pub fn log_polar(center: Point) -> Frame {
        Frame::LogPolar {
            center,
            margin: DEFAULT_LOG_MARGIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plate {
    pub id: String,
    pub primitives: Vec<Primitive>,
}

impl Plate {
    pub fn new(id: &str, primitives: Vec<Primitive>) -> Plate {
        Plate {
            id: id.to_string(),
            primitives,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondenserSpec {
    pub frame: Frame,
    /// Plate held at potential 1.
    pub plate_e: Plate,
    /// Plate held at potential 0.
    pub plate_f: Plate,
}

impl CondenserSpec {
    pub fn from_toml(text: &str) -> Result<CondenserSpec> {
        let spec: CondenserSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("specs always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        for plate in [&self.plate_e, &self.plate_f] {
            if plate.primitives.is_empty() {
                return Err(Error::Condenser(format!("plate {} is empty", plate.id)));
            }
            for p in &plate.primitives {
                p.validate()?;
            }
        }
        match self.frame {
            Frame::Box {
                xmin,
                xmax,
                ymin,
                ymax,
            } => {
                if !(xmin < xmax && ymin < ymax)
                    || ![xmin, xmax, ymin, ymax].iter().all(|v| v.is_finite())
                {
                    return Err(Error::Condenser(
                        "box needs xmin < xmax and ymin < ymax".into(),
                    ));
                }
            }
            Frame::LogPolar { center, margin } => {
                if !(center[0].is_finite() && center[1].is_finite()) || !(margin > 0.0) {
                    return Err(Error::Condenser(
                        "log-polar frame needs a finite center and margin > 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Ring `r1 < |z| < r2` between two circles, in a box frame.
    pub fn annulus(r1: f64, r2: f64) -> CondenserSpec {
        let b = 1.05 * r2;
        CondenserSpec {
            frame: Frame::Box {
                xmin: -b,
                xmax: b,
                ymin: -b,
                ymax: b,
            },
            plate_e: Plate::new(
                "E",
                vec![Primitive::Circle {
                    center: [0.0, 0.0],
                    radius: r1,
                }],
            ),
            plate_f: Plate::new(
                "F",
                vec![Primitive::Circle {
                    center: [0.0, 0.0],
                    radius: r2,
                }],
            ),
        }
    }

    /// `E = [-e1, 0]`, `F = [s e1, inf]`; capacity `tau_2(s)`.
    pub fn teichmuller(s: f64) -> CondenserSpec {
        CondenserSpec {
            frame: Frame::log_polar([0.0, 0.0]),
            plate_e: Plate::new(
                "E",
                vec![Primitive::Segment {
                    a: [-1.0, 0.0],
                    b: [0.0, 0.0],
                }],
            ),
            plate_f: Plate::new(
                "F",
                vec![Primitive::Ray {
                    from: [s, 0.0],
                    direction: [1.0, 0.0],
                }],
            ),
        }
    }

    /// `E` the closed unit disk, `F = [t e1, inf]`; capacity `gamma_2(t)`.
    pub fn grotzsch(t: f64) -> CondenserSpec {
        CondenserSpec {
            frame: Frame::log_polar([0.0, 0.0]),
            plate_e: Plate::new(
                "E",
                vec![Primitive::Disk {
                    center: [0.0, 0.0],
                    radius: 1.0,
                }],
            ),
            plate_f: Plate::new(
                "F",
                vec![Primitive::Ray {
                    from: [t, 0.0],
                    direction: [1.0, 0.0],
                }],
            ),
        }
    }

    /// `E = [0, e1]`, `F` the radial ray from `z` to infinity.
    pub fn segment_ray(z: Complex64) -> CondenserSpec {
        CondenserSpec {
            frame: Frame::log_polar([0.0, 0.0]),
            plate_e: Plate::new(
                "E",
                vec![Primitive::Segment {
                    a: [0.0, 0.0],
                    b: [1.0, 0.0],
                }],
            ),
            plate_f: Plate::new(
                "F",
                vec![Primitive::Ray {
                    from: [z.re, z.im],
                    direction: [z.re, z.im],
                }],
            ),
        }
    }

    /// The same condenser scaled by `k > 0` about the origin.
    pub fn scaled(&self, k: f64) -> CondenserSpec {
        let frame = match self.frame {
            Frame::Box {
                xmin,
                xmax,
                ymin,
                ymax,
            } => Frame::Box {
                xmin: xmin * k,
                xmax: xmax * k,
                ymin: ymin * k,
                ymax: ymax * k,
            },
            Frame::LogPolar { center, margin } => Frame::LogPolar {
                center: [center[0] * k, center[1] * k],
                margin,
            },
        };
        let plate = |p: &Plate| Plate {
            id: p.id.clone(),
            primitives: p.primitives.iter().map(|q| q.scaled(k)).collect(),
        };
        CondenserSpec {
            frame,
            plate_e: plate(&self.plate_e),
            plate_f: plate(&self.plate_f),
        }
    }

    /// Plate separation measured in frame coordinates.
    pub fn separation(&self) -> Result<f64> {
        self.validate()?;
        // any spacing works for the layout; only the frame matters here
        let layout = mesh::Layout::new(self, 0.05 * self.nominal_size())?;
        mesh::separation(&layout, self)
    }

    /// Default base spacing: separation / 16.
    pub fn default_spacing(&self) -> Result<f64> {
        Ok(self.separation()? / DEFAULT_SPACING_DIVISOR)
    }

    fn nominal_size(&self) -> f64 {
        match self.frame {
            Frame::Box {
                xmin,
                xmax,
                ymin,
                ymax,
            } => (xmax - xmin).min(ymax - ymin),
            Frame::LogPolar { .. } => 1.0,
        }
    }
}

/// One grid of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub h: f64,
    pub capacity: f64,
    pub iterations: usize,
    pub residual: f64,
    pub unknowns: usize,
    /// The solver's quadratic functional never increased.
    pub energy_monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    /// Raw capacity on the finest grid.
    pub capacity: f64,
    /// Spacing of the finest grid.
    pub h: f64,
    pub iterations: usize,
    pub residual: f64,
    /// Richardson extrapolant over three grids.
    pub extrapolated: Option<f64>,
    pub order: Option<f64>,
    /// Extrapolation was attempted and refused.
    pub extrapolation_refused: bool,
    pub levels: Vec<LevelReport>,
}

impl SolveReport {
    /// Extrapolated value when available, else the finest raw value.
    pub fn best(&self) -> f64 {
        self.extrapolated.unwrap_or(self.capacity)
    }

    fn from_levels(levels: Vec<LevelReport>) -> SolveReport {
        let fine = levels.last().expect("at least one level").clone();
        let mut report = SolveReport {
            capacity: fine.capacity,
            h: fine.h,
            iterations: fine.iterations,
            residual: fine.residual,
            extrapolated: None,
            order: None,
            extrapolation_refused: false,
            levels,
        };
        if report.levels.len() == 3 {
            let e = richardson_from_levels(&report.levels).expect("nested levels");
            report.extrapolation_refused = e.refused;
            report.order = e.order;
            if !e.refused {
                report.extrapolated = Some(e.value);
            }
        }
        report
    }
}

/// Richardson extrapolation over the reports of one spec at `h`, `h/2`, `h/4`.
pub fn richardson_from_levels(levels: &[LevelReport]) -> Result<Extrapolation> {
    if levels.len() != 3 {
        return Err(Error::Condenser(format!(
            "need 3 grids, got {}",
            levels.len()
        )));
    }
    for w in levels.windows(2) {
        if ((w[0].h / w[1].h) - 2.0).abs() > 1e-9 {
            return Err(Error::Condenser("grids must halve the spacing".into()));
        }
    }
    Ok(richardson_extrapolate(
        levels[0].capacity,
        levels[1].capacity,
        levels[2].capacity,
    ))
}

fn solve_level(spec: &CondenserSpec, layout: &mesh::Layout, level: u32) -> Result<LevelReport> {
    let grid = layout.grid(spec, level)?;
    let sys = mesh::assemble(&grid);
    let out = cg::solve(&sys, SOLVER_TOLERANCE, SOLVER_MAX_ITERATIONS)?;
    let energy_monotone = out
        .energy_trace
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-13 * w[0].abs().max(1.0));
    Ok(LevelReport {
        h: layout.h / (1u64 << level) as f64,
        capacity: mesh::energy(&grid, &sys, &out.solution),
        iterations: out.iterations,
        residual: out.residual,
        unknowns: sys.diag.len(),
        energy_monotone,
    })
}

fn prepare(spec: &CondenserSpec, h: Option<f64>) -> Result<mesh::Layout> {
    spec.validate()?;
    let sep = spec.separation()?;
    let h = h.unwrap_or(sep / DEFAULT_SPACING_DIVISOR);
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Domain {
            name: "h",
            value: h,
            expected: "h > 0",
        });
    }
    if sep < MIN_SEPARATION_CELLS * h {
        return Err(Error::TooCoarse {
            h,
            reason: format!("plate separation {sep:.3e} is below 4h"),
        });
    }
    mesh::Layout::new(spec, h)
}

/// Solve on grids `h`, `h/2`, `h/4` (default `h`: separation / 16) and
/// extrapolate.
pub fn solve_capacity(spec: &CondenserSpec, h: Option<f64>) -> Result<SolveReport> {
    let layout = prepare(spec, h)?;
    let levels = (0..3u32)
        .into_par_iter()
        .map(|k| solve_level(spec, &layout, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(SolveReport::from_levels(levels))
}

/// Solve on the single grid of spacing `h`.
pub fn solve_single(spec: &CondenserSpec, h: Option<f64>) -> Result<SolveReport> {
    let layout = prepare(spec, h)?;
    Ok(SolveReport::from_levels(vec![solve_level(
        spec, &layout, 0,
    )?]))
}

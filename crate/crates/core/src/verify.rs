//! Invariant suites run by `ferrand verify`.
//!
//! Each suite returns named checks with a pass flag and a short detail
//! string. Inputs are fixed grids, so every run is identical.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::CapacityEvaluator;
use crate::condenser::{solve_capacity, CondenserSpec, Primitive};
use crate::distortion::{psi_bound_margins, DistortionParams};
use crate::elliptic::{agm, complement, ellint_k, mu};
use crate::error::Result;
use crate::isometry::{
    certified_pairs, default_sample_points, dilatation_profile_routes, isometry_bound_check,
    lambda_distortion, linear_dilatation, metric_sphere_margins, PlaneMap, DILATATION_BOUND,
    ISOMETRY_ESTIMATE_BOUND, ISOMETRY_TOLERANCE,
};
use crate::lambda::{
    lambda_general_bounds, lambda_punctured, p_unit_circle, punctured_sandwich,
    trace_metric_sphere, DomainSpec, PairClass, PuncturedPair,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &str, name: &str, passed: bool, detail: String) -> Check {
    Check {
        suite: suite.to_string(),
        name: name.to_string(),
        passed,
        detail,
    }
}

/// Run a fallible measurement; an error is a failed check.
fn guarded(suite: &str, name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => check(suite, name, passed, detail),
        Err(e) => check(suite, name, false, format!("error: {e}")),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `n` points spaced evenly in `log t` over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp())
        .collect()
}

/// 200 planar pairs with closed-form `lambda` inside the ball
/// `|y - x| < |x|`: 100 on rays from the origin, 100 with `|x| = |y|`.
pub fn exact_configurations() -> Vec<PuncturedPair> {
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let mut out = Vec::with_capacity(200);
    for k in 0..100 {
        let u = (k as f64 + 0.5) / 100.0;
        let phase = 2.0 * PI * ((k as f64 * golden) % 1.0);
        let x = Complex64::from_polar((3.0 * u - 1.5).exp(), phase);
        // stretch factor in (0.05, 1.95), away from 1
        let s = if k % 2 == 0 {
            0.05 + 0.9 * u
        } else {
            1.05 + 0.9 * u
        };
        out.push(PuncturedPair::planar(x, x * s).expect("valid pair"));
    }
    for k in 0..100 {
        let u = (k as f64 + 0.5) / 100.0;
        let phase = 2.0 * PI * ((k as f64 * golden + 0.3) % 1.0);
        let rho = (2.0 * ((k as f64 * 0.37) % 1.0) - 1.0).exp();
        // angle in (0, pi/3) keeps |x - y| < |x|
        let angle = PI / 3.0 * (0.02 + 0.96 * u);
        let x = Complex64::from_polar(rho, phase);
        let y = Complex64::from_polar(rho, phase + angle);
        out.push(PuncturedPair::planar(x, y).expect("valid pair"));
    }
    out
}

pub fn elliptic_suite() -> Vec<Check> {
    let s = "elliptic";
    let ev = CapacityEvaluator::planar();
    vec![
        guarded(s, "gamma_2(sqrt 2) = 4", || {
            let v = ev.gamma(2f64.sqrt())?;
            Ok((rel(v, 4.0) <= 1e-10, format!("{v:.15e}")))
        }),
        guarded(s, "tau_2(1) = 2", || {
            let v = ev.tau(1.0)?;
            Ok((rel(v, 2.0) <= 1e-10, format!("{v:.15e}")))
        }),
        guarded(s, "mu(r) mu(r') = pi^2/4 on 50 points", || {
            let mut worst = 0.0f64;
            for k in 1..=50 {
                let r = k as f64 / 51.0;
                worst = worst.max(rel(mu(r)? * mu(complement(r))?, PI * PI / 4.0));
            }
            Ok((worst <= 1e-12, format!("max rel err {worst:.2e}")))
        }),
        guarded(s, "agm between geometric and arithmetic mean", || {
            let mut ok = true;
            for &(a, b) in &[(1.0, 0.1), (2.0, 3.0), (1e-5, 1e5)] {
                let m = agm(a, b)?;
                ok &= (a * b).sqrt() <= m * (1.0 + 1e-15) && m <= 0.5 * (a + b) * (1.0 + 1e-15);
            }
            Ok((ok, String::new()))
        }),
        guarded(s, "K(1/sqrt 2) = 1.8540746773013719", || {
            let v = ellint_k(0.5f64.sqrt())?;
            Ok((rel(v, 1.854_074_677_301_371_9) <= 1e-14, format!("{v:.16}")))
        }),
    ]
}

pub fn capacity_suite() -> Vec<Check> {
    let s = "capacity";
    let ev = CapacityEvaluator::planar();
    vec![
        guarded(
            s,
            "gamma_2(t) = 2 tau_2(t^2 - 1) on 100 t in (1, 100]",
            || {
                let mut worst = 0.0f64;
                for t in log_grid(1.0 + 1e-6, 100.0, 100) {
                    worst = worst.max(rel(ev.gamma(t)?, 2.0 * ev.tau((t - 1.0) * (t + 1.0))?));
                }
                Ok((worst <= 1e-10, format!("max rel err {worst:.2e}")))
            },
        ),
        guarded(s, "tau_2 strictly decreasing", || {
            let grid = log_grid(1e-6, 1e6, 200);
            let vals: Vec<f64> = grid.iter().map(|&x| ev.tau(x)).collect::<Result<_>>()?;
            Ok((vals.windows(2).all(|w| w[1] < w[0]), String::new()))
        }),
        guarded(s, "tau_2^{-1}(tau_2(s)) = s", || {
            let mut worst = 0.0f64;
            for s in log_grid(1e-6, 1e6, 40) {
                worst = worst.max(rel(ev.tau_inv(ev.tau(s)?)?, s));
            }
            Ok((worst <= 1e-9, format!("max rel err {worst:.2e}")))
        }),
    ]
}

pub fn distortion_suite() -> Vec<Check> {
    let s = "distortion";
    let ev = CapacityEvaluator::planar();
    vec![
        guarded(s, "tau^{-1}(K tau(t)) = (1 - phi^2)/phi^2", || {
            let mut worst = 0.0f64;
            for &k in &[0.5, 1.0, 2.0, 4.0] {
                for t in log_grid(1e-3, 1e3, 61) {
                    let direct = ev.tau_inv(k * ev.tau(t)?)?;
                    worst = worst.max(rel(ev.tau_inv_scaled(k, t)?, direct));
                }
            }
            Ok((worst <= 1e-9, format!("max rel err {worst:.2e}")))
        }),
        guarded(s, "psi ratio bounds for K in {1, 2, 4}", || {
            let mut margin = f64::INFINITY;
            let mut ok = true;
            for &k in &[1.0, 2.0, 4.0] {
                let p = DistortionParams::planar(k)?;
                for j in 1..=100 {
                    let m = psi_bound_margins(&p, j as f64 / 100.0)?;
                    ok &= m.holds(1e-12);
                    margin = margin.min(m.margin());
                }
            }
            Ok((ok, format!("min margin {margin:.3e}")))
        }),
        guarded(s, "phi_K(phi_K'(r)) = phi_KK'(r)", || {
            let mut worst = 0.0f64;
            for &(k1, k2) in &[(2.0, 3.0), (0.5, 4.0), (1.5, 0.25)] {
                for j in 1..20 {
                    let r = j as f64 / 20.0;
                    let lhs = ev.phi(k1, ev.phi(k2, r)?)?;
                    worst = worst.max(rel(lhs, ev.phi(k1 * k2, r)?));
                }
            }
            Ok((worst <= 1e-9, format!("max rel err {worst:.2e}")))
        }),
    ]
}

pub fn lambda_suite() -> Vec<Check> {
    let s = "lambda";
    let ev = CapacityEvaluator::planar();
    vec![
        guarded(s, "punctured sandwich contains exact values", || {
            let mut bad = 0;
            let pairs = exact_configurations();
            for p in &pairs {
                let exact = lambda_punctured(&ev, p)?;
                if !exact.exact || !punctured_sandwich(&ev, p)?.contains(exact.lower, 1e-12) {
                    bad += 1;
                }
            }
            Ok((bad == 0, format!("{bad} of {} violate", pairs.len())))
        }),
        guarded(s, "ball estimate contains exact values", || {
            let mut bad = 0;
            let pairs = exact_configurations();
            let domain = DomainSpec::punctured(2);
            for p in &pairs {
                let exact = lambda_punctured(&ev, p)?;
                let b = lambda_general_bounds(&ev, &domain, p.x(), p.y())?;
                if !b.contains(exact.lower, 1e-12) {
                    bad += 1;
                }
            }
            Ok((bad == 0, format!("{bad} of {} violate", pairs.len())))
        }),
        guarded(s, "collinear lower bound is exact", || {
            let mut worst = 0.0f64;
            for p in exact_configurations()
                .iter()
                .filter(|p| p.classify() == PairClass::Collinear)
            {
                worst = worst.max(rel(
                    punctured_sandwich(&ev, p)?.lower,
                    lambda_punctured(&ev, p)?.lower,
                ));
            }
            Ok((worst <= 1e-12, format!("max rel err {worst:.2e}")))
        }),
        guarded(s, "lambda symmetric in its arguments", || {
            let mut ok = true;
            for p in exact_configurations() {
                let q = PuncturedPair::new(p.y(), p.x())?;
                ok &= lambda_punctured(&ev, &p)? == lambda_punctured(&ev, &q)?;
            }
            Ok((ok, String::new()))
        }),
        guarded(s, "lambda(e1, z) = lambda(e1, z/|z|^2)", || {
            let e1 = Complex64::new(1.0, 0.0);
            let mut worst = 0.0f64;
            for k in 1..40 {
                let theta = 2.0 * PI * k as f64 / 40.0;
                for z in [
                    Complex64::from_polar(1.0, theta),
                    Complex64::new(0.3 + 0.1 * k as f64, 0.0),
                ] {
                    if (z - e1).norm() < 1e-9 {
                        continue;
                    }
                    let w = z / z.norm_sqr();
                    let a = lambda_punctured(&ev, &PuncturedPair::planar(e1, z)?)?;
                    let b = lambda_punctured(&ev, &PuncturedPair::planar(e1, w)?)?;
                    worst = worst.max(rel(a.lower, b.lower));
                }
            }
            Ok((worst <= 1e-12, format!("max rel err {worst:.2e}")))
        }),
        guarded(
            s,
            "p on the unit circle: p(pi) = 2, symmetric, above tau(min(|z|, |z - e1|))",
            || {
                let mut ok = rel(p_unit_circle(PI)?, 2.0) <= 1e-14;
                for k in 1..64 {
                    let theta = 2.0 * PI * k as f64 / 64.0;
                    let p = p_unit_circle(theta)?;
                    ok &= rel(p, p_unit_circle(2.0 * PI - theta)?) <= 1e-12;
                    let chord = 2.0 * (theta / 2.0).sin().abs();
                    ok &= p >= ev.tau(chord.min(1.0))? * (1.0 - 1e-12);
                    ok &= p >= 2.0 * (1.0 - 1e-14);
                }
                Ok((ok, String::new()))
            },
        ),
        guarded(
            s,
            "metric sphere trace: inner inside outer, similarity invariant",
            || {
                let a = trace_metric_sphere(&ev, Complex64::new(1.0, 0.0), 3.0, 48)?;
                let b = trace_metric_sphere(&ev, Complex64::new(2.0, 0.0), 3.0, 48)?;
                let mut ok = a.rays.iter().all(|r| r.r_in <= r.r_out);
                for (ra, rb) in a.rays.iter().zip(&b.rays) {
                    ok &= rel(2.0 * ra.r_in, rb.r_in) <= 1e-9
                        && rel(2.0 * ra.r_out, rb.r_out) <= 1e-9;
                }
                Ok((ok, String::new()))
            },
        ),
    ]
}

pub fn condenser_suite() -> Vec<Check> {
    let s = "condenser";
    let ev = CapacityEvaluator::planar();
    let mut jobs: Vec<(String, CondenserSpec, f64, f64)> = vec![
        (
            "annulus 2 pi".into(),
            CondenserSpec::annulus(1.0, std::f64::consts::E),
            2.0 * PI,
            0.01,
        ),
        (
            "gamma_2(sqrt 2) = 4".into(),
            CondenserSpec::grotzsch(2f64.sqrt()),
            4.0,
            0.02,
        ),
    ];
    for &x in &[0.5, 1.0, 3.0] {
        jobs.push((
            format!("tau_2({x})"),
            CondenserSpec::teichmuller(x),
            ev.tau(x).unwrap_or(f64::NAN),
            0.02,
        ));
    }
    let mut out: Vec<Check> = jobs
        .par_iter()
        .map(|(name, spec, expected, tol)| {
            guarded(s, name, || {
                let r = solve_capacity(spec, None)?;
                let err = rel(r.best(), *expected);
                let monotone = r.levels.iter().all(|l| l.energy_monotone);
                Ok((
                    err <= *tol && monotone,
                    format!(
                        "{:.6} vs {:.6}, rel err {:.2e}, order {:?}",
                        r.best(),
                        expected,
                        err,
                        r.order
                    ),
                ))
            })
        })
        .collect();
    out.push(guarded(s, "scaling invariance", || {
        let base = CondenserSpec::teichmuller(1.0);
        let r0 = solve_capacity(&base, None)?;
        let disc = (r0.levels[2].capacity - r0.best()).abs();
        let mut ok = true;
        for c in [0.5, 3.0] {
            let r = solve_capacity(&base.scaled(c), None)?;
            ok &= (r.best() - r0.best()).abs() <= 2.0 * disc;
        }
        Ok((ok, format!("discretization error {disc:.2e}")))
    }));
    out.push(guarded(s, "longer plate F does not lower capacity", || {
        let mut spec = CondenserSpec::teichmuller(1.0);
        spec.plate_f.primitives = vec![Primitive::Segment {
            a: [1.0, 0.0],
            b: [4.0, 0.0],
        }];
        let a = solve_capacity(&spec, None)?;
        spec.plate_f.primitives = vec![Primitive::Segment {
            a: [0.5, 0.0],
            b: [4.0, 0.0],
        }];
        let b = solve_capacity(&spec, None)?;
        Ok((
            b.best() >= a.best(),
            format!("{:.6} -> {:.6}", a.best(), b.best()),
        ))
    }));
    out
}

pub fn isometry_suite() -> Vec<Check> {
    let s = "isometry";
    let ev = CapacityEvaluator::planar();
    let mut out = Vec::new();
    let maps = [
        ("z -> 5z", PlaneMap::scaling(Complex64::new(5.0, 0.0))),
        (
            "z -> (2 - i) z",
            PlaneMap::scaling(Complex64::new(2.0, -1.0)),
        ),
        ("z -> 1/z", PlaneMap::inversion(Complex64::new(1.0, 0.0))),
        (
            "z -> (3 + 2i)/z",
            PlaneMap::inversion(Complex64::new(3.0, 2.0)),
        ),
    ];
    for (name, map) in maps {
        out.push(guarded(
            s,
            &format!("{name} is an isometry with H <= 4"),
            || {
                let r = isometry_bound_check(&map?, &default_sample_points())?;
                Ok((
                    r.distortion.max_discrepancy <= ISOMETRY_TOLERANCE
                        && r.max_estimate <= ISOMETRY_ESTIMATE_BOUND,
                    format!(
                        "discrepancy {:.2e}, max H {:.4}",
                        r.distortion.max_discrepancy, r.max_estimate
                    ),
                ))
            },
        ));
    }
    out.push(guarded(s, "radial power a = 2 is rejected", || {
        let map = PlaneMap::radial_power(2.0)?;
        let pair = PuncturedPair::planar(Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0))?;
        let d = lambda_distortion(&map, &[pair])?;
        let expected = ev.tau(1.0)? - ev.tau(3.0)?;
        let refused = isometry_bound_check(&map, &default_sample_points()).is_err();
        Ok((
            refused && d.max_discrepancy > 0.0 && rel(d.max_discrepancy, expected) <= 1e-12,
            format!("discrepancy {:.15}", d.max_discrepancy),
        ))
    }));
    out.push(guarded(s, "radial power a = 2 has H(e1) near 2", || {
        let map = PlaneMap::radial_power(2.0)?;
        let r = linear_dilatation(&map, Complex64::new(1.0, 0.0), &[0.1, 0.01, 0.001], 64)?;
        Ok((rel(r.limsup, 2.0) <= 0.05, format!("{:.6}", r.limsup)))
    }));
    out.push(guarded(s, "certified pair set is fully exact", || {
        let d = lambda_distortion(&PlaneMap::identity(), &certified_pairs())?;
        Ok((
            d.skipped == 0 && d.max_discrepancy == 0.0,
            format!("{} checked", d.checked),
        ))
    }));
    out.push(guarded(
        s,
        "dilatation profile <= 256, routes agree",
        || {
            let mut ok = true;
            let mut worst = 0.0f64;
            for r in log_grid(1e-3, 0.3, 20) {
                let p = dilatation_profile_routes(r)?;
                ok &= p.tau_form <= DILATATION_BOUND;
                worst = worst.max(rel(p.psi_form, p.tau_form));
            }
            let a = dilatation_profile_routes(0.003)?.tau_form;
            let b = dilatation_profile_routes(0.001)?.tau_form;
            ok &= rel(a, b) <= 0.05 && worst <= 1e-8;
            Ok((ok, format!("route gap {worst:.2e}, profile(1e-3) = {b:.4}")))
        },
    ));
    out.push(guarded(
        s,
        "metric sphere through 2 e1 bulges outward",
        || {
            let points = metric_sphere_margins(2.0, &[PI / 4.0, FRAC_PI_2, PI])?;
            let ok = points.iter().all(|p| p.strict());
            let detail = points
                .iter()
                .map(|p| format!("{:.4}: {:.5}", p.theta, p.oracle))
                .collect::<Vec<_>>()
                .join(", ");
            Ok((ok, detail))
        },
    ));
    out
}

/// All suites in a fixed order.
pub fn run_all() -> Vec<Check> {
    let suites: [fn() -> Vec<Check>; 6] = [
        elliptic_suite,
        capacity_suite,
        distortion_suite,
        lambda_suite,
        condenser_suite,
        isometry_suite,
    ];
    suites.par_iter().map(|f| f()).collect::<Vec<_>>().concat()
}

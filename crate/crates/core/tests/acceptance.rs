//! Acceptance criteria. Runs without the test harness so every criterion
//! prints one line; the process fails if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use ferrand::condenser::{solve_capacity, CondenserSpec};
use ferrand::distortion::psi_bound_margins;
use ferrand::isometry::{
    default_sample_points, dilatation_profile_routes, isometry_bound_check, lambda_distortion,
    metric_sphere_margins, PlaneMap,
};
use ferrand::lambda::{lambda_general_bounds, lambda_punctured, punctured_sandwich, PairClass};
use ferrand::verify::{exact_configurations, log_grid};
use ferrand::{mu, CapacityEvaluator, DistortionParams, DomainSpec, PuncturedPair};
use num_complex::Complex64;

/// `K(k)` by the trapezoid rule on a full period of the smooth even
/// integrand, which converges geometrically for `k < 1`.
fn k_quad(k: f64) -> f64 {
    let n = 4096;
    let h = PI / n as f64;
    let sum: f64 = (0..n)
        .map(|j| {
            let s = (j as f64 * h).sin();
            1.0 / (1.0 - k * k * s * s).sqrt()
        })
        .sum();
    0.5 * h * sum
}

/// Planar Teichmuller capacity from the quadrature `K`.
fn tau_quad(s: f64) -> f64 {
    let r = 1.0 / (1.0 + s).sqrt();
    let rc = (s / (1.0 + s)).sqrt();
    // mu(r) = pi K(r') / (2 K(r)), tau = pi / mu(r)
    2.0 * k_quad(r) / k_quad(rc)
}

/// Planar `p(e^{i theta})` from the quadrature `K`.
fn p_circle_quad(theta: f64) -> f64 {
    let (a, b) = (theta / 4.0).sin_cos();
    let (ka, kb) = (k_quad(a), k_quad(b));
    (ka * ka + kb * kb) / (ka * kb)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn anchors() -> Outcome {
    let start = Instant::now();
    let ev = CapacityEvaluator::planar();
    let g = ev.gamma(2f64.sqrt()).unwrap();
    let t = ev.tau(1.0).unwrap();
    let mut worst = 0.0f64;
    for k in 1..=50 {
        let r = k as f64 / 51.0;
        let rc = (1.0 - r * r).sqrt();
        worst = worst.max(rel(mu(r).unwrap() * mu(rc).unwrap(), PI * PI / 4.0));
    }
    let elapsed = start.elapsed();
    outcome(
        rel(g, 4.0) <= 1e-10
            && rel(t, 2.0) <= 1e-10
            && worst <= 1e-12
            && elapsed < Duration::from_secs(1),
        format!(
            "gamma(sqrt 2) err {:.1e}, tau(1) err {:.1e}, mu product err {:.1e}, {:?}",
            rel(g, 4.0),
            rel(t, 2.0),
            worst,
            elapsed
        ),
    )
}

fn gamma_tau_identity() -> Outcome {
    let ev = CapacityEvaluator::planar();
    let mut worst = 0.0f64;
    let mut oracle_worst = 0.0f64;
    for (k, t) in log_grid(1.0 + 1e-9, 100.0, 100).into_iter().enumerate() {
        let g = ev.gamma(t).unwrap();
        worst = worst.max(rel(g, 2.0 * ev.tau((t - 1.0) * (t + 1.0)).unwrap()));
        if k % 10 == 5 {
            // gamma(t) = 2 pi / mu(1/t), checked against quadrature
            let r = 1.0 / t;
            let mu_q = PI * k_quad((1.0 - r * r).sqrt()) / (2.0 * k_quad(r));
            oracle_worst = oracle_worst.max(rel(g, 2.0 * PI / mu_q));
        }
    }
    outcome(
        worst <= 1e-10 && oracle_worst <= 1e-10,
        format!("identity err {worst:.1e}, quadrature err {oracle_worst:.1e}"),
    )
}

fn distortion_routes() -> Outcome {
    let ev = CapacityEvaluator::planar();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for &k in &[0.5, 1.0, 2.0, 4.0] {
        for t in log_grid(1e-3, 1e3, 121) {
            match (
                ev.tau(t).and_then(|v| ev.tau_inv(k * v)),
                ev.tau_inv_scaled(k, t),
            ) {
                (Ok(a), Ok(b)) => worst = worst.max(rel(b, a)),
                _ => failures += 1,
            }
        }
    }
    let mut violations = 0;
    let mut min_margin = f64::INFINITY;
    for &k in &[1.0, 2.0, 4.0] {
        let p = DistortionParams::planar(k).unwrap();
        for j in 1..=200 {
            let m = psi_bound_margins(&p, j as f64 / 200.0).unwrap();
            if !m.holds(1e-12) {
                violations += 1;
            }
            min_margin = min_margin.min(m.margin());
        }
    }
    outcome(
        worst <= 1e-9 && failures == 0 && violations == 0,
        format!(
            "route err {worst:.1e} ({failures} errors), {violations} bound violations, min margin {min_margin:.1e}"
        ),
    )
}

fn oracle_validation() -> Outcome {
    let ev = CapacityEvaluator::planar();
    let cases = [
        (
            "annulus",
            CondenserSpec::annulus(1.0, std::f64::consts::E),
            2.0 * PI,
            0.01,
        ),
        (
            "tau(1)",
            CondenserSpec::teichmuller(1.0),
            ev.tau(1.0).unwrap(),
            0.02,
        ),
        (
            "gamma(sqrt 2)",
            CondenserSpec::grotzsch(2f64.sqrt()),
            4.0,
            0.02,
        ),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, spec, expected, tol) in cases {
        let start = Instant::now();
        match solve_capacity(&spec, None) {
            Ok(r) => {
                let elapsed = start.elapsed();
                let err = rel(r.best(), expected);
                passed &= err <= tol && elapsed < Duration::from_secs(60);
                let how = if r.extrapolation_refused {
                    "finest"
                } else {
                    "extrapolated"
                };
                parts.push(format!(
                    "{name} {:.5} ({how}, err {err:.1e}, {:.1?})",
                    r.best(),
                    elapsed
                ));
            }
            Err(e) => {
                passed = false;
                parts.push(format!("{name} error: {e}"));
            }
        }
    }
    outcome(passed, parts.join("; "))
}

fn punctured_brackets() -> Outcome {
    let ev = CapacityEvaluator::planar();
    let domain = DomainSpec::punctured(2);
    let pairs = exact_configurations();
    let (mut sandwich_bad, mut ball_bad, mut oracle_worst) = (0, 0, 0.0f64);
    for p in &pairs {
        let exact = lambda_punctured(&ev, p).unwrap();
        assert!(exact.exact);
        let value = exact.lower;
        let reference = match p.classify() {
            PairClass::Collinear => {
                let (nx, ny) = (norm(p.x()), norm(p.y()));
                tau_quad((nx - ny).abs() / nx.min(ny))
            }
            PairClass::UnitCircle => p_circle_quad(p.ratio().angle),
            PairClass::General => f64::NAN,
        };
        oracle_worst = oracle_worst.max(rel(value, reference));
        if !punctured_sandwich(&ev, p).unwrap().contains(value, 1e-12) {
            sandwich_bad += 1;
        }
        if !lambda_general_bounds(&ev, &domain, p.x(), p.y())
            .unwrap()
            .contains(value, 1e-12)
        {
            ball_bad += 1;
        }
    }
    outcome(
        sandwich_bad == 0 && ball_bad == 0 && oracle_worst <= 1e-10 && pairs.len() == 200,
        format!(
            "{} cases: {sandwich_bad} sandwich, {ball_bad} ball violations; exact vs quadrature err {oracle_worst:.1e}",
            pairs.len()
        ),
    )
}

fn norm(p: &[f64]) -> f64 {
    p.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn sphere_margins() -> Outcome {
    match metric_sphere_margins(2.0, &[FRAC_PI_4, FRAC_PI_2, PI]) {
        Ok(points) => outcome(
            points.iter().all(|p| p.oracle < 2.0 * (1.0 - 0.02)),
            points
                .iter()
                .map(|p| {
                    format!(
                        "theta {:.4}: {:.5} (margin {:.4})",
                        p.theta, p.oracle, p.margin
                    )
                })
                .collect::<Vec<_>>()
                .join("; "),
        ),
        Err(e) => outcome(false, format!("error: {e}")),
    }
}

fn dilatation_profile() -> Outcome {
    let mut probes = log_grid(1e-3, 0.3, 60);
    probes.extend([0.3, 0.1, 0.03, 0.01, 0.003]);
    let mut max = 0.0f64;
    let mut worst = 0.0f64;
    for &r in &probes {
        let p = dilatation_profile_routes(r).unwrap();
        max = max.max(p.tau_form);
        worst = worst.max(rel(p.psi_form, p.tau_form));
    }
    let a = dilatation_profile_routes(0.003).unwrap().tau_form;
    let b = dilatation_profile_routes(0.001).unwrap().tau_form;
    outcome(
        max <= 256.0 && worst <= 1e-8 && rel(a, b) <= 0.05,
        format!("max profile {max:.4}, route err {worst:.1e}, observed limit {b:.4} at r = 1e-3"),
    )
}

fn isometry_lab() -> Outcome {
    let maps = [
        PlaneMap::scaling(Complex64::new(3.0, 0.0)).unwrap(),
        PlaneMap::scaling(Complex64::new(-0.5, 2.0)).unwrap(),
        PlaneMap::inversion(Complex64::new(1.0, 0.0)).unwrap(),
        PlaneMap::inversion(Complex64::new(-2.0, 0.7)).unwrap(),
    ];
    let mut passed = true;
    let (mut disc, mut h) = (0.0f64, 0.0f64);
    for map in &maps {
        match isometry_bound_check(map, &default_sample_points()) {
            Ok(r) => {
                passed &= r.holds;
                disc = disc.max(r.distortion.max_discrepancy);
                h = h.max(r.max_estimate);
            }
            Err(_) => passed = false,
        }
    }
    let radial = PlaneMap::radial_power(2.0).unwrap();
    let rejected = isometry_bound_check(&radial, &default_sample_points()).is_err();
    let pair = PuncturedPair::planar(Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)).unwrap();
    let gap = lambda_distortion(&radial, &[pair]).unwrap().max_discrepancy;
    let expected = tau_quad(1.0) - tau_quad(3.0);
    passed &= disc <= 1e-10 && h <= 4.0 && rejected && rel(gap, expected) <= 1e-10 && gap > 0.0;
    outcome(
        passed,
        format!(
            "isometry discrepancy {disc:.1e}, max H {h:.4}; radial a = 2 rejected: {rejected}, gap {gap:.12} vs {expected:.12}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("special-function anchors", anchors),
        ("gamma/tau identity", gamma_tau_identity),
        ("distortion routes and bounds", distortion_routes),
        ("condenser oracle", oracle_validation),
        ("punctured-space brackets", punctured_brackets),
        ("metric sphere margins", sphere_margins),
        ("dilatation profile", dilatation_profile),
        ("isometry lab", isometry_lab),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failed += 1;
        }
        println!(
            "criterion {} {:<30} {}  {}",
            k + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

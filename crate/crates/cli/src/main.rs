#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod format;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use ferrand::condenser::{solve_capacity, solve_single, CondenserSpec};
use ferrand::distortion::psi_bound_margins;
use ferrand::isometry::{
    default_sample_points, dilatation_profile_routes, geometric_radii, isometry_bound_check,
    linear_dilatation, PlaneMap, DEFAULT_SAMPLES,
};
use ferrand::lambda::{
    lambda_ball, lambda_general_bounds, lambda_punctured, punctured_sandwich, trace_metric_sphere,
    MetricSphereTrace,
};
use ferrand::{mu, verify, CapacityEvaluator, DistortionParams, DomainSpec, PuncturedPair};
use num_complex::Complex64;
use serde_json::json;

use format::num;

/// Ferrand's conformal invariant, ring capacities and a grid condenser oracle.
#[derive(Parser)]
#[command(name = "ferrand", version)]
struct Cli {
    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grötzsch and Teichmüller ring capacities and their inverses.
    Cap(CapArgs),
    /// Distortion functions phi and psi.
    Dist(DistArgs),
    /// The invariant lambda for a pair of points.
    Lam(LamArgs),
    /// Certified inner and outer traces of a lambda metric sphere.
    Ball(BallArgs),
    /// Capacity of a condenser given in a TOML spec file, on nested grids.
    Oracle(OracleArgs),
    /// Sampled linear dilatation of a plane map.
    Dilat(DilatArgs),
    /// The dilatation bound profile over a log-spaced r grid.
    Profile(ProfileArgs),
    /// Run every invariant suite; exits 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Args)]
#[command(allow_negative_numbers = true, group(ArgGroup::new("quantity").required(true).multiple(false)))]
struct CapArgs {
    /// Dimension; only n = 2 has a closed form.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// gamma_n(t), t > 1.
    #[arg(long, group = "quantity")]
    gamma: Option<f64>,
    /// tau_n(s), s > 0.
    #[arg(long, group = "quantity")]
    tau: Option<f64>,
    /// Inverse of gamma_n.
    #[arg(long, group = "quantity")]
    gamma_inv: Option<f64>,
    /// Inverse of tau_n.
    #[arg(long, group = "quantity")]
    tau_inv: Option<f64>,
    /// Grötzsch ring modulus mu(r), 0 < r < 1 (plane only).
    #[arg(long, group = "quantity")]
    mu: Option<f64>,
}

#[derive(Args)]
#[command(allow_negative_numbers = true, group(ArgGroup::new("function").required(true).multiple(false)))]
struct DistArgs {
    #[arg(long, short)]
    k: f64,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// phi_K(r)
    #[arg(long, group = "function")]
    phi: Option<f64>,
    /// psi_K(r)
    #[arg(long, group = "function")]
    psi: Option<f64>,
    /// tau^{-1}(K tau(t)) through phi.
    #[arg(long, group = "function")]
    tau_inv_scaled: Option<f64>,
    /// Ratios of psi to the powers of r and their bounds (K >= 1), as JSON.
    #[arg(long, group = "function")]
    bounds: Option<f64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Bound {
    /// Closed form when available, else the best enclosure.
    Best,
    /// Enclosure from the distance |x - y| relative to min(|x|, |y|).
    Sandwich,
    /// Two-sided estimate for y near x relative to the boundary distance.
    Local,
}

#[derive(Args)]
#[command(allow_negative_numbers = true, group(ArgGroup::new("domain").required(true).multiple(false)))]
struct LamArgs {
    /// Domain R^2 minus the origin.
    #[arg(long, group = "domain")]
    punctured: bool,
    /// Domain the unit disk.
    #[arg(long, group = "domain")]
    ball: bool,
    /// First point, comma separated.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    x: Point,
    /// Second point, comma separated.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    y: Point,
    #[arg(long, value_enum, default_value_t = Bound::Best)]
    bound: Bound,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BallFormat {
    Json,
    Csv,
    Svg,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct BallArgs {
    /// Center, comma separated.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    center: Complex64,
    /// Level M of lambda(center, z) = M.
    #[arg(long)]
    level: f64,
    #[arg(long, default_value_t = 64)]
    rays: usize,
    #[arg(long, value_enum, default_value_t = BallFormat::Json)]
    format: BallFormat,
}

#[derive(Args)]
struct OracleArgs {
    /// TOML condenser spec.
    spec: PathBuf,
    /// Base grid spacing; default is the plate separation over 16.
    #[arg(long)]
    h: Option<f64>,
    /// Solve on the base grid only, without extrapolation.
    #[arg(long)]
    single: bool,
}

#[derive(Args)]
#[command(allow_negative_numbers = true)]
struct DilatArgs {
    /// Map as JSON, inline or a file path.
    #[arg(long)]
    map: String,
    /// Point, comma separated; ignored with --certify.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, required_unless_present = "certify")]
    point: Option<Complex64>,
    /// Largest radius; the others shrink by factors of 10. Default |x|/10.
    #[arg(long)]
    start: Option<f64>,
    #[arg(long, default_value_t = 3)]
    count: usize,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Certify the map as an isometry first, then sample the default points.
    #[arg(long)]
    certify: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, default_value_t = 1e-3)]
    rmin: f64,
    #[arg(long, default_value_t = 0.3)]
    rmax: f64,
    #[arg(long, default_value_t = 20)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// Print JSON instead of one line per check.
    #[arg(long)]
    json: bool,
}

/// Coordinates given as `x1,x2,...`.
#[derive(Clone)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad coordinate `{p}`: {e}"))
        })
        .collect::<std::result::Result<_, _>>()
        .map(Point)
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    match parse_point(s)?.0.as_slice() {
        [x, y] => Ok(Complex64::new(*x, *y)),
        _ => Err("expected two coordinates `x,y`".into()),
    }
}

/// Command output plus whether it counts as success.
struct Output {
    text: String,
    ok: bool,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, ok: true }
    }
}

fn evaluator(n: usize) -> Result<CapacityEvaluator> {
    Ok(CapacityEvaluator::new(n)?)
}

fn cap(a: &CapArgs) -> Result<Output> {
    let ev = evaluator(a.n)?;
    let v = if let Some(t) = a.gamma {
        ev.gamma(t)?
    } else if let Some(s) = a.tau {
        ev.tau(s)?
    } else if let Some(y) = a.gamma_inv {
        ev.gamma_inv(y)?
    } else if let Some(y) = a.tau_inv {
        ev.tau_inv(y)?
    } else if let Some(r) = a.mu {
        if a.n != 2 {
            bail!("mu is the planar ring modulus; use --n 2");
        }
        mu(r)?
    } else {
        unreachable!("clap enforces one quantity")
    };
    Ok((num(v) + "\n").into())
}

fn dist(a: &DistArgs) -> Result<Output> {
    let params = DistortionParams::new(a.k, a.n)?;
    let ev = evaluator(a.n)?;
    let text = if let Some(r) = a.phi {
        num(ev.phi(a.k, r)?) + "\n"
    } else if let Some(r) = a.psi {
        num(ev.psi(a.k, r)?) + "\n"
    } else if let Some(t) = a.tau_inv_scaled {
        num(ev.tau_inv_scaled(a.k, t)?) + "\n"
    } else if let Some(r) = a.bounds {
        let m = psi_bound_margins(&params, r)?;
        format::json(&json!({
            "k": m.k,
            "r": m.r,
            "contracting_ratio": m.contracting_ratio,
            "contracting_bounds": [m.contracting_bounds.0, m.contracting_bounds.1],
            "expanding_ratio": m.expanding_ratio,
            "expanding_bounds": [m.expanding_bounds.0, m.expanding_bounds.1],
            "margin": m.margin(),
            "holds": m.holds(1e-12),
        }))?
    } else {
        unreachable!("clap enforces one function")
    };
    Ok(text.into())
}

fn lam(a: &LamArgs) -> Result<Output> {
    let (x, y) = (&a.x.0, &a.y.0);
    if x.len() != y.len() || x.len() < 2 {
        bail!("--x and --y need the same dimension, at least 2");
    }
    let ev = evaluator(x.len())?;
    let domain = if a.punctured {
        DomainSpec::punctured(x.len())
    } else {
        DomainSpec::unit_ball(x.len())
    };
    let value = match (a.bound, a.punctured) {
        (Bound::Best, true) => lambda_punctured(&ev, &PuncturedPair::new(x, y)?)?,
        (Bound::Best, false) => lambda_ball(&ev, x, y)?,
        (Bound::Sandwich, true) => punctured_sandwich(&ev, &PuncturedPair::new(x, y)?)?,
        (Bound::Sandwich, false) => bail!("--bound sandwich applies to --punctured only"),
        (Bound::Local, _) => lambda_general_bounds(&ev, &domain, x, y)?,
    };
    Ok(format::json(&value)?.into())
}

fn svg(trace: &MetricSphereTrace) -> String {
    let inner = trace.inner();
    let outer = trace.outer();
    let finite = |z: &&Complex64| z.re.is_finite() && z.im.is_finite();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for z in inner
        .iter()
        .chain(&outer)
        .chain([&trace.center])
        .filter(finite)
    {
        x0 = x0.min(z.re);
        x1 = x1.max(z.re);
        y0 = y0.min(z.im);
        y1 = y1.max(z.im);
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-12);
    let (w, h) = (x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let stroke = num(w / 400.0);
    // svg y grows downward, so points are drawn at (x, -y)
    let polygon = |pts: &[Complex64], color: &str| {
        let coords: Vec<String> = pts
            .iter()
            .filter(finite)
            .map(|z| format!("{},{}", num(z.re), num(-z.im)))
            .collect();
        format!("  <polygon points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{stroke}\"/>\n", coords.join(" "))
    };
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\" width=\"600\" height=\"{}\">\n",
        num(x0 - pad),
        num(-y1 - pad),
        num(w),
        num(h),
        (600.0 * h / w).round()
    );
    s += &polygon(&inner, "steelblue");
    s += &polygon(&outer, "firebrick");
    s += &format!(
        "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"black\"/>\n",
        num(trace.center.re),
        num(-trace.center.im),
        num(w / 150.0)
    );
    s + "</svg>\n"
}

fn ball(a: &BallArgs) -> Result<Output> {
    let ev = CapacityEvaluator::planar();
    let trace = trace_metric_sphere(&ev, a.center, a.level, a.rays)?;
    let text = match a.format {
        BallFormat::Json => format::json(&trace)?,
        BallFormat::Csv => {
            let rows: Vec<Vec<String>> = trace
                .rays
                .iter()
                .map(|r| {
                    vec![
                        num(r.direction),
                        num(r.r_in),
                        num(r.r_out),
                        num(r.window),
                        r.exact.to_string(),
                    ]
                })
                .collect();
            format::csv(&["direction", "r_in", "r_out", "window", "exact"], &rows)?
        }
        BallFormat::Svg => svg(&trace),
    };
    Ok(text.into())
}

fn oracle(a: &OracleArgs) -> Result<Output> {
    let text =
        fs::read_to_string(&a.spec).with_context(|| format!("reading {}", a.spec.display()))?;
    let spec = CondenserSpec::from_toml(&text)?;
    let report = if a.single {
        solve_single(&spec, a.h)?
    } else {
        solve_capacity(&spec, a.h)?
    };
    Ok(format::json(&report)?.into())
}

fn read_map(arg: &str) -> Result<PlaneMap> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    let map: PlaneMap = serde_json::from_str(&text).context("parsing the map")?;
    map.validate()?;
    Ok(map)
}

fn dilat(a: &DilatArgs) -> Result<Output> {
    let map = read_map(&a.map)?;
    if a.certify {
        return Ok(format::json(&isometry_bound_check(&map, &default_sample_points())?)?.into());
    }
    let x = a.point.expect("clap requires --point");
    let start = a.start.unwrap_or(0.1 * x.norm());
    if !(start > 0.0) {
        bail!("--start must be positive (give it explicitly at the origin)");
    }
    let report = linear_dilatation(&map, x, &geometric_radii(start, a.count), a.samples)?;
    Ok(format::json(&report)?.into())
}

fn profile(a: &ProfileArgs) -> Result<Output> {
    if !(a.rmin > 0.0 && a.rmin <= a.rmax && a.rmax < 1.0) || a.steps < 2 {
        bail!("need 0 < rmin <= rmax < 1 and at least 2 steps");
    }
    let grid = verify::log_grid(a.rmin, a.rmax, a.steps);
    let routes = grid
        .iter()
        .map(|&r| dilatation_profile_routes(r))
        .collect::<ferrand::Result<Vec<_>>>()?;
    let text = match a.format {
        TableFormat::Json => format::json(&routes)?,
        TableFormat::Csv => {
            let rows: Vec<Vec<String>> = routes
                .iter()
                .map(|p| {
                    vec![
                        num(p.r),
                        num(p.tau_form),
                        num(p.psi_form),
                        num(p.limit_form),
                    ]
                })
                .collect();
            format::csv(&["r", "value", "psi_form", "limit_form"], &rows)?
        }
    };
    Ok(text.into())
}

fn run_verify(a: &VerifyArgs) -> Result<Output> {
    let checks = verify::run_all();
    let ok = checks.iter().all(|c| c.passed);
    let text = if a.json {
        format::json(&checks)?
    } else {
        let mut s = String::new();
        for c in &checks {
            let mark = if c.passed { "PASS" } else { "FAIL" };
            s += &format!("{mark} {:<10} {}", c.suite, c.name);
            if !c.detail.is_empty() {
                s += &format!(" ({})", c.detail);
            }
            s += "\n";
        }
        let passed = checks.iter().filter(|c| c.passed).count();
        s + &format!("{passed} of {} checks passed\n", checks.len())
    };
    Ok(Output { text, ok })
}

fn emit(text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cap(a) => cap(a),
        Command::Dist(a) => dist(a),
        Command::Lam(a) => lam(a),
        Command::Ball(a) => ball(a),
        Command::Oracle(a) => oracle(a),
        Command::Dilat(a) => dilat(a),
        Command::Profile(a) => profile(a),
        Command::Verify(a) => run_verify(a),
    };
    match result.and_then(|out| emit(&out.text, cli.output.as_deref()).map(|_| out.ok)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

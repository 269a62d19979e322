//! Python bindings. Structured results come back as JSON strings so that
//! Python sees the same schema as the command line.

use ferrand::condenser::{solve_capacity, CondenserSpec};
use ferrand::isometry::{dilatation_bound_profile, dilatation_profile_routes};
use ferrand::lambda::{lambda_ball, lambda_punctured, punctured_sandwich};
use ferrand::{BoundedValue, CapacityEvaluator, PuncturedPair};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: ferrand::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn planar() -> CapacityEvaluator {
    CapacityEvaluator::planar()
}

fn triple(v: BoundedValue) -> (f64, f64, bool) {
    (v.lower, v.upper, v.exact)
}

/// Grötzsch capacity gamma_2(t), t > 1.
#[pyfunction]
fn gamma(t: f64) -> PyResult<f64> {
    ferrand::gamma(t).map_err(py_err)
}

/// Teichmüller capacity tau_2(s), s > 0.
#[pyfunction]
fn tau(s: f64) -> PyResult<f64> {
    ferrand::tau(s).map_err(py_err)
}

#[pyfunction]
fn gamma_inv(y: f64) -> PyResult<f64> {
    ferrand::gamma_inv(y).map_err(py_err)
}

#[pyfunction]
fn tau_inv(y: f64) -> PyResult<f64> {
    ferrand::tau_inv(y).map_err(py_err)
}

/// Grötzsch ring modulus mu(r), 0 < r < 1.
#[pyfunction]
fn mu(r: f64) -> PyResult<f64> {
    ferrand::mu(r).map_err(py_err)
}

#[pyfunction]
fn phi(k: f64, r: f64) -> PyResult<f64> {
    planar().phi(k, r).map_err(py_err)
}

#[pyfunction]
fn psi(k: f64, r: f64) -> PyResult<f64> {
    planar().psi(k, r).map_err(py_err)
}

/// lambda of the punctured plane as (lower, upper, exact).
#[pyfunction]
#[pyo3(signature = (x, y, sandwich = false))]
fn lambda_punctured_plane(x: [f64; 2], y: [f64; 2], sandwich: bool) -> PyResult<(f64, f64, bool)> {
    let pair = PuncturedPair::new(&x, &y).map_err(py_err)?;
    let v = if sandwich {
        punctured_sandwich(&planar(), &pair)
    } else {
        lambda_punctured(&planar(), &pair)
    };
    v.map(triple).map_err(py_err)
}

/// lambda of the unit disk as (lower, upper, exact).
#[pyfunction]
fn lambda_disk(x: [f64; 2], y: [f64; 2]) -> PyResult<(f64, f64, bool)> {
    lambda_ball(&planar(), &x, &y).map(triple).map_err(py_err)
}

#[pyfunction]
fn profile(r: f64) -> PyResult<f64> {
    dilatation_bound_profile(r).map_err(py_err)
}

/// (tau_form, psi_form, limit_form) of the dilatation bound profile.
#[pyfunction]
fn profile_routes(r: f64) -> PyResult<(f64, f64, f64)> {
    let p = dilatation_profile_routes(r).map_err(py_err)?;
    Ok((p.tau_form, p.psi_form, p.limit_form))
}

/// Solve a TOML condenser spec; returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (spec, h = None))]
fn oracle(py: Python<'_>, spec: &str, h: Option<f64>) -> PyResult<String> {
    let spec = CondenserSpec::from_toml(spec).map_err(py_err)?;
    let report = py.detach(|| solve_capacity(&spec, h)).map_err(py_err)?;
    serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
pub fn pyferrand(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(tau, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_inv, m)?)?;
    m.add_function(wrap_pyfunction!(tau_inv, m)?)?;
    m.add_function(wrap_pyfunction!(mu, m)?)?;
    m.add_function(wrap_pyfunction!(phi, m)?)?;
    m.add_function(wrap_pyfunction!(psi, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_punctured_plane, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_disk, m)?)?;
    m.add_function(wrap_pyfunction!(profile, m)?)?;
    m.add_function(wrap_pyfunction!(profile_routes, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    Ok(())
}

use pyo3::prelude::*;
use pyo3::wrap_pymodule;

fn with_module<F>(f: F)
where
    F: for<'py> FnOnce(&Bound<'py, PyModule>) -> PyResult<()>,
{
    Python::initialize();
    Python::attach(|py| {
        let m = wrap_pymodule!(pyferrand::pyferrand)(py);
        f(m.bind(py)).unwrap();
    });
}

#[test]
fn scalar_functions() {
    with_module(|m| {
        let t: f64 = m.getattr("tau")?.call1((1.0,))?.extract()?;
        assert!((t - 2.0).abs() < 1e-14);
        let p: f64 = m.getattr("phi")?.call1((2.0, 0.25))?.extract()?;
        assert!((p - 0.8).abs() < 1e-14);
        Ok(())
    });
}

#[test]
fn lambda_triples() {
    with_module(|m| {
        let (lo, hi, exact): (f64, f64, bool) = m
            .getattr("lambda_punctured_plane")?
            .call1(([1.0, 0.0], [2.0, 0.0]))?
            .extract()?;
        assert!(exact && lo == hi && (lo - 2.0).abs() < 1e-14);
        Ok(())
    });
}

#[test]
fn domain_errors_raise_value_error() {
    with_module(|m| {
        let err = m.getattr("tau")?.call1((-1.0,)).unwrap_err();
        Python::attach(|py| assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py)));
        Ok(())
    });
}

//! Python bindings. Reports come back as plain dicts and lists.

use std::path::PathBuf;

use cascade_lab::euler_axisym::{self, AxisymConfig, AxisymProfile, Distortion, Vertical};
use cascade_lab::experiment::{self, ExperimentReport};
use cascade_lab::ode_cascade::{self, CascadeParams, CoeffSpec};
use cascade_lab::profiles::{self, BumpProfile};
use cascade_lab::singular_integrals::{self, SmoothFunction};
use cascade_lab::Error;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde::Serialize;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Precondition(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_pyobject(py)?.into_any(),
            (None, Some(f)) => f.into_pyobject(py)?.into_any(),
            _ => py.None().into_bound(py),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(m) => {
            let d = PyDict::new(py);
            for (k, x) in m {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn report<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// A compactly supported profile with exact derivatives.
#[pyclass(name = "Profile", frozen)]
struct PyProfile {
    inner: BumpProfile,
}

#[pymethods]
impl PyProfile {
    /// The bump `ρ` of half-width parameter `r`.
    #[staticmethod]
    fn bump(r: f64) -> PyResult<Self> {
        Ok(PyProfile { inner: profiles::build_bump(r).map_err(py_err)? })
    }

    /// The odd profile `φ` built from the bump of parameter `r`.
    #[staticmethod]
    fn phi(r: f64) -> PyResult<Self> {
        let rho = profiles::build_bump(r).map_err(py_err)?;
        Ok(PyProfile { inner: profiles::build_phi(&rho).map_err(py_err)? })
    }

    /// The radial profile of the axisymmetric data.
    #[staticmethod]
    fn phi3d(d: f64) -> PyResult<Self> {
        Ok(PyProfile { inner: profiles::build_phi3d(d).map_err(py_err)? })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    #[pyo3(signature = (x, order = 0))]
    fn __call__(&self, x: f64, order: usize) -> f64 {
        self.inner.derivative(x, order)
    }

    fn support(&self) -> Vec<(f64, f64)> {
        self.inner.support()
    }

    /// Certificate residuals by name.
    fn certificates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for c in &self.inner.certificates {
            d.set_item(&c.name, c.residual)?;
        }
        Ok(d)
    }

    /// Principal-value Hilbert transform at `x`.
    #[pyo3(signature = (x, tol = 1e-13))]
    fn hilbert(&self, x: f64, tol: f64) -> f64 {
        singular_integrals::hilbert_pv(&self.inner, x, tol).value
    }

    fn __repr__(&self) -> String {
        format!("Profile({:?})", self.inner.name)
    }
}

/// Integrates the height cascade on `samples` equally spaced times in `[t_min, 0]`.
#[pyfunction]
#[pyo3(signature = (ratio, levels, t_min, coefficients = None, tol = 1e-12, samples = 201))]
fn integrate_cascade<'py>(
    py: Python<'py>,
    ratio: f64,
    levels: usize,
    t_min: f64,
    coefficients: Option<(f64, f64, u64)>,
    tol: f64,
    samples: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let coeffs = match coefficients {
        None => CoeffSpec::ones(),
        Some((lo, hi, seed)) => CoeffSpec::Random { lo, hi, seed, depth: 2, shared: false },
    };
    let mut p = CascadeParams::new(ratio, levels, t_min, coeffs);
    p.tol = tol;
    if samples >= 2 {
        p.times = Some((0..samples).map(|i| t_min * (1.0 - i as f64 / (samples - 1) as f64)).collect());
    }
    let traj = py.detach(|| ode_cascade::integrate_cascade(&p)).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("times", traj.times)?;
    d.set_item("x", traj.x)?;
    Ok(d.into_any())
}

/// Heights `x_k(t)` of the constant-coefficient cascade in closed form.
#[pyfunction]
fn closed_form_cascade(ratio: f64, levels: usize, times: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
    Ok(ode_cascade::closed_form_cascade(ratio, levels, &times).map_err(py_err)?.x)
}

/// Fixed point `a` of the integral bound.
#[pyfunction]
fn fixed_point_a(ratio: f64, b: f64) -> PyResult<f64> {
    ode_cascade::fixed_point_a(ratio, b).map_err(py_err)
}

/// Interaction constants for bump parameter `r`, radius `eps` and ratio `A`.
#[pyfunction]
fn interaction_constants<'py>(py: Python<'py>, r: f64, eps: f64, ratio: f64) -> PyResult<Bound<'py, PyAny>> {
    let phi = profiles::build_phi(&profiles::build_bump(r).map_err(py_err)?).map_err(py_err)?;
    let norms = profiles::phi_norms(&phi).map_err(py_err)?;
    let c = singular_integrals::interaction_constants(r, eps, ratio, norms).map_err(py_err)?;
    let d = report(py, &c)?;
    d.set_item("bootstrap_window", c.bootstrap_window().map_err(py_err)?)?;
    Ok(d)
}

/// Stretching rate of `φ(r)|z|^{1/12} sgn z` scaled by `amplitude`.
#[pyfunction]
#[pyo3(signature = (d, amplitude = 1.0, tol = 1e-11))]
fn stretching_rate(d: f64, amplitude: f64, tol: f64) -> PyResult<f64> {
    let mut w = AxisymProfile::separable(profiles::build_phi3d(d).map_err(py_err)?, Vertical::Power);
    w.amplitude = amplitude;
    Ok(euler_axisym::stretching_rate_of(&w, tol).map_err(py_err)?.value)
}

/// The HW-1 integral for a diagonally distorted profile.
#[pyfunction]
#[pyo3(signature = (d, z, k, lambda_r = 1.0, lambda_z = 1.0, tol = 1e-10))]
fn hw1_integral<'py>(
    py: Python<'py>,
    d: f64,
    z: f64,
    k: f64,
    lambda_r: f64,
    lambda_z: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let vertical = profiles::kink_profile(&profiles::build_rho_z(z).map_err(py_err)?).map_err(py_err)?;
    let w = AxisymProfile {
        distortion: Distortion::Diagonal { lambda_r, lambda_z },
        ..AxisymProfile::separable(profiles::build_phi3d(d).map_err(py_err)?, Vertical::Profile { profile: vertical })
    };
    let rep = py.detach(|| euler_axisym::hw1_integral(&w, k, d, z, tol)).map_err(py_err)?;
    report(py, &rep)
}

/// Closing-inequality report at `(d, Z)` and `A = 1 + delta`.
#[pyfunction]
fn closure_check<'py>(py: Python<'py>, d: f64, z: f64, delta: f64) -> PyResult<Bound<'py, PyAny>> {
    let cfg = AxisymConfig { d, z, ..Default::default() };
    let rep = py.detach(|| euler_axisym::closure_check(&cfg, delta)).map_err(py_err)?;
    report(py, &rep)
}

/// Names accepted by [`run_preset`].
#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    experiment::preset_names()
}

/// Runs a preset experiment, writes its artifacts and returns the report.
#[pyfunction]
#[pyo3(signature = (name, out = None, seed = None))]
fn run_preset<'py>(py: Python<'py>, name: &str, out: Option<PathBuf>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = experiment::preset(name).map_err(py_err)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let dir = experiment::resolve_out_dir(&cfg, out.as_deref());
    let rep: ExperimentReport = py.detach(|| experiment::run(&cfg, &dir, 1)).map_err(py_err)?;
    report(py, &rep)
}

#[pymodule]
fn cascade_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProfile>()?;
    m.add_function(wrap_pyfunction!(integrate_cascade, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_cascade, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point_a, m)?)?;
    m.add_function(wrap_pyfunction!(interaction_constants, m)?)?;
    m.add_function(wrap_pyfunction!(stretching_rate, m)?)?;
    m.add_function(wrap_pyfunction!(hw1_integral, m)?)?;
    m.add_function(wrap_pyfunction!(closure_check, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_preset, m)?)?;
    Ok(())
}

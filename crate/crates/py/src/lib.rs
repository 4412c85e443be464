//! Python bindings for the teichlab core library.
//!
//! Points, annuli and flat tori are exposed as small immutable classes;
//! distances come back as `MetricEstimate` objects carrying the value, its
//! guarantee tag and the witnessing curve or case.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use teichlab_core::annulus;
use teichlab_core::experiments::{self, Experiment};
use teichlab_core::holonomy;
use teichlab_core::hypkernel;
use teichlab_core::metrics::{self, SupSearch};
use teichlab_core::topology::{self, CurveClass};

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn curves(slopes: &[String]) -> PyResult<Vec<CurveClass>> {
    slopes.iter().map(|s| s.parse().map_err(py_err)).collect()
}

#[pyclass(name = "MetricEstimate", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMetricEstimate {
    #[pyo3(get)]
    value: f64,
    #[pyo3(get)]
    guarantee: String,
    #[pyo3(get)]
    witness: String,
    #[pyo3(get)]
    warning: Option<String>,
}

impl From<metrics::MetricEstimate> for PyMetricEstimate {
    fn from(m: metrics::MetricEstimate) -> Self {
        Self {
            value: m.value,
            guarantee: m.guarantee.to_string(),
            witness: m.witness.to_string(),
            warning: m.warning,
        }
    }
}

#[pymethods]
impl PyMetricEstimate {
    fn __repr__(&self) -> String {
        format!(
            "MetricEstimate(value={}, guarantee='{}', witness='{}')",
            self.value, self.guarantee, self.witness
        )
    }
}

/// A point of Teichmüller space of the once-punctured torus in
/// Fenchel–Nielsen coordinates `(length, twist)`.
#[pyclass(name = "FnPoint", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFnPoint {
    inner: holonomy::FnPoint,
}

#[pymethods]
impl PyFnPoint {
    #[new]
    fn new(length: f64, twist: f64) -> PyResult<Self> {
        Ok(Self {
            inner: holonomy::FnPoint::torus(length, twist).map_err(py_err)?,
        })
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.coords()[0].length
    }

    #[getter]
    fn twist(&self) -> f64 {
        self.inner.coords()[0].twist
    }

    /// Geodesic length of the slope `"p/q"`.
    fn curve_length(&self, slope: &str) -> PyResult<f64> {
        let c: CurveClass = slope.parse().map_err(py_err)?;
        holonomy::curve_length(&self.inner, &c).map_err(py_err)
    }

    /// Shortest curve and shortest curve meeting it once, as slope strings.
    fn systolic_basis(&self) -> PyResult<(String, String)> {
        let (u, v) = holonomy::systolic_basis(&self.inner).map_err(py_err)?;
        Ok((u.to_string(), v.to_string()))
    }

    /// Slopes of length at most `eps` among the slopes of box size `cutoff`.
    fn thin_curves(&self, eps: f64, cutoff: u32) -> PyResult<Vec<String>> {
        let cands = topology::enumerate_slopes(cutoff);
        Ok(holonomy::thin_curves(&self.inner, eps, &cands)
            .map_err(py_err)?
            .iter()
            .map(|c| c.to_string())
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("FnPoint({})", self.inner)
    }
}

#[pyclass(name = "AnnulusPoint", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyAnnulusPoint {
    inner: annulus::AnnulusPoint,
}

#[pymethods]
impl PyAnnulusPoint {
    #[new]
    #[pyo3(signature = (twist, core, eps0 = 0.2))]
    fn new(twist: f64, core: f64, eps0: f64) -> PyResult<Self> {
        Ok(Self {
            inner: annulus::AnnulusPoint::new(twist, core, eps0).map_err(py_err)?,
        })
    }

    #[getter]
    fn twist(&self) -> f64 {
        self.inner.twist()
    }

    #[getter]
    fn core(&self) -> f64 {
        self.inner.core()
    }

    /// Length of the crossing arc with winding `n`.
    fn arc_length(&self, n: i64) -> f64 {
        annulus::arc_length(&self.inner, n)
    }

    fn __repr__(&self) -> String {
        format!(
            "AnnulusPoint(twist={}, core={}, eps0={})",
            self.inner.twist(),
            self.inner.core(),
            self.inner.eps0()
        )
    }
}

#[pyclass(name = "FlatTorus", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFlatTorus {
    inner: metrics::FlatTorus,
}

#[pymethods]
impl PyFlatTorus {
    #[new]
    fn new(re: f64, im: f64) -> PyResult<Self> {
        Ok(Self {
            inner: metrics::FlatTorus::new(re, im).map_err(py_err)?,
        })
    }

    fn extremal_length(&self, p: i64, q: i64) -> PyResult<f64> {
        let s = topology::Slope::new(p, q).map_err(py_err)?;
        Ok(self.inner.extremal_length(s))
    }
}

#[pyfunction]
fn enumerate_slopes(n: u32) -> Vec<String> {
    topology::enumerate_slopes(n).iter().map(|c| c.to_string()).collect()
}

#[pyfunction]
fn intersection_number(a: &str, b: &str) -> PyResult<u64> {
    let (a, b): (CurveClass, CurveClass) = (a.parse().map_err(py_err)?, b.parse().map_err(py_err)?);
    topology::intersection_number(&a, &b).map_err(py_err)
}

/// `Λ̂(σ, τ)` over the given slopes.
#[pyfunction]
fn lipschitz_sup(sigma: &PyFnPoint, tau: &PyFnPoint, candidates: Vec<String>) -> PyResult<PyMetricEstimate> {
    metrics::lipschitz_sup(&sigma.inner, &tau.inner, &curves(&candidates)?)
        .map(Into::into)
        .map_err(py_err)
}

/// Symmetrized Lipschitz distance; with no candidates the adaptive family
/// is used.
#[pyfunction]
#[pyo3(signature = (sigma, tau, candidates = None))]
fn dl(sigma: &PyFnPoint, tau: &PyFnPoint, candidates: Option<Vec<String>>) -> PyResult<PyMetricEstimate> {
    match candidates {
        Some(c) => metrics::dl(&sigma.inner, &tau.inner, &curves(&c)?),
        None => metrics::dl_adaptive(&sigma.inner, &tau.inner, &SupSearch::default()).map(|(e, _)| e),
    }
    .map(Into::into)
    .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (r1, r2, cutoff = None))]
fn dla_bruteforce(r1: &PyAnnulusPoint, r2: &PyAnnulusPoint, cutoff: Option<u64>) -> PyResult<PyMetricEstimate> {
    match cutoff {
        Some(n) => annulus::dla_bruteforce(&r1.inner, &r2.inner, n),
        None => annulus::dla_bruteforce_adaptive(&r1.inner, &r2.inner).map(|(e, _)| e),
    }
    .map(Into::into)
    .map_err(py_err)
}

#[pyfunction]
fn dla_estimate(r1: &PyAnnulusPoint, r2: &PyAnnulusPoint) -> PyResult<PyMetricEstimate> {
    annulus::dla_estimate(&r1.inner, &r2.inner)
        .map(Into::into)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (t1, t2, cutoff = 200))]
fn flat_torus_dt(t1: &PyFlatTorus, t2: &PyFlatTorus, cutoff: u32) -> PyMetricEstimate {
    metrics::flat_torus_dt(&t1.inner, &t2.inner, cutoff).into()
}

#[pyfunction]
#[pyo3(signature = (t1, t2, cutoff = 200))]
fn flat_torus_dl(t1: &PyFlatTorus, t2: &PyFlatTorus, cutoff: u32) -> PyMetricEstimate {
    metrics::flat_torus_dl(&t1.inner, &t2.inner, cutoff).into()
}

#[pyfunction]
#[pyo3(signature = (p, q, eps1 = 0.05))]
fn divergent_pair(p: f64, q: f64, eps1: f64) -> PyResult<(PyFnPoint, PyFnPoint)> {
    let (a, b) = metrics::divergent_pair(p, q, eps1).map_err(py_err)?;
    Ok((PyFnPoint { inner: a }, PyFnPoint { inner: b }))
}

#[pyfunction]
fn theorem1_closed_form(p: f64, q: f64) -> f64 {
    metrics::theorem1_closed_form(p, q)
}

#[pyfunction]
fn hexagon_opposite(a: f64, a_prime: f64, w: f64) -> PyResult<f64> {
    hypkernel::hexagon_opposite(a, a_prime, w).map_err(py_err)
}

#[pyfunction]
fn fermi_distance(d1: f64, d2: f64, du: f64) -> f64 {
    hypkernel::fermi_distance(d1, d2, du)
}

/// `(name, description, defaults)` for every experiment.
#[pyfunction]
fn list_experiments() -> Vec<(String, String, String)> {
    experiments::list_experiments()
        .into_iter()
        .map(|e| (e.name.into(), e.description.into(), e.defaults.into()))
        .collect()
}

/// Runs an experiment with `key=value` overrides; returns
/// `(csv, summary, passed)`.
#[pyfunction]
#[pyo3(signature = (name, overrides = Vec::new()))]
fn run_experiment(name: &str, overrides: Vec<String>) -> PyResult<(String, String, bool)> {
    let exp: Experiment = name.parse().map_err(py_err)?;
    let cfg = experiments::ExperimentConfig::default()
        .with_overrides(&overrides)
        .map_err(py_err)?;
    let out = experiments::run(&cfg, exp).map_err(py_err)?;
    Ok((out.csv, out.summary, out.passed))
}

#[pymodule]
fn teichlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMetricEstimate>()?;
    m.add_class::<PyFnPoint>()?;
    m.add_class::<PyAnnulusPoint>()?;
    m.add_class::<PyFlatTorus>()?;
    m.add_function(wrap_pyfunction!(enumerate_slopes, m)?)?;
    m.add_function(wrap_pyfunction!(intersection_number, m)?)?;
    m.add_function(wrap_pyfunction!(lipschitz_sup, m)?)?;
    m.add_function(wrap_pyfunction!(dl, m)?)?;
    m.add_function(wrap_pyfunction!(dla_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(dla_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(flat_torus_dt, m)?)?;
    m.add_function(wrap_pyfunction!(flat_torus_dl, m)?)?;
    m.add_function(wrap_pyfunction!(divergent_pair, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(hexagon_opposite, m)?)?;
    m.add_function(wrap_pyfunction!(fermi_distance, m)?)?;
    m.add_function(wrap_pyfunction!(list_experiments, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}

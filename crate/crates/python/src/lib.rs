//! Python bindings: specs, towers, check reports and the Temperley-Lieb suite.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sflab_core::presentation::{self, AlgebraSpec, ShiftSet};
use sflab_core::report::{Check as CoreCheck, Report as CoreReport};
use sflab_core::tl::{self, TLParams};
use sflab_core::tower::{self, TowerFile, DEFAULT_CAPACITY};
use sflab_core::weyl;
use sflab_core::Error;

create_exception!(sflab, CapacityError, PyRuntimeError);
create_exception!(sflab, StructureError, PyRuntimeError);

fn to_py(err: Error) -> PyErr {
    match err {
        Error::CapacityExceeded { .. } => CapacityError::new_err(err.to_string()),
        Error::Spec(ref s) if s.is_capacity() => CapacityError::new_err(err.to_string()),
        Error::StructureMismatch { .. } | Error::NonConvergence(_) => StructureError::new_err(err.to_string()),
        _ => PyValueError::new_err(err.to_string()),
    }
}

#[pyclass(frozen, get_all, skip_from_py_object, module = "sflab")]
#[derive(Clone)]
pub struct Check {
    name: String,
    anchor: String,
    status: String,
    residual: f64,
    detail: String,
}

impl From<CoreCheck> for Check {
    fn from(c: CoreCheck) -> Self {
        Check {
            name: c.name,
            anchor: c.anchor,
            status: c.status.as_str().to_string(),
            residual: c.residual,
            detail: c.detail,
        }
    }
}

#[pymethods]
impl Check {
    fn passed(&self) -> bool {
        self.status == "pass"
    }

    fn __repr__(&self) -> String {
        format!("Check({:?}, status={:?}, residual={:e})", self.name, self.status, self.residual)
    }
}

#[pyclass(frozen, module = "sflab")]
pub struct Report {
    inner: CoreReport,
}

#[pymethods]
impl Report {
    #[getter]
    fn checks(&self) -> Vec<Check> {
        self.inner.checks.iter().cloned().map(Check::from).collect()
    }

    /// `"pass"`, `"fail"` or `"inconclusive"`.
    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status().as_str()
    }

    fn all_pass(&self) -> bool {
        self.inner.all_pass()
    }

    fn failures(&self) -> Vec<Check> {
        self.inner.failures().cloned().map(Check::from).collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __len__(&self) -> usize {
        self.inner.checks.len()
    }

    fn __repr__(&self) -> String {
        format!("Report({} checks, status={})", self.inner.checks.len(), self.status())
    }
}

fn report(inner: CoreReport) -> Report {
    Report { inner }
}

/// Summands `(a, b, c)` with `Σ a·b/c = 1`.
#[pyclass(frozen, skip_from_py_object, module = "sflab")]
#[derive(Clone)]
pub struct Spec {
    inner: AlgebraSpec,
}

#[pymethods]
impl Spec {
    #[new]
    fn new(summands: Vec<(u64, u64, u64)>) -> Self {
        Spec {
            inner: AlgebraSpec::new(summands),
        }
    }

    #[staticmethod]
    fn cs1() -> Self {
        Spec { inner: AlgebraSpec::cs1() }
    }

    #[staticmethod]
    fn cs2() -> Self {
        Spec { inner: AlgebraSpec::cs2() }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inner = presentation::parse_spec_str(text).map_err(|e| to_py(e.into()))?;
        Ok(Spec { inner })
    }

    fn to_json(&self) -> String {
        self.inner.canonical_json()
    }

    /// `(d, multiplicities)`; raises `ValueError` listing every violation.
    fn dims(&self) -> PyResult<(usize, Vec<usize>)> {
        let dims = presentation::validate_spec(&self.inner).map_err(|e| to_py(e.into()))?;
        Ok((dims.d, dims.mult))
    }

    fn is_valid(&self) -> bool {
        presentation::validate_spec(&self.inner).is_ok()
    }

    fn base_relations(&self) -> PyResult<Report> {
        let dims = presentation::validate_spec(&self.inner).map_err(|e| to_py(e.into()))?;
        Ok(report(weyl::check_base_relations(&weyl::build_base(&dims))))
    }

    fn __repr__(&self) -> String {
        format!("Spec({})", self.inner.canonical_json())
    }
}

#[pyclass(frozen, module = "sflab")]
pub struct Tower {
    inner: tower::Tower,
}

#[pymethods]
impl Tower {
    #[new]
    #[pyo3(signature = (spec, depth, capacity = None))]
    fn new(spec: &Spec, depth: usize, capacity: Option<u128>) -> PyResult<Self> {
        let inner = tower::build_tower_with_capacity(&spec.inner, depth, capacity.unwrap_or(DEFAULT_CAPACITY)).map_err(to_py)?;
        Ok(Tower { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (text, capacity = None))]
    fn from_json(text: &str, capacity: Option<u128>) -> PyResult<Self> {
        let file = TowerFile::from_json(text).map_err(to_py)?;
        let inner = file.to_tower(capacity.unwrap_or(DEFAULT_CAPACITY)).map_err(to_py)?;
        Ok(Tower { inner })
    }

    fn to_json(&self) -> String {
        self.inner.to_file().to_json()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    #[getter]
    fn ambient_dim(&self) -> usize {
        self.inner.ambient_dim()
    }

    fn relations(&self) -> Report {
        report(tower::check_relations(&self.inner))
    }

    fn covariance(&self) -> Report {
        report(tower::check_covariance(&self.inner))
    }

    fn tensor_copies(&self, k: usize) -> PyResult<Report> {
        tower::check_tensor_copies(&self.inner, k).map(report).map_err(to_py)
    }

    fn word_span(&self, k: usize) -> PyResult<Report> {
        tower::check_word_span(&self.inner, k).map(report).map_err(to_py)
    }

    #[pyo3(signature = (k, samples = 200, seed = 0x5EED))]
    fn trace_collapse(&self, k: usize, samples: usize, seed: u64) -> PyResult<Report> {
        tl::trace_collapse_check(&self.inner, k, samples, seed).map(report).map_err(to_py)
    }

    /// Offsets `t` with `r_{1+t} r_1 = γ r_1 r_{1+t}`.
    fn r_stream(&self) -> Vec<usize> {
        tower::tower_r_stream(&self.inner).0
    }

    fn __repr__(&self) -> String {
        format!("Tower(depth={}, d={}, ambient_dim={})", self.depth(), self.d(), self.ambient_dim())
    }
}

fn params(lam: &str) -> PyResult<TLParams> {
    lam.parse().map_err(to_py)
}

/// Relations, Markov trace and (for `m = 4`) the κ expectation; returns `(report, kappa)`.
#[pyfunction]
#[pyo3(signature = (lam, m = 3, samples = 16, seed = 0x5EED))]
fn tl_report(lam: &str, m: usize, samples: usize, seed: u64) -> PyResult<(Report, Option<f64>)> {
    let (rep, kappa) = tl::tl_report(params(lam)?, m, samples, seed).map_err(to_py)?;
    Ok((report(rep), kappa.map(|k| k.kappa)))
}

/// κ for `λ = p/q`; raises `StructureError` when the expectation has the wrong form.
#[pyfunction]
fn kappa(lam: &str) -> PyResult<f64> {
    tl::kappa_compute(params(lam)?, sflab_core::DEFAULT_TOL).map(|k| k.kappa).map_err(to_py)
}

/// Markov weights of the three-coordinate model.
#[pyfunction]
fn markov_weights(lam: &str) -> PyResult<Vec<f64>> {
    Ok(tl::markov_weights_m3(params(lam)?.lambda()).weights)
}

#[pyfunction]
fn shift_set_member(set: &str, t: u64) -> PyResult<bool> {
    let set = match set {
        "S1" | "s1" => ShiftSet::S1,
        "S2" | "s2" => ShiftSet::S2,
        "S3" | "s3" => ShiftSet::S3,
        other => return Err(PyValueError::new_err(format!("unknown shift set {other:?}; use S1, S2 or S3"))),
    };
    Ok(presentation::shift_set_member(set, t))
}

#[pyfunction]
fn stream_prefix(len: usize) -> Vec<u32> {
    presentation::stream_prefix(len).into_iter().map(u32::from).collect()
}

#[pymodule]
fn sflab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Check>()?;
    m.add_class::<Report>()?;
    m.add_class::<Spec>()?;
    m.add_class::<Tower>()?;
    m.add_function(wrap_pyfunction!(tl_report, m)?)?;
    m.add_function(wrap_pyfunction!(kappa, m)?)?;
    m.add_function(wrap_pyfunction!(markov_weights, m)?)?;
    m.add_function(wrap_pyfunction!(shift_set_member, m)?)?;
    m.add_function(wrap_pyfunction!(stream_prefix, m)?)?;
    m.add("CapacityError", m.py().get_type::<CapacityError>())?;
    m.add("StructureError", m.py().get_type::<StructureError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_conversion_keeps_fields() {
        let c: Check = CoreCheck::exact("x", "x = x", false, "why").into();
        assert_eq!((c.status.as_str(), c.residual, c.detail.as_str()), ("fail", 1.0, "why"));
        assert!(!c.passed());
    }

    #[test]
    fn report_wrapper() {
        let r = report(tower::check_relations(&tower::build_tower(&AlgebraSpec::cs1(), 2).unwrap()));
        assert_eq!(r.status(), r.inner.status().as_str());
        assert_eq!(r.__len__(), r.checks().len());
    }
}

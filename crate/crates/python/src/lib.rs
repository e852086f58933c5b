//! Python bindings: kets, bases, observables and density operators, the
//! weak-value functions and the verification harness.

use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use contextual_wv::contextual::{self, DensityOperator, HermitianObservable};
use contextual_wv::harness::{self, ReportFormat};
use contextual_wv::hilbert::{random_basis, random_pure_state};
use contextual_wv::steering::{self, BipartiteState};
use contextual_wv::{Error, Ket, MeasurementBasis, SquareMatrix};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn matrix_from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<SquareMatrix> {
    SquareMatrix::from_rows(&rows).map_err(to_py)
}

fn matrix_rows(m: &SquareMatrix) -> Vec<Vec<Complex64>> {
    m.rows().map(<[Complex64]>::to_vec).collect()
}

#[pyclass(name = "Ket", module = "pycwv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyKet {
    inner: Ket,
}

#[pymethods]
impl PyKet {
    /// Amplitudes must be normalized unless `normalize` is true.
    #[new]
    #[pyo3(signature = (amps, normalize = false))]
    fn new(amps: Vec<Complex64>, normalize: bool) -> PyResult<Self> {
        let inner = if normalize { Ket::normalized(amps) } else { Ket::new(amps) };
        Ok(PyKet { inner: inner.map_err(to_py)? })
    }

    #[staticmethod]
    fn basis_state(dim: usize, index: usize) -> PyResult<Self> {
        Ok(PyKet { inner: Ket::basis_state(dim, index).map_err(to_py)? })
    }

    #[staticmethod]
    fn random(dim: usize, seed: u64) -> PyResult<Self> {
        Ok(PyKet { inner: random_pure_state(dim, seed).map_err(to_py)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn amps(&self) -> Vec<Complex64> {
        self.inner.amps().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("Ket({:?})", self.inner.amps())
    }
}

#[pyclass(name = "Basis", module = "pycwv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBasis {
    inner: MeasurementBasis,
}

#[pymethods]
impl PyBasis {
    #[new]
    fn new(kets: Vec<PyRef<'_, PyKet>>) -> PyResult<Self> {
        let kets = kets.iter().map(|k| k.inner.clone()).collect();
        Ok(PyBasis { inner: MeasurementBasis::new(kets).map_err(to_py)? })
    }

    #[staticmethod]
    fn computational(dim: usize) -> PyResult<Self> {
        Ok(PyBasis { inner: MeasurementBasis::computational(dim).map_err(to_py)? })
    }

    #[staticmethod]
    fn fourier(dim: usize) -> PyResult<Self> {
        Ok(PyBasis { inner: MeasurementBasis::fourier(dim).map_err(to_py)? })
    }

    #[staticmethod]
    fn diagonal() -> Self {
        PyBasis { inner: MeasurementBasis::diagonal() }
    }

    #[staticmethod]
    fn circular() -> Self {
        PyBasis { inner: MeasurementBasis::circular() }
    }

    #[staticmethod]
    fn random(dim: usize, seed: u64) -> PyResult<Self> {
        Ok(PyBasis { inner: random_basis(dim, seed).map_err(to_py)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn kets(&self) -> Vec<PyKet> {
        self.inner.iter().map(|k| PyKet { inner: k.clone() }).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }
}

#[pyclass(name = "Observable", module = "pycwv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyObservable {
    inner: HermitianObservable,
}

#[pymethods]
impl PyObservable {
    /// Row-major Hermitian matrix.
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(PyObservable { inner: HermitianObservable::new(matrix_from_rows(rows)?).map_err(to_py)? })
    }

    #[staticmethod]
    fn pauli_x() -> Self {
        PyObservable { inner: HermitianObservable::pauli_x() }
    }

    #[staticmethod]
    fn pauli_y() -> Self {
        PyObservable { inner: HermitianObservable::pauli_y() }
    }

    #[staticmethod]
    fn pauli_z() -> Self {
        PyObservable { inner: HermitianObservable::pauli_z() }
    }

    #[staticmethod]
    fn diagonal(values: Vec<f64>) -> PyResult<Self> {
        Ok(PyObservable { inner: HermitianObservable::diagonal(&values).map_err(to_py)? })
    }

    #[staticmethod]
    fn random(dim: usize, seed: u64) -> PyResult<Self> {
        Ok(PyObservable { inner: HermitianObservable::random(dim, seed).map_err(to_py)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_rows(self.inner.matrix())
    }

    /// Eigenvalues in descending order with their eigenvectors.
    fn eigen(&self) -> (Vec<f64>, PyBasis) {
        let es = self.inner.eigen();
        (es.values, PyBasis { inner: es.vectors })
    }
}

#[pyclass(name = "Density", module = "pycwv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensity {
    inner: DensityOperator,
}

#[pymethods]
impl PyDensity {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(PyDensity { inner: DensityOperator::new(matrix_from_rows(rows)?).map_err(to_py)? })
    }

    #[staticmethod]
    fn pure(psi: &PyKet) -> Self {
        PyDensity { inner: DensityOperator::pure(&psi.inner) }
    }

    #[staticmethod]
    fn maximally_mixed(dim: usize) -> PyResult<Self> {
        Ok(PyDensity { inner: DensityOperator::maximally_mixed(dim).map_err(to_py)? })
    }

    #[staticmethod]
    fn diagonal(weights: Vec<f64>) -> PyResult<Self> {
        Ok(PyDensity { inner: DensityOperator::diagonal(&weights).map_err(to_py)? })
    }

    #[staticmethod]
    fn random(dim: usize, seed: u64) -> PyResult<Self> {
        Ok(PyDensity { inner: DensityOperator::random(dim, seed).map_err(to_py)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        matrix_rows(self.inner.matrix())
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn expectation(&self, a: &PyObservable) -> PyResult<f64> {
        self.inner.expectation(&a.inner).map_err(to_py)
    }
}

#[pyclass(name = "Bipartite", module = "pycwv", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyBipartite {
    inner: BipartiteState,
}

#[pymethods]
impl PyBipartite {
    /// Row-major `dim_s x dim_r` coefficients of a normalized state.
    #[new]
    fn new(dim_s: usize, dim_r: usize, coeffs: Vec<Complex64>) -> PyResult<Self> {
        Ok(PyBipartite { inner: BipartiteState::new(dim_s, dim_r, coeffs).map_err(to_py)? })
    }

    #[staticmethod]
    fn bell() -> Self {
        PyBipartite { inner: BipartiteState::bell() }
    }

    #[staticmethod]
    fn singlet() -> Self {
        PyBipartite { inner: BipartiteState::singlet() }
    }

    #[getter]
    fn dims(&self) -> (usize, usize) {
        (self.inner.dim_s(), self.inner.dim_r())
    }

    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    fn reduced(&self) -> PyDensity {
        PyDensity { inner: self.inner.reduced_system() }
    }
}

#[pyfunction]
fn variance(rho: &PyDensity, a: &PyObservable) -> PyResult<f64> {
    contextual::variance(&rho.inner, &a.inner).map_err(to_py)
}

#[pyfunction]
fn weak_value(psi: &PyKet, m: &PyKet, a: &PyObservable) -> PyResult<Complex64> {
    contextual::weak_value(&psi.inner, &m.inner, &a.inner).map_err(to_py)
}

/// Returns `(variance, weak values)`; improbable outcomes give `None`.
#[pyfunction]
fn contextual_variance(psi: &PyKet, basis: &PyBasis, a: &PyObservable) -> PyResult<(f64, Vec<Option<Complex64>>)> {
    let r = contextual::contextual_variance(&psi.inner, &basis.inner, &a.inner).map_err(to_py)?;
    Ok((r.variance, r.per_outcome.values))
}

#[pyfunction]
fn zero_error_residual(psi: &PyKet, basis: &PyBasis, a: &PyObservable) -> PyResult<f64> {
    contextual::zero_error_residual(&psi.inner, &basis.inner, &a.inner).map_err(to_py)
}

#[pyfunction]
fn mixed_weak_value(rho: &PyDensity, m: &PyKet, a: &PyObservable) -> PyResult<Complex64> {
    contextual::mixed_weak_value(&rho.inner, &m.inner, &a.inner).map_err(to_py)
}

#[pyfunction]
fn residual_error(rho: &PyDensity, m: &PyKet, a: &PyObservable) -> PyResult<f64> {
    contextual::residual_error(&rho.inner, &m.inner, &a.inner).map_err(to_py)
}

#[pyfunction]
fn total_error(rho: &PyDensity, basis: &PyBasis, a: &PyObservable) -> PyResult<f64> {
    contextual::total_error(&rho.inner, &basis.inner, &a.inner).map_err(to_py)
}

#[pyfunction]
fn purify(rho: &PyDensity) -> PyBipartite {
    PyBipartite { inner: steering::purify(&rho.inner) }
}

/// Returns `(estimate, error, branch weak values)` for outcome `m` after
/// steering with reference basis `nu_basis`.
#[pyfunction]
fn decomposition_estimate(
    e: &PyBipartite,
    nu_basis: &PyBasis,
    m: &PyKet,
    a: &PyObservable,
) -> PyResult<(Complex64, f64, Vec<Option<Complex64>>)> {
    let dec = steering::conditional_states(&e.inner, &nu_basis.inner).map_err(to_py)?;
    let est = steering::decomposition_estimate(&dec, &m.inner, &a.inner).map_err(to_py)?;
    Ok((est.estimate, est.error(), est.branch_values.clone()))
}

#[pyfunction]
fn total_variance(e: &PyBipartite, m_basis: &PyBasis, nu_basis: &PyBasis, a: &PyObservable) -> PyResult<f64> {
    let (_, total) =
        steering::total_variance_decomposition(&e.inner, &m_basis.inner, &nu_basis.inner, &a.inner).map_err(to_py)?;
    Ok(total)
}

/// CHSH demo report as JSON.
#[pyfunction]
#[pyo3(signature = (angles = None))]
fn chsh(angles: Option<[f64; 4]>) -> PyResult<String> {
    let report = harness::chsh_demo(angles).map_err(to_py)?;
    Ok(harness::render_report(&report, ReportFormat::Json))
}

#[pyfunction]
fn list_builtins() -> Vec<&'static str> {
    harness::BUILTIN_NAMES.to_vec()
}

/// Runs the identity suite on a built-in name or scenario path and returns
/// the rendered report.
#[pyfunction]
#[pyo3(signature = (scenario, format = "json", tolerance = None))]
fn verify(scenario: &str, format: &str, tolerance: Option<f64>) -> PyResult<String> {
    let format: ReportFormat = format.parse().map_err(PyValueError::new_err)?;
    let s = if harness::BUILTIN_NAMES.contains(&scenario) {
        harness::builtin(scenario)
    } else {
        harness::load_scenario(scenario)
    }
    .map_err(to_py)?;
    let report = harness::run_identity_suite_with_tolerance(&s, tolerance.unwrap_or_else(|| s.tolerance()));
    Ok(harness::render_report(&report, format))
}

#[pymodule]
fn pycwv(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyKet>()?;
    m.add_class::<PyBasis>()?;
    m.add_class::<PyObservable>()?;
    m.add_class::<PyDensity>()?;
    m.add_class::<PyBipartite>()?;
    m.add_function(wrap_pyfunction!(variance, m)?)?;
    m.add_function(wrap_pyfunction!(weak_value, m)?)?;
    m.add_function(wrap_pyfunction!(contextual_variance, m)?)?;
    m.add_function(wrap_pyfunction!(zero_error_residual, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_weak_value, m)?)?;
    m.add_function(wrap_pyfunction!(residual_error, m)?)?;
    m.add_function(wrap_pyfunction!(total_error, m)?)?;
    m.add_function(wrap_pyfunction!(purify, m)?)?;
    m.add_function(wrap_pyfunction!(decomposition_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(total_variance, m)?)?;
    m.add_function(wrap_pyfunction!(chsh, m)?)?;
    m.add_function(wrap_pyfunction!(list_builtins, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

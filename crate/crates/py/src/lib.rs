//! Python bindings. Matrices cross the boundary as lists of rows of complex
//! numbers. Maps paired with a density matrix act in its eigenbasis; use
//! `DensityMatrix.to_working` to move a map from the input basis.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyAny;
use qdb_core::balance::{self, CheckOptions, ClassicalChain, PositivityMode};
use qdb_core::cli::{self, Family, GenerateParams, RunFlags};
use qdb_core::generators::{self, Seed};
use qdb_core::superop::{self, KrausChannel};
use qdb_core::{duals, ComplexMatrix, DensityMatrix, Error, ReversingOperation, SuperOperator, Tolerance};

type Rows = Vec<Vec<Complex64>>;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_matrix(rows: Rows) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(err)
}

fn tolerance(tol: Option<f64>) -> PyResult<Tolerance> {
    let mut t = Tolerance::default();
    if let Some(v) = tol {
        t.eq_tol = v;
        t.psd_tol = v;
    }
    t.validate().map_err(err)?;
    Ok(t)
}

fn to_python<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "DensityMatrix", module = "qdb", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDensity(DensityMatrix);

#[pymethods]
impl PyDensity {
    /// Density matrix diagonal in the input basis.
    #[staticmethod]
    #[pyo3(signature = (values, tol=None))]
    fn from_diagonal(values: Vec<f64>, tol: Option<f64>) -> PyResult<Self> {
        DensityMatrix::from_diagonal(&values, &tolerance(tol)?).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (rows, tol=None))]
    fn from_matrix(rows: Rows, tol: Option<f64>) -> PyResult<Self> {
        qdb_core::make_density(&to_matrix(rows)?, &tolerance(tol)?).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    /// Descending spectrum.
    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.0.eigenvalues().to_vec()
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.0.is_degenerate()
    }

    /// Matrix in the input basis.
    fn matrix(&self) -> Rows {
        self.0.user_matrix().rows()
    }

    /// Eigenbasis as columns.
    fn basis(&self) -> Rows {
        self.0.basis().rows()
    }

    /// Rewrites a map given in the input basis in the eigenbasis.
    fn to_working(&self, tau: &PySuperOp) -> PyResult<PySuperOp> {
        tau.0.change_basis(self.0.basis()).map(PySuperOp).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(eigenvalues={:?})", self.0.eigenvalues())
    }
}

#[pyclass(name = "SuperOperator", module = "qdb", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySuperOp(SuperOperator);

#[pymethods]
impl PySuperOp {
    /// From the n²×n² column-stacking matrix.
    #[new]
    fn new(rows: Rows) -> PyResult<Self> {
        let m = to_matrix(rows)?;
        let n = (m.dim() as f64).sqrt().round() as usize;
        SuperOperator::from_matrix(n, m).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_kraus(ops: Vec<Rows>) -> PyResult<Self> {
        let ops = ops.into_iter().map(to_matrix).collect::<PyResult<Vec<_>>>()?;
        let k = KrausChannel::new(ops).map_err(err)?;
        Ok(Self(superop::from_kraus(&k)))
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self(SuperOperator::identity(n))
    }

    #[staticmethod]
    fn transpose_map(n: usize) -> Self {
        Self(SuperOperator::transpose_map(n))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn matrix(&self) -> Rows {
        self.0.matrix().rows()
    }

    fn apply(&self, x: Rows) -> PyResult<Rows> {
        self.0.apply(&to_matrix(x)?).map(|m| m.rows()).map_err(err)
    }

    /// `self ∘ other`.
    fn compose(&self, other: &PySuperOp) -> PyResult<Self> {
        self.0.compose(&other.0).map(Self).map_err(err)
    }

    fn power(&self, k: u32) -> Self {
        Self(self.0.power(k))
    }

    fn distance(&self, other: &PySuperOp) -> f64 {
        self.0.distance(&other.0)
    }

    #[pyo3(signature = (tol=None))]
    fn is_completely_positive<'py>(&self, py: Python<'py>, tol: Option<f64>) -> PyResult<Bound<'py, PyAny>> {
        to_python(py, &superop::is_completely_positive(&self.0, &tolerance(tol)?))
    }

    fn __repr__(&self) -> String {
        format!("SuperOperator(dim={})", self.0.dim())
    }
}

#[pyfunction]
fn hs_adjoint(tau: &PySuperOp) -> PySuperOp {
    PySuperOp(duals::hs_adjoint(&tau.0))
}

#[pyfunction]
fn trace_dual(tau: &PySuperOp) -> PySuperOp {
    PySuperOp(duals::trace_dual(&tau.0))
}

#[pyfunction]
fn rho_dual(tau: &PySuperOp, rho: &PyDensity) -> PyResult<PySuperOp> {
    duals::rho_dual(&tau.0, &rho.0).map(PySuperOp).map_err(err)
}

#[pyfunction]
fn kms_dual(tau: &PySuperOp, rho: &PyDensity) -> PyResult<PySuperOp> {
    duals::kms_dual(&tau.0, &rho.0).map(PySuperOp).map_err(err)
}

#[pyfunction]
fn hat_map(tau: &PySuperOp, rho: &PyDensity) -> PyResult<PySuperOp> {
    duals::hat_map(&tau.0, &rho.0).map(PySuperOp).map_err(err)
}

/// Hilbert–Schmidt norm of `τΔ − Δτ`.
#[pyfunction]
fn modular_commutator(tau: &PySuperOp, rho: &PyDensity) -> PyResult<f64> {
    duals::modular_commutator(&tau.0, &rho.0).map_err(err)
}

/// `A ↦ ρ^{-iz} A ρ^{iz}`.
#[pyfunction]
fn modular_power(rho: &PyDensity, z: Complex64) -> PySuperOp {
    PySuperOp(duals::modular_power(&rho.0, z))
}

fn reversing(theta: Option<Rows>, rho: &DensityMatrix, tol: &Tolerance) -> PyResult<ReversingOperation> {
    match theta {
        None => Ok(ReversingOperation::transpose(rho.dim())),
        Some(u) => duals::make_reversing(&to_matrix(u)?, tol)
            .and_then(|th| th.in_basis(rho.basis(), tol))
            .map_err(err),
    }
}

/// Full balance report as a dict. `theta` is the unitary of the reversing
/// operation in the input basis; the default is the transpose in the
/// eigenbasis.
#[pyfunction]
#[pyo3(signature = (tau, rho, theta=None, tol=None, tfd=false, positivity_only=false))]
fn run_report<'py>(
    py: Python<'py>,
    tau: &PySuperOp,
    rho: &PyDensity,
    theta: Option<Rows>,
    tol: Option<f64>,
    tfd: bool,
    positivity_only: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let tol = tolerance(tol)?;
    let th = reversing(theta, &rho.0, &tol)?;
    let positivity = if positivity_only { PositivityMode::Plain } else { PositivityMode::Complete };
    let report = balance::run_report_with(&tau.0, &rho.0, &th, &tol, CheckOptions { positivity, tfd }).map_err(err)?;
    to_python(py, &report)
}

/// Runs a problem given as JSON text, as the `check` command does.
#[pyfunction]
#[pyo3(signature = (text, tol=None, tfd=false, powers=None))]
fn check_problem<'py>(
    py: Python<'py>,
    text: &str,
    tol: Option<f64>,
    tfd: bool,
    powers: Option<Vec<u32>>,
) -> PyResult<Bound<'py, PyAny>> {
    let problem = cli::parse_problem_str(text).map_err(err)?;
    let flags = RunFlags { tol, tfd, powers, ..RunFlags::default() };
    let outcome = cli::run_checks(&problem, &flags).map_err(err)?;
    to_python(py, &outcome)
}

/// Problem file text for a generator family.
#[pyfunction]
#[pyo3(signature = (family, n=3, seed=0, p=0.75, s=0.2, k=2, min_eig=0.05))]
fn generate(family: &str, n: usize, seed: u64, p: f64, s: f64, k: usize, min_eig: f64) -> PyResult<String> {
    let family = match family {
        "schur-db2" => Family::SchurDb2,
        "gad-sqdb" => Family::GadSqdb,
        "random-unital" => Family::RandomUnital,
        "metropolis" => Family::Metropolis,
        "cycle" => Family::Cycle,
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    };
    let params = GenerateParams { n, seed, p, s, k, min_eig };
    let value = cli::generate_value(family, &params).map_err(err)?;
    serde_json::to_string_pretty(&value).map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pyfunction]
#[pyo3(signature = (n, seed, min_eig=0.05))]
fn random_density(n: usize, seed: u64, min_eig: f64) -> PyResult<PyDensity> {
    generators::random_density(n, min_eig, Seed(seed)).map(PyDensity).map_err(err)
}

#[pyfunction]
fn schur_db2_channel(rho: &PyDensity, seed: u64) -> PyResult<PySuperOp> {
    generators::schur_db2_channel(&rho.0, Seed(seed)).map(PySuperOp).map_err(err)
}

/// Generalized amplitude damping channel with its invariant state.
#[pyfunction]
fn gad_sqdb_channel(p: f64, s: f64) -> PyResult<(PySuperOp, PyDensity)> {
    generators::gad_sqdb_channel(p, s)
        .map(|(t, r)| (PySuperOp(t), PyDensity(r)))
        .map_err(err)
}

#[pyfunction]
fn random_unital_channel(n: usize, k: usize, seed: u64) -> PyResult<PySuperOp> {
    generators::random_unital_channel(n, k, Seed(seed)).map(PySuperOp).map_err(err)
}

#[pyfunction]
fn symmetrized_sqdb_channel(rho: &PyDensity, seed: u64) -> PyResult<PySuperOp> {
    generators::symmetrized_sqdb_channel(&rho.0, Seed(seed)).map(PySuperOp).map_err(err)
}

/// Pairwise and φ-pairing checks for a Markov chain with stationary `p`.
#[pyfunction]
#[pyo3(signature = (p, gamma, tol=None))]
fn classical_balance<'py>(
    py: Python<'py>,
    p: Vec<f64>,
    gamma: Vec<Vec<f64>>,
    tol: Option<f64>,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let tol = tolerance(tol)?;
    let chain = ClassicalChain::new(p, gamma).map_err(err)?;
    Ok((
        to_python(py, &balance::classical_detailed_balance(&chain, &tol))?,
        to_python(py, &balance::classical_phi_balance(&chain, &tol))?,
    ))
}

#[pymodule]
fn qdb(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensity>()?;
    m.add_class::<PySuperOp>()?;
    m.add("CONVENTION", cli::CONVENTION)?;
    m.add_function(wrap_pyfunction!(hs_adjoint, m)?)?;
    m.add_function(wrap_pyfunction!(trace_dual, m)?)?;
    m.add_function(wrap_pyfunction!(rho_dual, m)?)?;
    m.add_function(wrap_pyfunction!(kms_dual, m)?)?;
    m.add_function(wrap_pyfunction!(hat_map, m)?)?;
    m.add_function(wrap_pyfunction!(modular_commutator, m)?)?;
    m.add_function(wrap_pyfunction!(modular_power, m)?)?;
    m.add_function(wrap_pyfunction!(run_report, m)?)?;
    m.add_function(wrap_pyfunction!(check_problem, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(random_density, m)?)?;
    m.add_function(wrap_pyfunction!(schur_db2_channel, m)?)?;
    m.add_function(wrap_pyfunction!(gad_sqdb_channel, m)?)?;
    m.add_function(wrap_pyfunction!(random_unital_channel, m)?)?;
    m.add_function(wrap_pyfunction!(symmetrized_sqdb_channel, m)?)?;
    m.add_function(wrap_pyfunction!(classical_balance, m)?)?;
    Ok(())
}

//! Python bindings. Matrices cross the boundary as nested lists of `complex`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use kossak_core as core;
use kossak_core::{CMatrix, Error};

pyo3::create_exception!(kossak, InvalidDissipatorError, PyValueError);
pyo3::create_exception!(kossak, NotGklsRepresentableError, PyValueError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidDissipator { .. } | Error::NotHermiticityPreserving { .. } => {
            InvalidDissipatorError::new_err(e.to_string())
        }
        Error::NotGklsRepresentable { .. } => NotGklsRepresentableError::new_err(e.to_string()),
        Error::RankDeficient { .. } | Error::SingularMatrix { .. } | Error::TensorConstruction(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_lists(m: &CMatrix) -> Vec<Vec<Complex64>> {
    m.outer_iter().map(|row| row.to_vec()).collect()
}

fn from_lists(rows: Vec<Vec<Complex64>>) -> PyResult<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err("matrix rows must have equal length"));
    }
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    CMatrix::from_shape_vec((nrows, ncols), flat).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn ordering(name: &str) -> PyResult<core::VecOrdering> {
    name.parse().map_err(py_err)
}

#[pyclass(name = "GeneratorBasis", frozen)]
struct PyGeneratorBasis(core::GeneratorBasis);

#[pymethods]
impl PyGeneratorBasis {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        core::generate_basis(n).map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    /// `[F_0, F_1, ..., F_M]` with `F_0 = I / sqrt(n)`.
    fn matrices(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.0.matrices().iter().map(to_lists).collect()
    }

    fn orthonormality_residual(&self) -> f64 {
        self.0.orthonormality_residual()
    }

    fn __repr__(&self) -> String {
        format!("GeneratorBasis(n={})", self.0.n())
    }
}

#[pyclass(name = "Dissipator", frozen)]
struct PyDissipator(core::Dissipator);

#[pymethods]
impl PyDissipator {
    #[new]
    #[pyo3(signature = (n, matrix, ordering = "row-major"))]
    fn new(n: usize, matrix: Vec<Vec<Complex64>>, ordering: &str) -> PyResult<Self> {
        let ord = self::ordering(ordering)?;
        core::Dissipator::new(n, ord, from_lists(matrix)?).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        core::dissipator_from_json(text).map(Self).map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        core::dissipator_to_json(&self.0).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn ordering(&self) -> &'static str {
        self.0.ordering().name()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        to_lists(self.0.matrix())
    }

    fn apply(&self, x: Vec<Vec<Complex64>>) -> PyResult<Vec<Vec<Complex64>>> {
        core::apply(&self.0, &from_lists(x)?).map(|m| to_lists(&m)).map_err(py_err)
    }

    /// `(trace_residual, hermiticity_residual, passed)`.
    fn validate(&self) -> (f64, f64, bool) {
        let r = core::validate_dissipator(&self.0);
        (r.trace_residual, r.hermiticity_residual, r.passed)
    }

    fn reorder(&self, ordering: &str) -> PyResult<Self> {
        core::reorder(&self.0, self::ordering(ordering)?).map(Self).map_err(py_err)
    }
}

#[pyclass(name = "CpVerdict", frozen, get_all)]
struct PyCpVerdict {
    is_cp: bool,
    min_eigenvalue: f64,
    tolerance_used: f64,
    spectrum: Vec<f64>,
}

#[pyclass(name = "KossakowskiMatrix", frozen)]
struct PyKossakowskiMatrix(core::KossakowskiMatrix);

#[pymethods]
impl PyKossakowskiMatrix {
    #[new]
    fn new(n: usize, matrix: Vec<Vec<Complex64>>) -> PyResult<Self> {
        core::KossakowskiMatrix::new(n, from_lists(matrix)?).map(Self).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn hermiticity_residual(&self) -> f64 {
        self.0.hermiticity_residual()
    }

    fn matrix(&self) -> Vec<Vec<Complex64>> {
        to_lists(self.0.matrix())
    }

    fn spectrum(&self) -> PyResult<Vec<f64>> {
        core::spectrum(&self.0).map(|s| s.to_vec()).map_err(py_err)
    }

    #[pyo3(signature = (tol = None))]
    fn cp_verdict(&self, tol: Option<f64>) -> PyResult<PyCpVerdict> {
        let v = core::cp_verdict(&self.0, tol).map_err(py_err)?;
        Ok(PyCpVerdict {
            is_cp: v.is_cp,
            min_eigenvalue: v.min_eigenvalue,
            tolerance_used: v.tolerance_used,
            spectrum: v.spectrum,
        })
    }

    /// `(rates, operators)` of the diagonal form.
    fn lindblad_form(&self) -> PyResult<(Vec<f64>, Vec<Vec<Vec<Complex64>>>)> {
        let basis = core::generate_basis(self.0.n()).map_err(py_err)?;
        let form = core::lindblad_form(&self.0, &basis).map_err(py_err)?;
        Ok((form.rates, form.operators.iter().map(to_lists).collect()))
    }

    fn restore_cp(&self) -> PyResult<Self> {
        core::restore_cp(&self.0).map(Self).map_err(py_err)
    }

    #[pyo3(signature = (ordering = "row-major"))]
    fn reconstruct(&self, ordering: &str) -> PyResult<PyDissipator> {
        let basis = core::generate_basis(self.0.n()).map_err(py_err)?;
        core::reconstruct_dissipator(&self.0, &basis, self::ordering(ordering)?)
            .map(PyDissipator)
            .map_err(py_err)
    }

    fn distance(&self, other: &PyKossakowskiMatrix) -> f64 {
        core::frobenius_distance(&self.0, &other.0)
    }
}

#[pyfunction]
fn kossakowski_trace(l: &PyDissipator) -> PyResult<PyKossakowskiMatrix> {
    let basis = core::generate_basis(l.0.n()).map_err(py_err)?;
    core::kossakowski_trace(&l.0, &basis).map(PyKossakowskiMatrix).map_err(py_err)
}

#[pyfunction]
fn kossakowski_pinv(l: &PyDissipator) -> PyResult<PyKossakowskiMatrix> {
    let n = l.0.n();
    let basis = core::generate_basis(n).map_err(py_err)?;
    let t = core::build_tensor(&core::structure_constants(&basis).map_err(py_err)?, n).map_err(py_err)?;
    let form = core::coherence_form(&l.0, &basis).map_err(py_err)?;
    core::kossakowski_pinv(&form, &t).map(PyKossakowskiMatrix).map_err(py_err)
}

fn params(gamma1: f64, gamma2: f64, nbar: f64, p: f64, r1: Option<f64>, r2: Option<f64>) -> core::PsbrParams {
    core::PsbrParams::new(gamma1, gamma2, nbar, p).with_pumping(r1, r2)
}

#[pyfunction]
#[pyo3(signature = (gamma1, gamma2, nbar, p, r1 = None, r2 = None))]
fn v_system_dissipator(gamma1: f64, gamma2: f64, nbar: f64, p: f64, r1: Option<f64>, r2: Option<f64>) -> PyResult<PyDissipator> {
    core::v_system_dissipator(&params(gamma1, gamma2, nbar, p, r1, r2))
        .map(PyDissipator)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (gamma1, gamma2, nbar, p, r1 = None, r2 = None))]
fn lambda_system_dissipator(gamma1: f64, gamma2: f64, nbar: f64, p: f64, r1: Option<f64>, r2: Option<f64>) -> PyResult<PyDissipator> {
    core::lambda_system_dissipator(&params(gamma1, gamma2, nbar, p, r1, r2))
        .map(PyDissipator)
        .map_err(py_err)
}

#[pyfunction]
fn compare_spectra(a: &PyKossakowskiMatrix, b: &PyKossakowskiMatrix) -> PyResult<f64> {
    core::compare_spectra(&a.0, &b.0).map_err(py_err)
}

/// Descending singular values of the square coherence-to-Kossakowski tensor.
#[pyfunction]
fn tensor_singular_values(n: usize) -> PyResult<Vec<f64>> {
    let basis = core::generate_basis(n).map_err(py_err)?;
    let t = core::build_tensor(&core::structure_constants(&basis).map_err(py_err)?, n).map_err(py_err)?;
    Ok(t.square_singular_values().to_vec())
}

/// `(passed, table)`.
#[pyfunction]
fn selftest(py: Python<'_>) -> (bool, String) {
    let report = py.detach(|| core::run_selftest(&core::ModelSet::default()));
    (report.passed(), report.to_string())
}

#[pymodule]
fn kossak(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGeneratorBasis>()?;
    m.add_class::<PyDissipator>()?;
    m.add_class::<PyKossakowskiMatrix>()?;
    m.add_class::<PyCpVerdict>()?;
    m.add("InvalidDissipatorError", m.py().get_type::<InvalidDissipatorError>())?;
    m.add("NotGklsRepresentableError", m.py().get_type::<NotGklsRepresentableError>())?;
    m.add_function(wrap_pyfunction!(kossakowski_trace, m)?)?;
    m.add_function(wrap_pyfunction!(kossakowski_pinv, m)?)?;
    m.add_function(wrap_pyfunction!(v_system_dissipator, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_system_dissipator, m)?)?;
    m.add_function(wrap_pyfunction!(compare_spectra, m)?)?;
    m.add_function(wrap_pyfunction!(tensor_singular_values, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}

//! Python bindings: `import pylindblad`.
//!
//! Operators cross the boundary as complex128 numpy arrays. Reports are
//! returned as plain dicts with the same layout as the CLI's JSON output.

use lindblad_certify::closure::{self, GeneratorSet};
use lindblad_certify::error::Error;
use lindblad_certify::liouvillian::Lindbladian;
use lindblad_certify::modelspec::{self, ModelSpec, Params};
use lindblad_certify::ness::{self, NessOptions};
use lindblad_certify::opalg::{c64, Operator};
use lindblad_certify::report;
use numpy::ndarray::Array2;
use numpy::{Complex64, IntoPyArray, PyArray2, PyReadonlyArray2};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn py_err(e: Error) -> PyErr {
    if e.is_numerical() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_numpy<'py>(py: Python<'py>, op: &Operator) -> Bound<'py, PyArray2<Complex64>> {
    let d = op.dim();
    Array2::from_shape_fn((d, d), |(i, j)| {
        let z = op.get(i, j);
        Complex64::new(z.re, z.im)
    })
    .into_pyarray(py)
}

fn from_numpy(a: PyReadonlyArray2<'_, Complex64>) -> PyResult<Operator> {
    let a = a.as_array();
    let (r, c) = a.dim();
    if r != c {
        return Err(PyValueError::new_err(format!("operator must be square, got {r}x{c}")));
    }
    Ok(Operator::from_fn(r, |i, j| c64::new(a[(i, j)].re, a[(i, j)].im)))
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

/// A model: Hamiltonian, jump operators and declared symmetries.
#[pyclass(module = "pylindblad", frozen)]
struct Model {
    spec: ModelSpec,
}

impl Model {
    fn lindbladian(&self) -> PyResult<Lindbladian> {
        Lindbladian::from_spec(&self.spec).map_err(py_err)
    }
}

#[pymethods]
impl Model {
    /// Builds a named builtin; keyword arguments are its parameters.
    #[staticmethod]
    #[pyo3(signature = (name, **params))]
    fn builtin(name: &str, params: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = Params::new();
        if let Some(params) = params {
            for (k, v) in params.iter() {
                p.set(&k.extract::<String>()?, v.str()?.to_string());
            }
        }
        let spec = modelspec::build_builtin(name, &p).map_err(py_err)?;
        Ok(Self { spec })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { spec: modelspec::parse_model(text).map_err(py_err)? })
    }

    fn to_json(&self) -> String {
        self.spec.to_json()
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.spec.n_sites
    }

    #[getter]
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.spec.warnings().into_iter().map(String::from).collect()
    }

    fn hamiltonian<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyArray2<Complex64>>> {
        Ok(to_numpy(py, &self.spec.hamiltonian_operator().map_err(py_err)?))
    }

    fn jumps<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyArray2<Complex64>>>> {
        let ops = self.spec.lindblad_operators().map_err(py_err)?;
        Ok(ops.iter().map(|op| to_numpy(py, op)).collect())
    }

    /// `(label, S)` pairs for every declared strong symmetry.
    fn symmetries<'py>(&self, py: Python<'py>) -> PyResult<Vec<(String, Bound<'py, PyArray2<Complex64>>)>> {
        let ops = self.spec.symmetry_operators().map_err(py_err)?;
        Ok(ops.into_iter().map(|(label, s)| (label, to_numpy(py, &s))).collect())
    }

    /// `L(rho)` for a numpy density matrix.
    fn apply<'py>(
        &self,
        py: Python<'py>,
        rho: PyReadonlyArray2<'_, Complex64>,
    ) -> PyResult<Bound<'py, PyArray2<Complex64>>> {
        let out = self.lindbladian()?.apply(&from_numpy(rho)?).map_err(py_err)?;
        Ok(to_numpy(py, &out))
    }

    fn __repr__(&self) -> String {
        let name = self.spec.metadata.get("builtin").map(String::as_str).unwrap_or("custom");
        format!("Model({name}, n_sites={}, jumps={})", self.spec.n_sites, self.spec.lindblad.len())
    }
}

/// Generation test on `{K, L_1, ..., L_M}`.
#[pyfunction]
#[pyo3(signature = (model, tol = closure::DEFAULT_CLOSURE_TOL, max_basis = None))]
fn check_theorem1<'py>(
    py: Python<'py>,
    model: &Model,
    tol: f64,
    max_basis: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let l = model.lindbladian()?;
    let check = closure::check_lindbladian(&l, tol, max_basis).map_err(py_err)?;
    to_py(py, &report::theorem1(&check))
}

/// Algebra generated by a list of square numpy arrays.
#[pyfunction]
#[pyo3(signature = (generators, tol = closure::DEFAULT_CLOSURE_TOL, max_basis = None))]
fn algebra_closure<'py>(
    py: Python<'py>,
    generators: Vec<PyReadonlyArray2<'_, Complex64>>,
    tol: f64,
    max_basis: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let gens = generators.into_iter().map(from_numpy).collect::<PyResult<Vec<_>>>()?;
    let d = gens.first().map(Operator::dim).ok_or_else(|| PyValueError::new_err("no generators"))?;
    let c = closure::algebra_closure(&gens, d, tol, max_basis).map_err(py_err)?;
    let out = to_py(py, &report::closure(&c))?;
    let basis = PyList::new(py, c.basis.vectors().iter().map(|b| to_numpy(py, b)))?;
    out.set_item("basis", basis)?;
    Ok(out)
}

/// Commutant of `{H, L_m, L_m†}`.
#[pyfunction]
#[pyo3(signature = (model, tol = closure::DEFAULT_COMMUTANT_TOL))]
fn commutant<'py>(py: Python<'py>, model: &Model, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let l = model.lindbladian()?;
    let c = closure::commutant(&closure::generators(&l, GeneratorSet::Frigerio), l.dim(), tol).map_err(py_err)?;
    let out = to_py(py, &report::commutant(&c, false))?;
    let basis = PyList::new(py, c.basis.vectors().iter().map(|b| to_numpy(py, b)))?;
    out.set_item("basis", basis)?;
    Ok(out)
}

/// Kernel of the Liouvillian and the canonical steady state, if any.
#[pyfunction]
#[pyo3(signature = (model, tol = 1e-9))]
fn steady_states<'py>(py: Python<'py>, model: &Model, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let ss = ness::steady_states(&model.spec, tol).map_err(py_err)?;
    let out = PyDict::new(py);
    out.set_item("kernel_dim", ss.kernel_dim())?;
    out.set_item("kernel", to_py(py, &report::kernel(&ss.kernel))?)?;
    out.set_item("hermitian_basis", PyList::new(py, ss.hermitian_basis.iter().map(|b| to_numpy(py, b)))?)?;
    match &ss.state {
        Some(st) => {
            out.set_item("rho", to_numpy(py, &st.rho))?;
            out.set_item("min_eigenvalue", st.min_eigenvalue)?;
            out.set_item("positive_definite", st.is_positive_definite())?;
            out.set_item("stationarity_residual", st.stationarity_residual)?;
        }
        None => out.set_item("rho", py.None())?,
    }
    Ok(out.into_any())
}

/// Every stage plus consistency checks, as the `full` command reports it.
#[pyfunction]
#[pyo3(signature = (model, tol = 1e-9, seed = 0))]
fn full_verdict<'py>(py: Python<'py>, model: &Model, tol: f64, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let options = NessOptions { closure_tol: tol, kernel_tol: tol, seed, ..NessOptions::default() };
    let r = py.detach(|| ness::full_verdict(&model.spec, &options)).map_err(py_err)?;
    to_py(py, &report::ness_report(&r))
}

#[pymodule]
fn pylindblad(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("BUILTINS", modelspec::BUILTINS.to_vec())?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(check_theorem1, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_closure, m)?)?;
    m.add_function(wrap_pyfunction!(commutant, m)?)?;
    m.add_function(wrap_pyfunction!(steady_states, m)?)?;
    m.add_function(wrap_pyfunction!(full_verdict, m)?)?;
    Ok(())
}

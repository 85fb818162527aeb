//! Python bindings: parse and run litmus tests, run a corpus, and query the
//! relation-level checks.

use std::path::PathBuf;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use wmm_core::litmus::{self, RunOptions};
use wmm_core::model::{check_hierarchy, well_behaved_check, EffOracle, Universe};
use wmm_core::semantics::{DEFAULT_CAP, DEFAULT_UNROLL};
use wmm_core::{Backend, MemoryModel};

fn value_error(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_model(name: &str) -> PyResult<MemoryModel> {
    name.parse().map_err(|e: String| value_error(e))
}

fn options(backend: &str, model: Option<&str>, unroll: usize, cap: usize) -> PyResult<RunOptions> {
    Ok(RunOptions {
        backend: backend.parse().map_err(|e: String| value_error(e))?,
        model: model.map(parse_model).transpose()?,
        unroll,
        cap,
        timing: true,
    })
}

fn universe(name: &str) -> PyResult<Universe> {
    match name {
        "common" => Ok(Universe::common()),
        "extended" => Ok(Universe::extended()),
        other => Err(value_error(format!("unknown universe `{other}`"))),
    }
}

/// The outcome of running one litmus test.
#[pyclass(name = "Report", frozen, get_all)]
struct PyReport {
    name: String,
    model: String,
    backend: String,
    verdict: Option<String>,
    expect: String,
    matches: bool,
    witness: Option<std::collections::BTreeMap<String, i64>>,
    states: usize,
    millis: u64,
    error: Option<String>,
}

impl From<litmus::Report> for PyReport {
    fn from(r: litmus::Report) -> Self {
        PyReport {
            name: r.name,
            model: r.model,
            backend: r.backend,
            verdict: r.verdict.map(|v| v.keyword().to_string()),
            expect: r.expect.keyword().to_string(),
            matches: r.matches,
            witness: r.witness,
            states: r.states,
            millis: r.millis,
            error: r.error,
        }
    }
}

#[pymethods]
impl PyReport {
    fn __repr__(&self) -> String {
        format!(
            "Report(name={:?}, model={:?}, backend={:?}, verdict={:?}, expect={:?}, matches={})",
            self.name, self.model, self.backend, self.verdict, self.expect, self.matches
        )
    }
}

/// A parsed litmus test.
#[pyclass(name = "LitmusTest", frozen)]
struct PyLitmusTest(litmus::LitmusTest);

#[pymethods]
impl PyLitmusTest {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        litmus::parse_litmus(text).map(PyLitmusTest).map_err(value_error)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        litmus::load_litmus(&path).map(PyLitmusTest).map_err(value_error)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.0.model.keyword()
    }

    #[getter]
    fn expect(&self) -> &'static str {
        self.0.expect.keyword()
    }

    #[getter]
    fn threads(&self) -> usize {
        self.0.threads.len()
    }

    /// Canonical text of the test.
    fn print(&self) -> String {
        litmus::print_litmus(&self.0)
    }

    #[pyo3(signature = (backend = "pseq", model = None, unroll = DEFAULT_UNROLL, cap = DEFAULT_CAP))]
    fn run(&self, py: Python<'_>, backend: &str, model: Option<&str>, unroll: usize, cap: usize) -> PyResult<PyReport> {
        let opts = options(backend, model, unroll, cap)?;
        Ok(py.detach(|| litmus::run_test(&self.0, &opts)).into())
    }

    fn __repr__(&self) -> String {
        format!("LitmusTest(name={:?}, model={:?})", self.0.name, self.0.model.keyword())
    }
}

/// Runs every `.litmus` file in `dir`; unreadable files raise.
#[pyfunction]
#[pyo3(signature = (dir, backend = "pseq", model = None, jobs = 0, timing = true))]
fn run_corpus(py: Python<'_>, dir: PathBuf, backend: &str, model: Option<&str>, jobs: usize, timing: bool) -> PyResult<Vec<PyReport>> {
    let opts = RunOptions {
        timing,
        ..options(backend, model, DEFAULT_UNROLL, DEFAULT_CAP)?
    };
    let summary = py.detach(|| litmus::run_corpus(&dir, &opts, jobs)).map_err(value_error)?;
    if let Some(fe) = summary.file_errors.first() {
        return Err(value_error(format!("{}: {}", fe.path.display(), fe.error)));
    }
    Ok(summary.reports.into_iter().map(PyReport::from).collect())
}

/// Keywords of every supported model.
#[pyfunction]
fn models() -> Vec<&'static str> {
    MemoryModel::ALL.iter().map(|m| m.keyword()).collect()
}

/// `(weaker, stronger, violations)` for each adjacent pair of the hierarchy.
#[pyfunction]
#[pyo3(signature = (universe = "common", domain = 2))]
fn hierarchy(py: Python<'_>, universe: &str, domain: u32) -> PyResult<Vec<(String, String, usize)>> {
    let u = self::universe(universe)?;
    let steps = py.detach(|| check_hierarchy(&u.actions, EffOracle { domain }));
    Ok(steps.into_iter().map(|s| (s.weaker, s.stronger, s.violations.len())).collect())
}

/// Number of well-behavedness violations of `model`'s reordering relation.
#[pyfunction]
#[pyo3(signature = (model, universe = "common"))]
fn well_behaved_violations(py: Python<'_>, model: &str, universe: &str) -> PyResult<usize> {
    let m = parse_model(model)?;
    let u = self::universe(universe)?;
    Ok(py.detach(|| well_behaved_check(&m, &u.actions)).violations.len())
}

#[pyfunction]
fn backends() -> Vec<&'static str> {
    Backend::ALL.iter().map(|b| b.keyword()).collect()
}

#[pymodule]
fn wmm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLitmusTest>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(run_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(models, m)?)?;
    m.add_function(wrap_pyfunction!(backends, m)?)?;
    m.add_function(wrap_pyfunction!(hierarchy, m)?)?;
    m.add_function(wrap_pyfunction!(well_behaved_violations, m)?)?;
    Ok(())
}

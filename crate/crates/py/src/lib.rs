//! Python bindings for the pliable index coding library.
//!
//! Matrices cross the boundary as lists of rows, reports as plain dicts
//! (parsed from the library's JSON form).

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyType;

use pliable::bench::{run_benchmark, Algorithm, ExperimentConfig, MessageRule};
use pliable::bingreedy::{bingreedy_with, BinGreedyConfig, ThresholdBase};
use pliable::decode;
use pliable::field;
use pliable::instance::ActiveSet;
use pliable::oracle;
use pliable::randomized::{randomized_code_with, RandomizedConfig, StoppingRule};
use pliable::{FMatrix, Field, PliableInstance};

create_exception!(pliable_py, PliableError, PyException);

fn err(e: pliable::Error) -> PyErr {
    PliableError::new_err(e.to_string())
}

fn to_py_json<T: serde::Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PliableError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn field(q: u32) -> PyResult<Field> {
    Field::new(q).map_err(err)
}

/// A pliable index coding instance over messages `0..m`.
#[pyclass(name = "Instance", module = "pliable_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: PliableInstance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(m: usize, requirements: Vec<Vec<usize>>) -> PyResult<Self> {
        Ok(Self { inner: PliableInstance::new(m, requirements).map_err(err)? })
    }

    #[classmethod]
    #[pyo3(signature = (n, m, p, seed=1))]
    fn random(_cls: &Bound<'_, PyType>, n: usize, m: usize, p: f64, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: PliableInstance::random(n, m, p, seed).map_err(err)? })
    }

    #[classmethod]
    fn all_pairs(_cls: &Bound<'_, PyType>, m: usize) -> PyResult<Self> {
        Ok(Self { inner: PliableInstance::all_pairs(m).map_err(err)? })
    }

    #[classmethod]
    fn from_text(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        Ok(Self { inner: PliableInstance::from_text(text).map_err(err)? })
    }

    #[classmethod]
    fn from_json(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PliableError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn requirements(&self) -> Vec<Vec<usize>> {
        self.inner.requirements().to_vec()
    }

    fn side_information(&self, client: usize) -> PyResult<Vec<usize>> {
        self.check_client(client)?;
        Ok(self.inner.side_information(client))
    }

    fn neighbors(&self, message: usize) -> PyResult<Vec<usize>> {
        self.inner.neighbors(message).map_err(err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PliableError::new_err(e.to_string()))
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Instance(m={}, n={})", self.inner.m(), self.inner.n())
    }
}

impl PyInstance {
    fn check_client(&self, client: usize) -> PyResult<()> {
        if client >= self.inner.n() {
            return Err(err(pliable::Error::OutOfRange { index: client, limit: self.inner.n() }));
        }
        Ok(())
    }
}

/// A dense matrix over a prime field.
#[pyclass(name = "Matrix", module = "pliable_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMatrix {
    inner: FMatrix,
}

#[pymethods]
impl PyMatrix {
    /// `cols` is needed only when `rows` is empty.
    #[new]
    #[pyo3(signature = (rows, q=2, cols=None))]
    fn new(rows: Vec<Vec<u32>>, q: u32, cols: Option<usize>) -> PyResult<Self> {
        let cols = cols.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
        Ok(Self { inner: FMatrix::from_rows(field(q)?, &rows, cols).map_err(err)? })
    }

    #[classmethod]
    fn from_json(_cls: &Bound<'_, PyType>, text: &str) -> PyResult<Self> {
        let inner = serde_json::from_str(text).map_err(|e| PliableError::new_err(e.to_string()))?;
        Ok(Self { inner })
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.field().order()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        (self.inner.rows(), self.inner.cols())
    }

    fn tolist(&self) -> Vec<Vec<u32>> {
        self.inner.row_vecs()
    }

    fn column(&self, c: usize) -> PyResult<Vec<u32>> {
        if c >= self.inner.cols() {
            return Err(err(pliable::Error::OutOfRange { index: c, limit: self.inner.cols() }));
        }
        Ok(self.inner.column(c))
    }

    fn rank(&self) -> usize {
        field::rank(&self.inner)
    }

    fn nonzero_rows(&self) -> usize {
        self.inner.nonzero_rows()
    }

    fn without_zero_rows(&self) -> Self {
        Self { inner: self.inner.without_zero_rows() }
    }

    /// Transmissions `A b` for the message vector `b`.
    fn encode(&self, b: Vec<u32>) -> PyResult<Vec<u32>> {
        self.inner.mul_vec(&b).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(|e| PliableError::new_err(e.to_string()))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Matrix(q={}, rows={:?})", self.q(), self.inner.row_vecs())
    }
}

/// BinGreedy code over F_2. Returns `(matrix, report)`.
#[pyfunction]
#[pyo3(signature = (instance, prune=true, original_n=false))]
fn bingreedy(py: Python<'_>, instance: &PyInstance, prune: bool, original_n: bool) -> PyResult<(PyMatrix, Py<PyAny>)> {
    let config = BinGreedyConfig {
        threshold_base: if original_n { ThresholdBase::Original } else { ThresholdBase::Active },
        prune_zero_rows: prune,
    };
    let (a, report) = py.detach(|| bingreedy_with(&instance.inner, &config)).map_err(err)?;
    Ok((PyMatrix { inner: a }, to_py_json(py, &report)?))
}

/// Randomized baseline code over F_2. Returns `(matrix, report)`.
#[pyfunction]
#[pyo3(signature = (instance, seed=1, cumulative=false))]
fn randomized_code(py: Python<'_>, instance: &PyInstance, seed: u64, cumulative: bool) -> PyResult<(PyMatrix, Py<PyAny>)> {
    let config = RandomizedConfig {
        stopping: if cumulative { StoppingRule::Cumulative } else { StoppingRule::ExactlyOne },
        ..Default::default()
    };
    let (a, report) = py.detach(|| randomized_code_with(&instance.inner, seed, &config)).map_err(err)?;
    Ok((PyMatrix { inner: a }, to_py_json(py, &report)?))
}

#[pyfunction]
fn is_valid_code(matrix: &PyMatrix, instance: &PyInstance) -> PyResult<bool> {
    decode::is_valid_code(&matrix.inner, &instance.inner).map_err(err)
}

#[pyfunction]
fn decodable_messages(matrix: &PyMatrix, instance: &PyInstance, client: usize) -> PyResult<Vec<usize>> {
    decode::decodable_messages(&matrix.inner, &instance.inner, client).map_err(err)
}

/// Satisfied clients among `active` (all clients when omitted) and the
/// per-client report.
#[pyfunction]
#[pyo3(signature = (matrix, instance, active=None))]
fn satisfied_set(
    py: Python<'_>,
    matrix: &PyMatrix,
    instance: &PyInstance,
    active: Option<Vec<usize>>,
) -> PyResult<(Vec<usize>, Py<PyAny>)> {
    let active = match active {
        Some(clients) => {
            if let Some(&bad) = clients.iter().find(|&&i| i >= instance.inner.n()) {
                return Err(err(pliable::Error::OutOfRange { index: bad, limit: instance.inner.n() }));
            }
            ActiveSet::from_clients(clients)
        }
        None => instance.inner.active_set(),
    };
    let (sat, report) = decode::satisfied_set(&matrix.inner, &instance.inner, &active).map_err(err)?;
    Ok((sat, to_py_json(py, &report)?))
}

/// Recovers `(message, value)` for `client` from transmissions `x` and the
/// values of its side information, in ascending message order.
#[pyfunction]
fn decode_value(
    matrix: &PyMatrix,
    instance: &PyInstance,
    client: usize,
    x: Vec<u32>,
    side_values: Vec<u32>,
) -> PyResult<(usize, u32)> {
    decode::decode_value(&matrix.inner, &instance.inner, client, &x, &side_values).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (rows, q=2))]
fn rank(rows: Vec<Vec<u32>>, q: u32) -> PyResult<usize> {
    Ok(PyMatrix::new(rows, q, None)?.rank())
}

/// Whether `v` lies in the span of `columns`.
#[pyfunction]
#[pyo3(signature = (v, columns, q=2))]
fn in_span(v: Vec<u32>, columns: Vec<Vec<u32>>, q: u32) -> PyResult<bool> {
    field::in_span(&v, &columns, self::field(q)?).map_err(err)
}

/// Shortest valid code over F_q, searching lengths up to `max_k`.
/// Returns `(K, witness)`.
#[pyfunction]
#[pyo3(signature = (instance, q=2, max_k=4))]
fn optimal_code_length(py: Python<'_>, instance: &PyInstance, q: u32, max_k: usize) -> PyResult<(usize, PyMatrix)> {
    let f = field(q)?;
    let code = py.detach(|| oracle::optimal_code_length(&instance.inner, f, max_k)).map_err(err)?;
    Ok((code.k, PyMatrix { inner: code.witness }))
}

/// Minimum rank over fitted matrices. Returns `(r, basis)`.
#[pyfunction]
#[pyo3(signature = (instance, q=2, max_r=4))]
fn minrank_fitted(py: Python<'_>, instance: &PyInstance, q: u32, max_r: usize) -> PyResult<(usize, PyMatrix)> {
    let f = field(q)?;
    let mr = py.detach(|| oracle::minrank_fitted(&instance.inner, f, max_r)).map_err(err)?;
    Ok((mr.r, PyMatrix { inner: mr.basis }))
}

/// Smallest prime in `primes` admitting a length-2 code for all-pairs(m).
#[pyfunction]
#[pyo3(signature = (m, primes=vec![2, 3, 5, 7]))]
fn min_field_for_length2(py: Python<'_>, m: usize, primes: Vec<u32>) -> PyResult<Option<u32>> {
    py.detach(|| oracle::min_field_for_length2(m, &primes)).map_err(err)
}

/// Runs the encoder comparison and returns the per-instance CSV as text.
#[pyfunction]
#[pyo3(signature = (ns, m_rule="power:0.75", p=0.3, instances=20, seed=1, algorithms=None, timing=false))]
#[allow(clippy::too_many_arguments)]
fn benchmark_csv(
    py: Python<'_>,
    ns: Vec<usize>,
    m_rule: &str,
    p: f64,
    instances: usize,
    seed: u64,
    algorithms: Option<Vec<String>>,
    timing: bool,
) -> PyResult<String> {
    let algorithms = match algorithms {
        Some(names) => names.iter().map(|a| a.parse::<Algorithm>()).collect::<pliable::Result<_>>().map_err(err)?,
        None => vec![Algorithm::BinGreedy, Algorithm::Randomized],
    };
    let config = ExperimentConfig {
        ns,
        m_rule: m_rule.parse::<MessageRule>().map_err(err)?,
        p,
        instances,
        base_seed: seed,
        algorithms,
        timing,
    };
    config.validate().map_err(err)?;
    py.detach(|| run_benchmark(&config)?.csv_string()).map_err(err)
}

#[pymodule]
fn pliable_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PliableError", m.py().get_type::<PliableError>())?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyMatrix>()?;
    m.add_function(wrap_pyfunction!(bingreedy, m)?)?;
    m.add_function(wrap_pyfunction!(randomized_code, m)?)?;
    m.add_function(wrap_pyfunction!(is_valid_code, m)?)?;
    m.add_function(wrap_pyfunction!(decodable_messages, m)?)?;
    m.add_function(wrap_pyfunction!(satisfied_set, m)?)?;
    m.add_function(wrap_pyfunction!(decode_value, m)?)?;
    m.add_function(wrap_pyfunction!(rank, m)?)?;
    m.add_function(wrap_pyfunction!(in_span, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_code_length, m)?)?;
    m.add_function(wrap_pyfunction!(minrank_fitted, m)?)?;
    m.add_function(wrap_pyfunction!(min_field_for_length2, m)?)?;
    m.add_function(wrap_pyfunction!(benchmark_csv, m)?)?;
    Ok(())
}

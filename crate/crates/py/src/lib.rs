//! Python bindings for haltkit.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use haltkit::approx::{error_report, sparse_spoiler as spoiler, BudgetDecider};
use haltkit::bijection::{verify_window, BuilderState, Injection, Side, TableInjection};
use haltkit::dovetail::{bb_table, sandwich_constant, ComplexityTable, GroundTruth, Schedule};
use haltkit::machine::{self, BinStr};
use haltkit::optimalkit::{self as ok, DensityUpdate, Machine, Shift, StringSet};
use haltkit::rational::{parse_rational, Fraction};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList, PyString};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_bits(s: &str) -> PyResult<BinStr> {
    s.parse().map_err(value_err)
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_pyobject(py)?.into_any(),
            (_, Some(i)) => i.into_pyobject(py)?.into_any(),
            _ => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn json<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).map_err(value_err)?)
}

/// Run a DeskVM program for at most `budget` steps.
#[pyfunction]
#[pyo3(signature = (program, input = "", budget = 1_000_000))]
fn run<'py>(py: Python<'py>, program: &str, input: &str, budget: u64) -> PyResult<Bound<'py, PyAny>> {
    if budget == 0 {
        return Err(value_err("budget must be at least 1"));
    }
    let out = machine::run(&parse_bits(program)?, &parse_bits(input)?, budget);
    to_py(py, &out.to_record())
}

/// Certified verdict: halts with steps and output, diverges with a
/// certificate, or unknown.
#[pyfunction]
#[pyo3(signature = (program, budget = 1_000_000, space = 100_000))]
fn certify<'py>(py: Python<'py>, program: &str, budget: u64, space: usize) -> PyResult<Bound<'py, PyAny>> {
    json(py, &machine::certify(&parse_bits(program)?, &BinStr::empty(), budget, space))
}

#[pyclass(name = "GroundTruth", frozen)]
struct PyGroundTruth {
    inner: GroundTruth,
}

#[pymethods]
impl PyGroundTruth {
    #[new]
    #[pyo3(signature = (max_len, budget = 1_000_000, space = 100_000))]
    fn new(max_len: usize, budget: u64, space: usize) -> PyResult<Self> {
        if max_len > 24 {
            return Err(value_err("max_len above 24 is not supported here"));
        }
        Ok(PyGroundTruth {
            inner: GroundTruth::desk(max_len, budget, space),
        })
    }

    #[getter]
    fn max_len(&self) -> usize {
        self.inner.max_len()
    }

    fn counts<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json(py, &self.inner.counts())
    }

    fn halts(&self, program: &str) -> PyResult<bool> {
        Ok(self.inner.halts(&parse_bits(program)?))
    }

    fn halting_by_length(&self) -> Vec<u64> {
        self.inner.halting_by_length()
    }

    fn cumulative_halting(&self) -> Vec<u64> {
        self.inner.cumulative_halting()
    }

    fn busy_beaver(&self) -> Vec<u64> {
        bb_table(&self.inner).bb
    }

    /// `{output: K(output)}` over the window.
    fn complexity(&self) -> BTreeMap<String, usize> {
        ComplexityTable::from_truth(&self.inner)
            .entries
            .iter()
            .map(|(y, e)| (y.to_string(), e.k))
            .collect()
    }

    fn b_column(&self) -> Vec<u64> {
        ComplexityTable::from_truth(&self.inner).b_column()
    }

    #[pyo3(signature = (max_c = 8))]
    fn sandwich_constant(&self, max_c: usize) -> Option<usize> {
        sandwich_constant(&bb_table(&self.inner), &ComplexityTable::from_truth(&self.inner), max_c)
    }

    /// Error rows of the step-budget decider with budget `t`.
    fn budget_errors<'py>(&self, py: Python<'py>, t: u64) -> PyResult<Bound<'py, PyAny>> {
        if t == 0 {
            return Err(value_err("budget must be at least 1"));
        }
        let report = error_report(&BudgetDecider::new(t), &self.inner, self.inner.max_len());
        to_py(py, &report.to_json())
    }
}

#[pyclass(name = "Machine", frozen)]
struct PyMachine {
    inner: Machine,
}

#[pymethods]
impl PyMachine {
    /// DeskVM on empty input, dovetailed over programs of length at most
    /// `max_len`.
    #[staticmethod]
    #[pyo3(signature = (max_len, budget = 1_000_000, space = 100_000))]
    fn desk(max_len: usize, budget: u64, space: usize) -> PyMachine {
        PyMachine {
            inner: ok::desk_machine(max_len, Schedule::doubling(budget), space),
        }
    }

    /// The standard optimal machine over self-delimited program frames.
    #[staticmethod]
    #[pyo3(signature = (max_len, budget = 1_000_000, space = 100_000))]
    fn standard(max_len: usize, budget: u64, space: usize) -> PyMachine {
        PyMachine {
            inner: ok::standard_optimal(max_len, Schedule::doubling(budget), space),
        }
    }

    /// The certified window of a ground truth, in length-lex order.
    #[staticmethod]
    fn window(truth: &PyGroundTruth) -> PyMachine {
        PyMachine {
            inner: ok::certified_window_machine(&truth.inner),
        }
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn max_len(&self) -> usize {
        self.inner.max_len()
    }

    /// `(seq, program, output, steps)` tuples, optionally only the first
    /// `limit`.
    #[pyo3(signature = (limit = None))]
    fn events(&self, limit: Option<usize>) -> Vec<(u64, String, String, u64)> {
        self.inner
            .events()
            .take(limit.unwrap_or(usize::MAX))
            .map(|e| (e.seq, e.program.to_string(), e.output.to_string(), e.steps))
            .collect()
    }

    fn left_total(&self) -> PyMachine {
        PyMachine {
            inner: ok::left_total(&self.inner),
        }
    }

    fn dedupe(&self) -> PyMachine {
        PyMachine {
            inner: ok::dedupe_values(&self.inner),
        }
    }

    fn prepend_zero(&self) -> PyMachine {
        PyMachine {
            inner: ok::prepend_zero(&self.inner),
        }
    }

    #[pyo3(signature = (one_fill = false))]
    fn shift(&self, one_fill: bool) -> PyMachine {
        let variant = if one_fill { Shift::OneFill } else { Shift::Zero };
        PyMachine {
            inner: ok::shift_density(&self.inner, variant),
        }
    }

    /// Machine whose domain is `strings` (length-lex order expected).
    fn domain_from_set(&self, strings: Vec<String>, c: usize) -> PyResult<PyMachine> {
        let set: Vec<BinStr> = strings.iter().map(|s| parse_bits(s)).collect::<PyResult<_>>()?;
        let set = StringSet::from_vec("S", set);
        ok::domain_from_set(&self.inner, &set, c)
            .map(|inner| PyMachine { inner })
            .map_err(value_err)
    }
}

/// Build the bijection for two random injective tables and verify it on
/// `[0, window)`.
#[pyfunction]
#[pyo3(signature = (seed, width = 256, window = 256))]
fn build_bijection<'py>(py: Python<'py>, seed: u64, width: usize, window: u64) -> PyResult<Bound<'py, PyAny>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f: Arc<dyn Injection> = Arc::new(TableInjection::random(&mut rng, width));
    let g: Arc<dyn Injection> = Arc::new(TableInjection::random(&mut rng, width));
    let mut state = BuilderState::new(Arc::clone(&f), Arc::clone(&g));
    for v in 0..window {
        state.resolve(Side::L, v).map_err(value_err)?;
        state.resolve(Side::R, v).map_err(value_err)?;
    }
    state.check_invariants().map_err(value_err)?;
    let report = verify_window(f.as_ref(), g.as_ref(), state.transcript(), window);
    let pairs: Vec<(u64, u64)> = state.transcript().iter().map(|e| e.pair).collect();
    let out = PyDict::new(py);
    out.set_item("pairs", pairs)?;
    out.set_item("report", json(py, &report)?)?;
    Ok(out.into_any())
}

/// Carve a sparse spoiler from a distribution given as
/// `{string: "num/den"}`.
#[pyfunction]
#[pyo3(signature = (dist, eps = "1/4", min_len = 4))]
fn sparse_spoiler<'py>(
    py: Python<'py>,
    dist: HashMap<String, String>,
    eps: &str,
    min_len: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let mut d = BTreeMap::new();
    for (s, p) in &dist {
        d.insert(parse_bits(s)?, parse_rational(p).map_err(value_err)?);
    }
    let eps = parse_rational(eps).map_err(value_err)?;
    json(py, &spoiler(&d, eps, min_len).map_err(value_err)?)
}

/// Strings of a set with density numerators `counts[n] / 2^n`.
#[pyfunction]
fn set_with_density(counts: Vec<u64>) -> PyResult<Vec<String>> {
    let updates = counts.iter().enumerate().map(|(n, &k)| DensityUpdate {
        n,
        value: Fraction::new(k, 1u64 << n),
    });
    ok::set_with_density(updates)
        .map(|r| r.map(|s| s.to_string()).map_err(value_err))
        .collect()
}

#[pymodule]
fn haltkit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(build_bijection, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_spoiler, m)?)?;
    m.add_function(wrap_pyfunction!(set_with_density, m)?)?;
    m.add_class::<PyGroundTruth>()?;
    m.add_class::<PyMachine>()?;
    Ok(())
}

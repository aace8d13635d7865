use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sample_sched_core::experiments;
use sample_sched_core::montecarlo;
use sample_sched_core::numerics::rng_stream;
use sample_sched_core::pairwise;
use sample_sched_core::policies::{self, SampleVector};
use sample_sched_core::{BaseDensity, Permutation, Policy, QuadratureConfig};

fn py_err(e: sample_sched_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = sample_sched_core::Error>>(s: &str) -> PyResult<T> {
    s.parse().map_err(py_err)
}

/// A processing-time distribution.
#[pyclass(name = "Distribution", module = "sample_sched", frozen, from_py_object)]
#[derive(Clone)]
struct PyDistribution(sample_sched_core::Distribution);

#[pymethods]
impl PyDistribution {
    #[staticmethod]
    fn deterministic(value: f64) -> PyResult<Self> {
        sample_sched_core::Distribution::deterministic(value).map(Self).map_err(py_err)
    }

    /// `atoms` is a list of `(value, probability)` pairs.
    #[staticmethod]
    fn finite(atoms: Vec<(f64, f64)>) -> PyResult<Self> {
        sample_sched_core::Distribution::finite(atoms).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn exponential(rate: f64) -> PyResult<Self> {
        sample_sched_core::Distribution::exponential(rate).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn uniform(lo: f64, hi: f64) -> PyResult<Self> {
        sample_sched_core::Distribution::uniform(lo, hi).map(Self).map_err(py_err)
    }

    /// `base` is one of `exp1`, `erlang2`, `uniform01x2`, `tri02`, `ramp03`.
    #[staticmethod]
    fn shape_uniform(base: &str, rate: f64) -> PyResult<Self> {
        sample_sched_core::Distribution::shape_uniform(parse::<BaseDensity>(base)?, rate)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn translated(base: &str, shift: f64) -> PyResult<Self> {
        sample_sched_core::Distribution::translated(parse::<BaseDensity>(base)?, shift)
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        serde_json::from_str(s)
            .map(Self)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn mean(&self) -> f64 {
        self.0.mean()
    }

    #[getter]
    fn is_atomic(&self) -> bool {
        self.0.is_atomic()
    }

    fn pdf(&self, x: f64) -> PyResult<f64> {
        self.0.pdf(x).map_err(py_err)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.0.cdf(x)
    }

    fn quantile(&self, u: f64) -> f64 {
        self.0.quantile(u)
    }

    /// `count` draws from random stream `(seed, 0)`.
    fn sample(&self, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = rng_stream(seed, 0);
        (0..count).map(|_| self.0.sample(&mut rng)).collect()
    }

    fn __repr__(&self) -> String {
        format!("Distribution({})", serde_json::to_string(&self.0).unwrap_or_default())
    }
}

/// Weighted jobs; job ids in Python are 1-based.
#[pyclass(name = "Instance", module = "sample_sched", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyInstance(sample_sched_core::Instance);

#[pymethods]
impl PyInstance {
    /// `jobs` is a list of `(weight, Distribution)` pairs.
    #[new]
    fn new(jobs: Vec<(f64, PyDistribution)>) -> PyResult<Self> {
        sample_sched_core::Instance::from_pairs(jobs.into_iter().map(|(w, d)| (w, d.0)))
            .map(Self)
            .map_err(py_err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        sample_sched_core::Instance::from_json(s).map(Self).map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.0.weights()
    }

    #[getter]
    fn means(&self) -> Vec<f64> {
        self.0.means()
    }

    fn wsept_order(&self) -> Vec<usize> {
        self.0.wsept_order().to_one_based()
    }

    fn l_cost(&self) -> f64 {
        self.0.l_cost()
    }

    fn h_cost(&self) -> f64 {
        self.0.h_cost()
    }

    /// Expected cost of a 1-based job sequence.
    fn expected_cost(&self, order: Vec<usize>) -> PyResult<f64> {
        let perm = Permutation::from_one_based(&order).map_err(py_err)?;
        self.0.expected_cost(&perm).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={})", self.0.n())
    }
}

/// Exact analysis of a static policy as a dict.
#[pyfunction]
#[pyo3(signature = (instance, policy = "sam", rel_tol = None))]
fn analyze<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    policy: &str,
    rel_tol: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = rel_tol.map_or_else(QuadratureConfig::default, QuadratureConfig::with_rel_tol);
    let r = pairwise::analyze(&instance.0, parse::<Policy>(policy)?, &cfg).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("L", r.l)?;
    d.set_item("H", r.h)?;
    d.set_item("cost", r.cost)?;
    d.set_item("rog", r.rog)?;
    d.set_item("kappa", r.kappa)?;
    d.set_item("alpha", r.alpha)?;
    d.set_item("bound_alpha", r.bound_alpha)?;
    d.set_item("policy", r.policy.name())?;
    d.set_item("method", r.method)?;
    d.set_item("bound_half_ok", r.bound_half_ok)?;
    d.set_item("kappa_bound_ok", r.kappa_bound_ok)?;
    d.set_item("near_degenerate", r.near_degenerate)?;
    Ok(d)
}

/// Pairwise precedence matrix `P[j][k]` (0-based rows) of a static policy.
#[pyfunction]
#[pyo3(signature = (instance, policy = "sam"))]
fn pairwise_matrix(instance: &PyInstance, policy: &str) -> PyResult<Vec<Vec<f64>>> {
    pairwise::pairwise_matrix(&instance.0, parse::<Policy>(policy)?, &QuadratureConfig::default())
        .map(|m| m.rows())
        .map_err(py_err)
}

/// Monte Carlo `(mean, stderr)` of the expected cost.
#[pyfunction]
#[pyo3(signature = (instance, policy = "sam", trials = 100_000, seed = 0))]
fn estimate_cost(py: Python<'_>, instance: &PyInstance, policy: &str, trials: u64, seed: u64) -> PyResult<(f64, f64)> {
    let policy = parse::<Policy>(policy)?;
    let inst = &instance.0;
    let e = py
        .detach(|| montecarlo::estimate_cost(inst, policy, trials, seed))
        .map_err(py_err)?;
    Ok((e.mean, e.stderr))
}

/// Monte Carlo `(mean, stderr)` of the expected regret.
#[pyfunction]
#[pyo3(signature = (instance, policy = "sam", trials = 100_000, seed = 0))]
fn estimate_regret(py: Python<'_>, instance: &PyInstance, policy: &str, trials: u64, seed: u64) -> PyResult<(f64, f64)> {
    let policy = parse::<Policy>(policy)?;
    let inst = &instance.0;
    let e = py
        .detach(|| montecarlo::estimate_regret(inst, policy, trials, seed))
        .map_err(py_err)?;
    Ok((e.mean, e.stderr))
}

/// Exact expected cost by enumeration (finite laws only).
#[pyfunction]
fn exact_discrete_cost(instance: &PyInstance, policy: &str) -> PyResult<f64> {
    montecarlo::exact_discrete_cost(&instance.0, parse::<Policy>(policy)?).map_err(py_err)
}

#[pyfunction]
fn p_exponential_closed(pi_j: f64, pi_k: f64) -> PyResult<f64> {
    pairwise::p_exponential_closed(pi_j, pi_k).map_err(py_err)
}

/// SAM sequence (1-based ids) for given weights and sampled times.
#[pyfunction]
fn sam_schedule(weights: Vec<f64>, samples: Vec<f64>) -> PyResult<Vec<usize>> {
    let samples = SampleVector::new(samples).map_err(py_err)?;
    policies::sam_schedule(&weights, &samples)
        .map(|p| p.to_one_based())
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n = 5, m = 100.0, eps = 1e-6))]
fn example1_instance(n: usize, m: f64, eps: f64) -> PyResult<PyInstance> {
    experiments::example1_instance(n, m, eps).map(PyInstance).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (m = 100.0, eps = 1e-3))]
fn example2_instance(m: f64, eps: f64) -> PyResult<PyInstance> {
    experiments::example2_instance(m, eps).map(PyInstance).map_err(py_err)
}

#[pymodule]
fn sample_sched(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDistribution>()?;
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(pairwise_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_cost, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_regret, m)?)?;
    m.add_function(wrap_pyfunction!(exact_discrete_cost, m)?)?;
    m.add_function(wrap_pyfunction!(p_exponential_closed, m)?)?;
    m.add_function(wrap_pyfunction!(sam_schedule, m)?)?;
    m.add_function(wrap_pyfunction!(example1_instance, m)?)?;
    m.add_function(wrap_pyfunction!(example2_instance, m)?)?;
    Ok(())
}

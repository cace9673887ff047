//! Python bindings for `hypershuffle`.

use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use hypershuffle::analysis::{check_aperiodic, check_regular, check_strongly_connected, stationary_distribution, sup_error_from_uniform};
use hypershuffle::enumerate::count_stub_realizations;
use hypershuffle::reproduce::{self, Target};
use hypershuffle::shuffle::run_replicas;
use hypershuffle::validation::{relabel_all, report_from_samples};
use hypershuffle::{
    build_chain_graph_with, enumerate_stub_space, enumerate_vertex_space, AcceptanceRule, ChainConfig, ChainOptions,
    DirectedHypergraph, Labeling, SpaceSpec,
};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn spec(space: &str, labeling: &str) -> PyResult<SpaceSpec> {
    let labeling = match labeling {
        "stub" => Labeling::Stub,
        "vertex" => Labeling::Vertex,
        other => return Err(err(format!("unknown labeling `{other}`, expected `stub` or `vertex`"))),
    };
    SpaceSpec::parse(space, labeling).map_err(err)
}

fn acceptance(name: &str) -> PyResult<AcceptanceRule> {
    match name {
        "ordered-pair-count" => Ok(AcceptanceRule::OrderedPairCount),
        "multiplicity-product" => Ok(AcceptanceRule::MultiplicityProduct),
        "accept-all" => Ok(AcceptanceRule::AcceptAll),
        other => Err(err(format!("unknown acceptance rule `{other}`"))),
    }
}

/// A directed hypergraph with labeled vertices.
#[pyclass(name = "Hypergraph", module = "hypershuffle", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyHypergraph {
    inner: DirectedHypergraph,
}

impl From<DirectedHypergraph> for PyHypergraph {
    fn from(inner: DirectedHypergraph) -> Self {
        PyHypergraph { inner }
    }
}

#[pymethods]
impl PyHypergraph {
    /// Builds a hypergraph from labels and `(tail, head)` pairs of labels.
    #[new]
    fn new(labels: Vec<String>, arcs: Vec<(Vec<String>, Vec<String>)>) -> PyResult<Self> {
        let index = |name: &str| {
            labels
                .iter()
                .position(|l| l == name)
                .map(|i| i as u32)
                .ok_or_else(|| err(format!("unknown vertex `{name}`")))
        };
        let arcs = arcs
            .iter()
            .map(|(t, h)| {
                let t: Vec<u32> = t.iter().map(|v| index(v)).collect::<PyResult<_>>()?;
                let h: Vec<u32> = h.iter().map(|v| index(v)).collect::<PyResult<_>>()?;
                Ok(hypershuffle::Hyperarc::from_ids(&t, &h))
            })
            .collect::<PyResult<Vec<_>>>()?;
        DirectedHypergraph::new(labels, arcs).map(Self::from).map_err(err)
    }

    #[staticmethod]
    fn from_dhg(text: &str) -> PyResult<Self> {
        hypershuffle::parse_dhg(text).map(Self::from).map_err(err)
    }

    fn to_dhg(&self) -> String {
        hypershuffle::serialize_dhg(&self.inner)
    }

    #[getter]
    fn n_vertices(&self) -> usize {
        self.inner.n_vertices()
    }

    #[getter]
    fn n_arcs(&self) -> usize {
        self.inner.n_arcs()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    /// Arcs as `(tail, head)` lists of labels, in stored order.
    #[getter]
    fn arcs(&self) -> Vec<(Vec<String>, Vec<String>)> {
        let side = |m: &hypershuffle::Multiset| m.iter().map(|v| self.inner.label(v).to_string()).collect();
        self.inner.arcs().iter().map(|a| (side(&a.tail), side(&a.head))).collect()
    }

    /// `(vertex (in, out) degrees, arc (tail, head) sizes)`.
    fn degree_sequence(&self) -> (Vec<(u32, u32)>, Vec<(u32, u32)>) {
        let d = self.inner.degree_sequence();
        (d.vertex, d.arcs)
    }

    /// Indices of self-loops and degenerate arcs, and groups of identical arcs.
    fn features<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let f = self.inner.classify_features();
        let flagged = |v: &[bool]| v.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect::<Vec<_>>();
        let d = PyDict::new(py);
        d.set_item("self_loops", flagged(&f.self_loops))?;
        d.set_item("degenerate", flagged(&f.degenerate))?;
        d.set_item("multi", f.multi_groups)?;
        Ok(d)
    }

    fn canonical_form<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.inner.canonical_form().0)
    }

    fn same_arcs(&self, other: PyRef<'_, PyHypergraph>) -> bool {
        self.inner.same_arcs(&other.inner)
    }

    fn in_space(&self, space: &str) -> PyResult<bool> {
        Ok(spec(space, "stub")?.permits_hypergraph(&self.inner))
    }

    fn __repr__(&self) -> String {
        format!("Hypergraph({} vertices, {} arcs)", self.inner.n_vertices(), self.inner.n_arcs())
    }

    fn __str__(&self) -> String {
        self.to_dhg()
    }
}

#[pyfunction]
fn parse_dhg(text: &str) -> PyResult<PyHypergraph> {
    PyHypergraph::from_dhg(text)
}

#[pyfunction]
fn parse_dhg_documents(text: &str) -> PyResult<Vec<PyHypergraph>> {
    let docs = hypershuffle::parse_dhg_documents(text).map_err(err)?;
    Ok(docs.into_iter().map(PyHypergraph::from).collect())
}

#[pyfunction]
fn serialize_dhg(h: PyRef<'_, PyHypergraph>) -> String {
    h.to_dhg()
}

/// Every hypergraph with the degrees of `h` in the space, with `h`'s labels.
#[pyfunction]
#[pyo3(signature = (h, space = "sdm"))]
fn enumerate_space(h: PyRef<'_, PyHypergraph>, space: &str) -> PyResult<Vec<PyHypergraph>> {
    let all = enumerate_vertex_space(&h.inner.degree_sequence(), &spec(space, "vertex")?).map_err(err)?;
    let all = relabel_all(all, &h.inner).map_err(err)?;
    Ok(all.into_iter().map(PyHypergraph::from).collect())
}

/// Size of the space of `h`'s degrees: hypergraphs for `vertex`, stub
/// configurations for `stub`.
#[pyfunction]
#[pyo3(signature = (h, space = "sdm", labeling = "vertex"))]
fn count_space(h: PyRef<'_, PyHypergraph>, space: &str, labeling: &str) -> PyResult<usize> {
    let s = spec(space, labeling)?;
    let d = h.inner.degree_sequence();
    match s.labeling {
        Labeling::Vertex => enumerate_vertex_space(&d, &s).map(|v| v.len()).map_err(err),
        Labeling::Stub => enumerate_stub_space(&d, &s).map(|(_, v)| v.len()).map_err(err),
    }
}

#[pyfunction(name = "count_stub_realizations")]
fn stub_realizations(h: PyRef<'_, PyHypergraph>) -> BigUint {
    count_stub_realizations(&h.inner)
}

/// Final states of `samples` independent chains of `steps` steps from `h`.
#[pyfunction]
#[pyo3(signature = (h, steps, samples = 1, seed = hypershuffle::rng::DEFAULT_SEED, space = "sdm", labeling = "stub", acceptance = "ordered-pair-count"))]
#[allow(clippy::too_many_arguments)]
fn sample(
    py: Python<'_>,
    h: PyRef<'_, PyHypergraph>,
    steps: u64,
    samples: u64,
    seed: u64,
    space: &str,
    labeling: &str,
    acceptance: &str,
) -> PyResult<Vec<PyHypergraph>> {
    let cfg = config(steps, seed, space, labeling, acceptance)?;
    let h0 = h.inner.clone();
    let out = py.detach(|| run_replicas(&h0, &cfg, samples)).map_err(err)?;
    Ok(out.into_iter().map(PyHypergraph::from).collect())
}

fn config(steps: u64, seed: u64, space: &str, labeling: &str, acceptance_rule: &str) -> PyResult<ChainConfig> {
    let mut cfg = ChainConfig::new(steps, seed, spec(space, labeling)?);
    cfg.acceptance = acceptance(acceptance_rule)?;
    Ok(cfg)
}

/// Runs one chain and returns the final state with its step counts.
#[pyfunction]
#[pyo3(signature = (h, steps, seed = hypershuffle::rng::DEFAULT_SEED, space = "sdm", labeling = "stub", acceptance = "ordered-pair-count"))]
fn run_chain<'py>(
    py: Python<'py>,
    h: PyRef<'_, PyHypergraph>,
    steps: u64,
    seed: u64,
    space: &str,
    labeling: &str,
    acceptance: &str,
) -> PyResult<(PyHypergraph, Bound<'py, PyDict>)> {
    let cfg = config(steps, seed, space, labeling, acceptance)?;
    let h0 = h.inner.clone();
    let run = py.detach(|| hypershuffle::run_chain(&h0, &cfg)).map_err(err)?;
    let counts = PyDict::new(py);
    counts.set_item("accepted", run.counts.accepted)?;
    counts.set_item("rejected_by_acceptance", run.counts.rejected_by_acceptance)?;
    counts.set_item("rejected_by_feature", run.counts.rejected_by_feature)?;
    Ok((run.state.into(), counts))
}

/// Samples and runs a chi-square test against the chain's target
/// distribution.
#[pyfunction]
#[pyo3(signature = (h, steps, samples, seed = hypershuffle::rng::DEFAULT_SEED, space = "sdm", labeling = "stub"))]
fn uniformity_test<'py>(
    py: Python<'py>,
    h: PyRef<'_, PyHypergraph>,
    steps: u64,
    samples: u64,
    seed: u64,
    space: &str,
    labeling: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(steps, seed, space, labeling, "ordered-pair-count")?;
    let h0 = h.inner.clone();
    let report = py
        .detach(|| run_replicas(&h0, &cfg, samples).and_then(|s| report_from_samples("python", &h0, &cfg, &s)))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("chi2", report.chi2)?;
    d.set_item("dof", report.dof)?;
    d.set_item("p", report.p)?;
    d.set_item("observed", report.histogram.iter().map(|c| c.observed).collect::<Vec<_>>())?;
    d.set_item("expected", report.histogram.iter().map(|c| c.expected).collect::<Vec<_>>())?;
    d.set_item("pass", report.verdict == hypershuffle::validation::Verdict::Pass)?;
    Ok(d)
}

/// Exact properties of the chain on the space of `h`'s degrees.
#[pyfunction]
#[pyo3(signature = (h, space = "sdm", labeling = "vertex"))]
fn chain_verify<'py>(py: Python<'py>, h: PyRef<'_, PyHypergraph>, space: &str, labeling: &str) -> PyResult<Bound<'py, PyDict>> {
    let s = spec(space, labeling)?;
    let g = build_chain_graph_with(&h.inner.degree_sequence(), &s, &ChainOptions::default()).map_err(err)?;
    let (connected, comps) = check_strongly_connected(&g);
    let sup = stationary_distribution(&g).map_err(err)?.unique().map(sup_error_from_uniform);
    let d = PyDict::new(py);
    d.set_item("states", g.n_states())?;
    d.set_item("classes", g.classes.len())?;
    d.set_item("symmetric", check_regular(&g).0)?;
    d.set_item("aperiodic", check_aperiodic(&g))?;
    d.set_item("strongly_connected", connected)?;
    d.set_item("components", comps.len())?;
    d.set_item("stationary_sup_error", sup)?;
    Ok(d)
}

/// Runs a reproduction target; returns `(passed, lines)`.
#[pyfunction(name = "reproduce")]
fn run_target(py: Python<'_>, target: &str) -> PyResult<(bool, Vec<String>)> {
    let t: Target = target.parse().map_err(err)?;
    let report = py.detach(|| reproduce::run(t)).map_err(err)?;
    Ok((report.pass, report.lines))
}

#[pymodule]
#[pyo3(name = "hypershuffle")]
fn hypershuffle_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHypergraph>()?;
    m.add_function(wrap_pyfunction!(parse_dhg, m)?)?;
    m.add_function(wrap_pyfunction!(parse_dhg_documents, m)?)?;
    m.add_function(wrap_pyfunction!(serialize_dhg, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_space, m)?)?;
    m.add_function(wrap_pyfunction!(count_space, m)?)?;
    m.add_function(wrap_pyfunction!(stub_realizations, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_chain, m)?)?;
    m.add_function(wrap_pyfunction!(uniformity_test, m)?)?;
    m.add_function(wrap_pyfunction!(chain_verify, m)?)?;
    m.add_function(wrap_pyfunction!(run_target, m)?)?;
    Ok(())
}

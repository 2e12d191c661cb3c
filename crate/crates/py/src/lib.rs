//! Python bindings. Thin wrappers over the core types plus module-level
//! functions mirroring the CLI verbs; numbers that can exceed 64 bits
//! (slack, wide vertex ids) cross the boundary as Python ints.

use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;

use ttrans_core::reduction::{ReductionParams, DEFAULT_SIZE_CAP};
use ttrans_core::transversal::DEFAULT_NODE_BUDGET;
use ttrans_core::VertexSet;

fn val_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "Graph")]
struct PyGraph {
    inner: ttrans_core::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyGraph { inner: ttrans_core::Graph::new(n, &edges).map_err(val_err)? })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: ttrans_core::Graph::parse(text).map_err(val_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(val_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

#[pyclass(name = "Hypergraph")]
struct PyHypergraph {
    inner: ttrans_core::Hypergraph,
}

#[pymethods]
impl PyHypergraph {
    #[new]
    fn new(n: usize, d: usize, hyperedges: Vec<Vec<usize>>) -> PyResult<Self> {
        Ok(PyHypergraph {
            inner: ttrans_core::Hypergraph::new(n, d, &hyperedges).map_err(val_err)?,
        })
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PyHypergraph { inner: ttrans_core::Hypergraph::parse(text).map_err(val_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d()
    }

    fn hyperedges(&self) -> Vec<Vec<usize>> {
        self.inner.hyperedges().to_vec()
    }

    fn is_covered_by(&self, cover: Vec<usize>) -> bool {
        self.inner.is_covered_by(&cover.into_iter().collect())
    }

    fn render(&self) -> String {
        self.inner.render()
    }

    fn __repr__(&self) -> String {
        format!(
            "Hypergraph(n={}, m={}, d={})",
            self.inner.n(),
            self.inner.m(),
            self.inner.d()
        )
    }
}

#[pyclass(name = "TreePattern")]
struct PyTreePattern {
    inner: ttrans_core::TreePattern,
}

#[pymethods]
impl PyTreePattern {
    /// Builds a pattern from an explicit tree edge list.
    #[new]
    fn new(k: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let g = ttrans_core::Graph::new(k, &edges).map_err(val_err)?;
        Ok(PyTreePattern { inner: ttrans_core::make_pattern(g).map_err(val_err)? })
    }

    /// `kind` is one of star, path, double_star, caterpillar, random.
    #[staticmethod]
    #[pyo3(signature = (kind, size, seed = 0))]
    fn generate(kind: &str, size: usize, seed: u64) -> PyResult<Self> {
        let kind = ttrans_core::PatternKind::from_name(kind)
            .ok_or_else(|| val_err(format!("unknown pattern kind {kind:?}")))?;
        Ok(PyTreePattern {
            inner: ttrans_core::generate_pattern(kind, size, seed).map_err(val_err)?,
        })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    /// The branching parameter: over the proper 2-coloring, the smaller
    /// class-wise maximum degree.
    #[getter]
    fn delta(&self) -> usize {
        self.inner.delta()
    }

    #[getter]
    fn heavy_color(&self) -> u8 {
        self.inner.heavy_color()
    }

    fn color(&self, v: usize) -> PyResult<u8> {
        if v >= self.inner.k() {
            return Err(val_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.color(v))
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.tree().edges().to_vec()
    }

    fn __repr__(&self) -> String {
        format!("TreePattern(k={}, delta={})", self.inner.k(), self.inner.delta())
    }
}

#[pyclass(name = "SolveResult")]
struct PySolveResult {
    #[pyo3(get)]
    solution: Vec<usize>,
    #[pyo3(get)]
    optimal: bool,
    #[pyo3(get)]
    bound: usize,
    #[pyo3(get)]
    copies_examined: u64,
}

impl From<ttrans_core::SolveResult> for PySolveResult {
    fn from(r: ttrans_core::SolveResult) -> Self {
        PySolveResult {
            solution: r.solution.iter().collect(),
            optimal: r.optimal,
            bound: r.bound_used,
            copies_examined: r.copies_examined,
        }
    }
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(size={}, optimal={})",
            self.solution.len(),
            self.optimal
        )
    }
}

#[pyclass(name = "Plan")]
struct PyPlan {
    #[pyo3(get)]
    mode: String,
    #[pyo3(get)]
    b: usize,
    #[pyo3(get)]
    c: usize,
    #[pyo3(get)]
    w: u128,
    #[pyo3(get)]
    eps: String,
    #[pyo3(get)]
    requirement: u128,
    #[pyo3(get)]
    crude_bound: Option<u128>,
    #[pyo3(get)]
    hprime_vertices: u128,
    #[pyo3(get)]
    hprime_hyperedges: u128,
    #[pyo3(get)]
    g_vertices: u128,
    #[pyo3(get)]
    g_edges: u128,
}

impl From<ttrans_core::Plan> for PyPlan {
    fn from(p: ttrans_core::Plan) -> Self {
        PyPlan {
            mode: p.mode.name().to_string(),
            b: p.params.cloud_size,
            c: p.params.copies,
            w: p.params.slack,
            eps: p.params.eps.to_string(),
            requirement: p.witness_requirement,
            crude_bound: p.crude_slack_bound,
            hprime_vertices: p.sizes.hprime_vertices,
            hprime_hyperedges: p.sizes.hprime_hyperedges,
            g_vertices: p.sizes.g_vertices,
            g_edges: p.sizes.g_edges,
        }
    }
}

#[pymethods]
impl PyPlan {
    fn __repr__(&self) -> String {
        format!(
            "Plan(mode={}, b={}, c={}, g_vertices={})",
            self.mode, self.b, self.c, self.g_vertices
        )
    }
}

#[pyclass(name = "Occupancy")]
struct PyOccupancy {
    #[pyo3(get)]
    threshold: usize,
    #[pyo3(get)]
    occupied: Vec<usize>,
    #[pyo3(get)]
    free_hyperedges: Vec<usize>,
    #[pyo3(get)]
    projected_out: Vec<usize>,
    #[pyo3(get)]
    r_cloud_size: usize,
    #[pyo3(get)]
    counting_bound_ok: bool,
    #[pyo3(get)]
    derived_cover: Vec<usize>,
}

#[pymethods]
impl PyOccupancy {
    fn __repr__(&self) -> String {
        format!(
            "Occupancy(occupied={}, free_hyperedges={})",
            self.occupied.len(),
            self.free_hyperedges.len()
        )
    }
}

/// Searches `g` for a copy of the pattern; returns the vertex map
/// `pattern vertex -> host vertex` or None.
#[pyfunction]
#[pyo3(signature = (g, t, method = "brute", delta = 0.01, seed = 1))]
fn detect(
    g: &PyGraph,
    t: &PyTreePattern,
    method: &str,
    delta: f64,
    seed: u64,
) -> PyResult<Option<Vec<usize>>> {
    let found = match method {
        "brute" => ttrans_core::detect_bruteforce(&g.inner, &t.inner),
        "cc" => ttrans_core::detect_color_coding(&g.inner, &t.inner, delta, seed)
            .map_err(val_err)?,
        other => return Err(val_err(format!("unknown method {other:?}"))),
    };
    Ok(found.map(|e| e.map().to_vec()))
}

/// Degree certificate of absence: returns `(side, side_max_degree)` when
/// one bipartition side of `g` has maximum degree below the pattern's
/// branching parameter, else None.
#[pyfunction]
fn certify_absence(g: &PyGraph, t: &PyTreePattern) -> Option<(u8, usize)> {
    match ttrans_core::degree_prune_check(&g.inner, &t.inner) {
        ttrans_core::PruneOutcome::CertifiedAbsent { side, side_max_degree } => {
            Some((side, side_max_degree))
        }
        ttrans_core::PruneOutcome::Unknown { .. } => None,
    }
}

/// Minimum pattern transversal of `g`, exact (branch and bound) or
/// factor-k local-ratio.
#[pyfunction]
#[pyo3(signature = (g, t, mode = "exact", budget = DEFAULT_NODE_BUDGET))]
fn solve(g: &PyGraph, t: &PyTreePattern, mode: &str, budget: u64) -> PyResult<PySolveResult> {
    let r = match mode {
        "exact" => ttrans_core::solve_exact(&g.inner, &t.inner, budget),
        "approx" => ttrans_core::approx_local_ratio(&g.inner, &t.inner),
        other => return Err(val_err(format!("unknown mode {other:?}"))),
    };
    Ok(r.into())
}

/// Minimum hypergraph vertex cover, exact or greedy.
#[pyfunction]
#[pyo3(signature = (h, mode = "exact", budget = DEFAULT_NODE_BUDGET))]
fn solve_hvc(h: &PyHypergraph, mode: &str, budget: u64) -> PyResult<PySolveResult> {
    let r = match mode {
        "exact" => ttrans_core::hvc_exact(&h.inner, budget),
        "greedy" => ttrans_core::hvc_greedy(&h.inner),
        other => return Err(val_err(format!("unknown mode {other:?}"))),
    };
    Ok(r.into())
}

/// Seeded d-uniform random hypergraph with distinct hyperedges.
#[pyfunction]
#[pyo3(signature = (n, m, d, seed = 1))]
fn gen_hvc(n: usize, m: usize, d: usize, seed: u64) -> PyResult<PyHypergraph> {
    Ok(PyHypergraph {
        inner: ttrans_core::experiment::gen_hvc_instance(n, m, d, seed).map_err(val_err)?,
    })
}

/// Reduction parameters for an instance in the given mode, without
/// materializing anything.
#[pyfunction]
#[pyo3(signature = (h, t, mode = "structural", b = None, cap = DEFAULT_SIZE_CAP))]
fn plan(
    h: &PyHypergraph,
    t: &PyTreePattern,
    mode: &str,
    b: Option<usize>,
    cap: u128,
) -> PyResult<PyPlan> {
    let mode = ttrans_core::PlanMode::from_name(mode)
        .ok_or_else(|| val_err(format!("unknown mode {mode:?}")))?;
    Ok(ttrans_core::plan_parameters(&h.inner, &t.inner, mode, b, cap)
        .map_err(val_err)?
        .into())
}

/// Materializes the incidence graph of the cloud-and-copies extension.
/// Cloud vertex `(v, i)` gets id `v*b + i`; hyperedge copies follow.
#[pyfunction]
#[pyo3(signature = (h, b, c, cap = DEFAULT_SIZE_CAP))]
fn incidence(h: &PyHypergraph, b: usize, c: usize, cap: u128) -> PyResult<PyGraph> {
    let hp = ttrans_core::extend_hypergraph(&h.inner, b, c, cap).map_err(val_err)?;
    let params = ReductionParams::new(b, c, 0, ttrans_core::Eps::one_half())
        .ok_or_else(|| val_err("b and c must be positive"))?;
    let artifacts = ttrans_core::incidence_graph(&hp, params).map_err(val_err)?;
    Ok(PyGraph { inner: artifacts.g })
}

/// Checks the completeness direction: `cover` covers `h`, and its lift
/// leaves an incidence graph certified free of the pattern. Returns
/// `(passed, report_text)`.
#[pyfunction]
#[pyo3(signature = (h, t, cover, b, c, cap = DEFAULT_SIZE_CAP, detect_limit = 60))]
fn verify_completeness(
    h: &PyHypergraph,
    t: &PyTreePattern,
    cover: Vec<usize>,
    b: usize,
    c: usize,
    cap: u128,
    detect_limit: usize,
) -> PyResult<(bool, String)> {
    let params = ReductionParams::new(b, c, 0, ttrans_core::Eps::one_half())
        .ok_or_else(|| val_err("b and c must be positive"))?;
    let s: VertexSet = cover.into_iter().collect();
    let report =
        ttrans_core::verify_completeness(&h.inner, &t.inner, &s, params, cap, detect_limit)
            .map_err(val_err)?;
    Ok((report.pass, report.render()))
}

/// Occupancy analysis of a candidate transversal `r` (incidence-graph
/// ids) at the given slack.
#[pyfunction]
#[pyo3(signature = (h, r, b, c = 1, slack = 0))]
fn classify(
    h: &PyHypergraph,
    r: Vec<usize>,
    b: usize,
    c: usize,
    slack: u128,
) -> PyResult<PyOccupancy> {
    let hp = ttrans_core::extend_hypergraph(&h.inner, b, c, u128::MAX).map_err(val_err)?;
    let r: VertexSet = r.into_iter().collect();
    let occ = ttrans_core::classify_occupied(&hp, &r, slack).map_err(val_err)?;
    Ok(PyOccupancy {
        threshold: occ.threshold,
        occupied: occ.occupied.iter().collect(),
        free_hyperedges: occ.free_hyperedges.clone(),
        projected_out: occ.projected_out.iter().collect(),
        r_cloud_size: occ.r_cloud_size,
        counting_bound_ok: occ.counting_bound_ok,
        derived_cover: occ.derived_cover().iter().collect(),
    })
}

/// Minimum slack the witness construction needs for this pattern.
/// Raises OverflowError past 128 bits.
#[pyfunction]
fn witness_requirement(t: &PyTreePattern) -> PyResult<u128> {
    ttrans_core::witness_requirement(&t.inner)
        .ok_or_else(|| PyOverflowError::new_err("requirement exceeds 128 bits"))
}

/// Builds the witness tree over a free hyperedge, avoiding `r`. The
/// extension is handled arithmetically, so `b` may be far past anything
/// materializable. Returns `(summary_text, embedding)` with the
/// embedding as wide incidence-graph ids.
#[pyfunction]
#[pyo3(signature = (h, t, base_edge, r, w, b, c = 1))]
fn build_witness(
    h: &PyHypergraph,
    t: &PyTreePattern,
    base_edge: usize,
    r: Vec<usize>,
    w: u128,
    b: usize,
    c: usize,
) -> PyResult<(String, Vec<u128>)> {
    let hp = ttrans_core::extend_hypergraph(&h.inner, b, c, u128::MAX).map_err(val_err)?;
    let r: VertexSet = r.into_iter().collect();
    let wit = ttrans_core::build_witness(&hp, &t.inner, base_edge, &r, w).map_err(val_err)?;
    Ok((wit.tree.summary(), wit.embedding.map().to_vec()))
}

#[pymodule]
fn ttransversal(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyHypergraph>()?;
    m.add_class::<PyTreePattern>()?;
    m.add_class::<PySolveResult>()?;
    m.add_class::<PyPlan>()?;
    m.add_class::<PyOccupancy>()?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(certify_absence, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(solve_hvc, m)?)?;
    m.add_function(wrap_pyfunction!(gen_hvc, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(incidence, m)?)?;
    m.add_function(wrap_pyfunction!(verify_completeness, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(build_witness, m)?)?;
    m.add_function(wrap_pyfunction!(witness_requirement, m)?)?;
    Ok(())
}

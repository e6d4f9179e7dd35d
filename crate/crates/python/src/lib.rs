//! Python module `pyhypthick`. Reports come back as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use hypthick::arithmetic::{
    dobrowolski_bound as dob_bound, is_cyclotomic_product, mahler_measure as mahler, simplex_budget, BoundConstants,
    IntPolynomial,
};
use hypthick::constructions::shipped_group_json;
use hypthick::embedding::kb::kb_embed_with;
use hypthick::embedding::{
    falconer_direction, neighborhood_volume, verify_thickness, EmbeddedGraph, FalconerParams, KbParams,
};
use hypthick::group::GroupSpec;
use hypthick::io::{self, Mesh};
use hypthick::skeleton::{cheeger_exact, cheeger_spectral, random_connected_regular, SkeletonGraph, EXACT_LIMIT};
use hypthick::voronoi::{check_good, degree_and_count_report, sample_singular_points, triangulate as run_pipeline, PipelineParams};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (s,))
}

fn poly(coeffs: Vec<i64>) -> PyResult<IntPolynomial> {
    IntPolynomial::from_i64(&coeffs).map_err(err)
}

/// Discrete group of hyperbolic isometries.
#[pyclass(name = "Group", module = "pyhypthick", frozen)]
struct PyGroup(GroupSpec);

#[pymethods]
impl PyGroup {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        GroupSpec::from_json(text).map(Self).map_err(err)
    }

    /// A bundled group such as `triangle_2_3_7`.
    #[staticmethod]
    fn shipped(name: &str) -> PyResult<Self> {
        let text = shipped_group_json(name).ok_or_else(|| err(format!("no shipped group `{name}`")))?;
        Self::from_json(text)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.0.to_file()).map_err(err)
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label.clone()
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    #[getter]
    fn volume(&self) -> Option<f64> {
        self.0.volume
    }

    fn __repr__(&self) -> String {
        format!("Group({:?}, dimension={})", self.0.label, self.0.dimension())
    }
}

/// Finite simple graph.
#[pyclass(name = "Graph", module = "pyhypthick", frozen)]
struct PyGraph(SkeletonGraph);

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        SkeletonGraph::new(n, &edges).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, degree, seed = 1))]
    fn random_regular(n: usize, degree: usize, seed: u64) -> PyResult<Self> {
        random_connected_regular(n, degree, seed).map(Self).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_graph(text).map(Self).map_err(err)
    }

    fn to_text(&self) -> String {
        io::graph_to_text(&self.0)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.0.vertex_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().to_vec()
    }

    /// Edge-expansion bounds; `method` is `auto`, `exact` or `spectral`.
    #[pyo3(signature = (method = "auto"))]
    fn cheeger<'py>(&self, py: Python<'py>, method: &str) -> PyResult<Bound<'py, PyAny>> {
        let est = match method {
            "exact" => cheeger_exact(&self.0),
            "spectral" => cheeger_spectral(&self.0),
            "auto" if self.0.vertex_count() <= EXACT_LIMIT => cheeger_exact(&self.0),
            "auto" => cheeger_spectral(&self.0),
            m => return Err(err(format!("unknown method `{m}`"))),
        }
        .map_err(err)?;
        to_py(py, &est)
    }

    /// Thick embedding in dimension `dim`.
    #[pyo3(signature = (dim = 3, seed = 1))]
    fn embed(&self, dim: usize, seed: u64) -> PyResult<PyEmbedding> {
        let kb = kb_embed_with(&self.0, dim, seed, &KbParams::default()).map_err(err)?;
        Ok(PyEmbedding(kb.graph))
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.0.vertex_count(), self.0.edge_count())
    }
}

/// Graph drawn in Euclidean space with polyline edges.
#[pyclass(name = "Embedding", module = "pyhypthick", frozen)]
struct PyEmbedding(EmbeddedGraph);

#[pymethods]
impl PyEmbedding {
    #[new]
    fn new(vertices: Vec<Vec<f64>>, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        let dim = vertices.first().map_or(0, |v| v.len());
        EmbeddedGraph::straight(dim, vertices, &edges).map(Self).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_embedding(text).map(Self).map_err(err)
    }

    fn to_text(&self) -> String {
        io::embedding_to_text(&self.0)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.0.vertices.clone()
    }

    /// Polylines of the edges, endpoints included.
    #[getter]
    fn paths(&self) -> Vec<Vec<Vec<f64>>> {
        self.0.edges.iter().map(|e| e.path.clone()).collect()
    }

    fn verify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &verify_thickness(&self.0))
    }

    /// Monte Carlo volume of the unit neighborhood, as `(value, stderr)`.
    #[pyo3(signature = (samples = 1_000_000, seed = 1))]
    fn volume(&self, samples: usize, seed: u64) -> PyResult<(f64, f64)> {
        let v = neighborhood_volume(&self.0, 1.0, samples, seed).map_err(err)?;
        Ok((v.value, v.stderr))
    }

    /// Direction search for the largest slab count and slice area.
    #[pyo3(signature = (trials = 32, samples = 200_000, seed = 1))]
    fn slices<'py>(&self, py: Python<'py>, trials: usize, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let p = FalconerParams {
            trials,
            volume_samples: samples,
            ..FalconerParams::default()
        };
        to_py(py, &falconer_direction(&self.0, 1.0, &p, seed).map_err(err)?)
    }
}

/// Triangulation of a group quotient with its checks.
#[pyclass(name = "Triangulation", module = "pyhypthick", frozen)]
struct PyTriangulation {
    mesh: Mesh,
    report: serde_json::Value,
}

#[pymethods]
impl PyTriangulation {
    #[getter]
    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.report)
    }

    #[getter]
    fn euler_characteristic(&self) -> i64 {
        self.report["euler_characteristic"].as_i64().unwrap_or_default()
    }

    #[getter]
    fn ok(&self) -> bool {
        self.report["ok"].as_bool().unwrap_or(false)
    }

    fn mesh_text(&self) -> String {
        self.mesh.to_text()
    }

    fn skeleton(&self) -> PyResult<PyGraph> {
        self.mesh.skeleton().map(PyGraph).map_err(err)
    }
}

#[pyfunction]
#[pyo3(signature = (group, epsilon, seed = 1))]
fn triangulate(group: &PyGroup, epsilon: f64, seed: u64) -> PyResult<PyTriangulation> {
    let spec = &group.0;
    let out = run_pipeline(spec, &PipelineParams::new(epsilon, seed)).map_err(err)?;
    let t = &out.triangulation;
    let pm = t.verify_pseudomanifold();
    let sing = sample_singular_points(t, 200, out.complex.neighbor_radius, seed ^ 0x51);
    let good = check_good(t, &sing).map_err(err)?;
    let mut orders: Vec<usize> = good.singular_points.iter().map(|w| w.stabilizer_order).collect();
    orders.sort_unstable();
    let q = spec.q.map(|q| q as usize).unwrap_or(out.q);
    let degree = degree_and_count_report(t, &out.complex, q, out.volume, BoundConstants::default().mu_n);
    let report = serde_json::json!({
        "ok": pm.ok && good.ok && degree.all_hold,
        "sites": out.set.len(),
        "counts": t.counts(),
        "euler_characteristic": t.euler_characteristic(),
        "volume": out.volume,
        "q": q,
        "cone_point_orders": orders,
        "pseudomanifold": pm,
        "goodness": good,
        "degree_report": degree,
    });
    Ok(PyTriangulation {
        mesh: Mesh::from_triangulation(t),
        report,
    })
}

/// Mahler measure with a certified enclosure, coefficients constant term first.
#[pyfunction]
#[pyo3(signature = (coeffs, precision = 1e-9))]
fn mahler_measure<'py>(py: Python<'py>, coeffs: Vec<i64>, precision: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &mahler(&poly(coeffs)?, precision).map_err(err)?)
}

#[pyfunction]
fn is_cyclotomic(coeffs: Vec<i64>) -> PyResult<bool> {
    Ok(is_cyclotomic_product(&poly(coeffs)?))
}

#[pyfunction]
#[pyo3(signature = (degree, c1 = 0.25))]
fn dobrowolski_bound(degree: u64, c1: f64) -> PyResult<f64> {
    dob_bound(degree, c1).map_err(err)
}

/// Volume bound chain with default constants.
#[pyfunction]
#[pyo3(signature = (vol, n = 3, delta = 0.1))]
fn bounds<'py>(py: Python<'py>, vol: f64, n: usize, delta: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &simplex_budget(vol, n, delta, &BoundConstants::default()).map_err(err)?)
}

#[pymodule]
fn pyhypthick(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyEmbedding>()?;
    m.add_class::<PyTriangulation>()?;
    m.add_function(wrap_pyfunction!(triangulate, m)?)?;
    m.add_function(wrap_pyfunction!(mahler_measure, m)?)?;
    m.add_function(wrap_pyfunction!(is_cyclotomic, m)?)?;
    m.add_function(wrap_pyfunction!(dobrowolski_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    Ok(())
}

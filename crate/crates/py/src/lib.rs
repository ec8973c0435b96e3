//! Python bindings: a `Graph` class wrapping the property graph, with the
//! query language, algorithms, layouts, set operations and interchange.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use grafion_core::algorithms::{self, Mode, PageRankConfig, WeightSpec};
use grafion_core::io::{self, CsvOptions};
use grafion_core::layout::{self, LayoutMap};
use grafion_core::ops;
use grafion_core::query::{self, ExecContext, Params, Value};
use grafion_core::{ElementRef, GraphKind, NodeId, Properties, PropertyGraph, PropertyValue};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyInt, PyList, PyString};
use serde_json::Value as Json;

create_exception!(grafion, GrafionError, PyException, "Any failure raised by the engine.");
create_exception!(
    grafion,
    QueryError,
    GrafionError,
    "A query failed. `args` is `(message, offset)`; offset is None when the error has no position."
);

fn err(e: impl std::fmt::Display) -> PyErr {
    GrafionError::new_err(e.to_string())
}

fn query_err(e: query::QueryError) -> PyErr {
    QueryError::new_err((e.to_string(), e.offset()))
}

fn property(obj: &Bound<'_, PyAny>) -> PyResult<PropertyValue> {
    if obj.is_none() {
        Ok(PropertyValue::Null)
    } else if obj.is_instance_of::<PyBool>() {
        Ok(PropertyValue::Bool(obj.extract()?))
    } else if obj.is_instance_of::<PyInt>() {
        Ok(PropertyValue::Int(obj.extract()?))
    } else if obj.is_instance_of::<PyFloat>() {
        PropertyValue::float(obj.extract()?).map_err(err)
    } else if obj.is_instance_of::<PyString>() {
        Ok(PropertyValue::Text(obj.extract()?))
    } else {
        Err(err(format!("unsupported property value {}", obj.repr()?)))
    }
}

fn properties(dict: Option<&Bound<'_, PyDict>>) -> PyResult<Properties> {
    let mut out = Properties::new();
    if let Some(d) = dict {
        for (k, v) in d.iter() {
            out.insert(k.extract()?, property(&v)?);
        }
    }
    Ok(out)
}

fn to_json(obj: &Bound<'_, PyAny>) -> PyResult<Json> {
    if let Ok(list) = obj.cast::<PyList>() {
        return list.iter().map(|v| to_json(&v)).collect::<PyResult<Vec<_>>>().map(Json::Array);
    }
    if let Ok(dict) = obj.cast::<PyDict>() {
        let mut map = serde_json::Map::new();
        for (k, v) in dict.iter() {
            map.insert(k.extract()?, to_json(&v)?);
        }
        return Ok(Json::Object(map));
    }
    Ok(match property(obj)? {
        PropertyValue::Null => Json::Null,
        PropertyValue::Bool(b) => Json::Bool(b),
        PropertyValue::Int(i) => Json::from(i),
        PropertyValue::Float(f) => Json::from(f),
        PropertyValue::Text(s) => Json::String(s),
    })
}

fn from_json<'py>(py: Python<'py>, v: &Json) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Json::Null => py.None().into_bound(py),
        Json::Bool(b) => PyBool::new(py, *b).to_owned().into_any(),
        Json::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Json::String(s) => s.into_pyobject(py)?.into_any(),
        Json::Array(items) => {
            PyList::new(py, items.iter().map(|i| from_json(py, i)).collect::<PyResult<Vec<_>>>()?)?.into_any()
        }
        Json::Object(map) => {
            let d = PyDict::new(py);
            for (k, v) in map {
                d.set_item(k, from_json(py, v)?)?;
            }
            d.into_any()
        }
    })
}

fn weights(key: Option<String>) -> WeightSpec {
    key.map_or_else(WeightSpec::unweighted, WeightSpec::key)
}

fn mode(normalized: bool) -> Mode {
    if normalized {
        Mode::Normalized
    } else {
        Mode::Raw
    }
}

fn positions(layout: LayoutMap) -> BTreeMap<NodeId, (f64, f64)> {
    layout.into_iter().map(|(id, p)| (id, (p.x, p.y))).collect()
}

#[pyclass(module = "grafion")]
struct Graph {
    inner: PropertyGraph,
}

#[pymethods]
impl Graph {
    #[new]
    #[pyo3(signature = (directed = true))]
    fn new(directed: bool) -> Self {
        let kind = if directed { GraphKind::Directed } else { GraphKind::Undirected };
        Graph { inner: PropertyGraph::new(kind) }
    }

    #[getter]
    fn directed(&self) -> bool {
        self.inner.is_directed()
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn __len__(&self) -> usize {
        self.inner.node_count()
    }

    fn __repr__(&self) -> String {
        let kind = if self.inner.is_directed() { "directed" } else { "undirected" };
        format!("<Graph {kind} nodes={} edges={}>", self.inner.node_count(), self.inner.edge_count())
    }

    fn __eq__(&self, other: &Graph) -> bool {
        self.inner == other.inner
    }

    #[pyo3(signature = (labels = Vec::new(), properties = None))]
    fn add_node(&mut self, labels: Vec<String>, properties: Option<&Bound<'_, PyDict>>) -> PyResult<NodeId> {
        Ok(self.inner.add_node(labels, self::properties(properties)?))
    }

    /// Adds an edge, or merges properties into the existing one with the
    /// same endpoints and type. Returns the edge id.
    #[pyo3(signature = (source, target, rel_type, properties = None))]
    fn add_edge(&mut self, source: NodeId, target: NodeId, rel_type: &str, properties: Option<&Bound<'_, PyDict>>) -> PyResult<u64> {
        self.inner.add_edge(source, target, rel_type, self::properties(properties)?).map_err(err)
    }

    /// Removes a node; with `detach`, its edges too. Returns the number of
    /// edges removed.
    #[pyo3(signature = (id, detach = false))]
    fn remove_node(&mut self, id: NodeId, detach: bool) -> PyResult<usize> {
        self.inner.remove_node(id, detach).map_err(err)
    }

    fn remove_edge(&mut self, source: NodeId, target: NodeId, rel_type: &str) -> PyResult<()> {
        self.inner.remove_edge(source, target, rel_type).map_err(err)
    }

    /// Merges properties into a node; None values delete keys.
    fn set_node_properties(&mut self, id: NodeId, properties: &Bound<'_, PyDict>) -> PyResult<usize> {
        self.inner.set_properties(ElementRef::Node(id), self::properties(Some(properties))?).map_err(err)
    }

    fn node<'py>(&self, py: Python<'py>, id: NodeId) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.inner.node(id).map(|n| from_json(py, &Value::Node(n.clone()).to_json())).transpose()
    }

    fn edge<'py>(&self, py: Python<'py>, id: u64) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.inner.edge(id).map(|e| from_json(py, &Value::Edge(e.clone()).to_json())).transpose()
    }

    fn nodes<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.nodes().map(|n| from_json(py, &Value::Node(n.clone()).to_json())).collect()
    }

    fn edges<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.edges().map(|e| from_json(py, &Value::Edge(e.clone()).to_json())).collect()
    }

    fn create_index(&mut self, label: &str, key: &str) -> PyResult<()> {
        self.inner.create_property_index(label, key).map_err(err)
    }

    fn density(&self) -> PyResult<f64> {
        self.inner.density().map_err(err)
    }

    fn fingerprint(&self) -> u64 {
        self.inner.fingerprint()
    }

    /// Runs one statement. Returns `{"columns", "rows", "summary"}`; a
    /// failing write leaves the graph unchanged.
    #[pyo3(signature = (text, params = None, import_dir = None))]
    fn query<'py>(
        &mut self,
        py: Python<'py>,
        text: &str,
        params: Option<&Bound<'py, PyDict>>,
        import_dir: Option<PathBuf>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let mut p = Params::new();
        if let Some(d) = params {
            for (k, v) in d.iter() {
                p.insert(k.extract()?, Value::from_json(&to_json(&v)?).map_err(err)?);
            }
        }
        let ctx = ExecContext { import_dir };
        let rs = query::run(&mut self.inner, text, &p, &ctx).map_err(query_err)?;
        from_json(py, &rs.to_json())
    }

    fn to_json(&self) -> PyResult<String> {
        io::to_json(&self.inner).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Graph> {
        Ok(Graph { inner: io::from_json(text).map_err(err)? })
    }

    /// Writes the whole graph as CSV. Returns `(nodes, edges)` written.
    #[pyo3(signature = (path, delimiter = ',', use_types = false))]
    fn export_csv(&self, path: PathBuf, delimiter: char, use_types: bool) -> PyResult<(usize, usize)> {
        let options = CsvOptions { delimiter: ascii(delimiter)?, use_types, kind: self.inner.kind() };
        let c = io::export_csv_all(&self.inner, &path, &options).map_err(err)?;
        Ok((c.nodes, c.edges))
    }

    #[staticmethod]
    #[pyo3(signature = (path, delimiter = ',', use_types = false, directed = true))]
    fn import_csv(path: PathBuf, delimiter: char, use_types: bool, directed: bool) -> PyResult<Graph> {
        let kind = if directed { GraphKind::Directed } else { GraphKind::Undirected };
        let options = CsvOptions { delimiter: ascii(delimiter)?, use_types, kind };
        Ok(Graph { inner: io::import_csv_all(&path, &options).map_err(err)? })
    }

    #[pyo3(signature = (damping = 0.85, weight_key = None, max_iter = 1000, tol = 1e-9))]
    fn pagerank(&self, damping: f64, weight_key: Option<String>, max_iter: usize, tol: f64) -> PyResult<BTreeMap<NodeId, f64>> {
        let config = PageRankConfig { damping, weights: weight_key.map(WeightSpec::key), max_iter, tol };
        algorithms::pagerank(&self.inner, &config).map_err(err)
    }

    #[pyo3(signature = (normalized = true))]
    fn degree_centrality(&self, normalized: bool) -> PyResult<BTreeMap<NodeId, f64>> {
        algorithms::degree_centrality(&self.inner, mode(normalized)).map_err(err)
    }

    #[pyo3(signature = (normalized = true))]
    fn closeness_centrality(&self, normalized: bool) -> PyResult<BTreeMap<NodeId, f64>> {
        algorithms::closeness_centrality(&self.inner, mode(normalized)).map_err(err)
    }

    #[pyo3(signature = (normalized = true))]
    fn betweenness_centrality(&self, normalized: bool) -> PyResult<BTreeMap<NodeId, f64>> {
        algorithms::betweenness_centrality(&self.inner, mode(normalized)).map_err(err)
    }

    #[pyo3(signature = (max_iter = 1000, tol = 1e-9))]
    fn eigenvector_centrality(&self, max_iter: usize, tol: f64) -> PyResult<BTreeMap<NodeId, f64>> {
        algorithms::eigenvector_centrality(&self.inner, max_iter, tol).map_err(err)
    }

    /// Returns `(communities, modularity)`.
    #[pyo3(signature = (weight_key = None))]
    fn louvain(&self, weight_key: Option<String>) -> PyResult<(Vec<BTreeSet<NodeId>>, f64)> {
        let r = algorithms::louvain(&self.inner, &weights(weight_key)).map_err(err)?;
        Ok((r.partition.communities(), r.modularity))
    }

    fn connected_components(&self) -> PyResult<Vec<BTreeSet<NodeId>>> {
        algorithms::connected_components(&self.inner).map_err(err)
    }

    /// Returns `(path, cost)`.
    #[pyo3(signature = (source, target, weight_key = None))]
    fn dijkstra(&self, source: NodeId, target: NodeId, weight_key: Option<String>) -> PyResult<(Vec<NodeId>, f64)> {
        let p = algorithms::dijkstra(&self.inner, source, target, &weights(weight_key)).map_err(err)?;
        Ok((p.nodes, p.cost))
    }

    fn circular_layout(&self) -> PyResult<BTreeMap<NodeId, (f64, f64)>> {
        layout::circular_layout(&self.inner).map(positions).map_err(err)
    }

    fn spectral_layout(&self) -> PyResult<BTreeMap<NodeId, (f64, f64)>> {
        layout::spectral_layout(&self.inner).map(positions).map_err(err)
    }

    #[pyo3(signature = (iterations = 50, seed = 0))]
    fn spring_layout(&self, iterations: usize, seed: u64) -> PyResult<BTreeMap<NodeId, (f64, f64)>> {
        layout::spring_layout(&self.inner, iterations, seed).map(positions).map_err(err)
    }

    fn union(&self, other: &Graph) -> PyResult<Graph> {
        Ok(Graph { inner: ops::union(&self.inner, &other.inner).map_err(err)? })
    }

    fn intersection(&self, other: &Graph) -> PyResult<Graph> {
        Ok(Graph { inner: ops::intersection(&self.inner, &other.inner).map_err(err)? })
    }

    fn difference(&self, other: &Graph) -> PyResult<Graph> {
        Ok(Graph { inner: ops::difference(&self.inner, &other.inner).map_err(err)? })
    }

    fn induced_subgraph(&self, nodes: BTreeSet<NodeId>) -> PyResult<Graph> {
        Ok(Graph { inner: ops::induced_subgraph(&self.inner, &nodes).map_err(err)? })
    }
}

fn ascii(c: char) -> PyResult<u8> {
    if c.is_ascii() {
        Ok(c as u8)
    } else {
        Err(err(format!("delimiter {c:?} is not ASCII")))
    }
}

#[pymodule]
fn grafion(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add("GrafionError", m.py().get_type::<GrafionError>())?;
    m.add("QueryError", m.py().get_type::<QueryError>())?;
    Ok(())
}

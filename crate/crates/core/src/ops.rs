//! Subgraph extraction, filtering, sampling, and graph set operations.
//!
//! Set operations match nodes across graphs by a canonical key: the `name`
//! property when a node has one, otherwise its raw id. Edges match by the
//! keys of their endpoints plus their type (endpoint order is ignored for
//! undirected graphs).

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IteratorRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Direction, EdgeId, ElementRef, GraphError, GraphKind, NodeId, PropertyGraph};
use crate::value::PropertyValue;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cannot sample {k} nodes from a graph of {n}")]
    SampleTooLarge { k: usize, n: usize },
    #[error("graph kinds differ: {0} vs {1}")]
    KindMismatch(GraphKind, GraphKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn holds(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            CmpOp::Eq => ord == Equal,
            CmpOp::Ne => ord != Equal,
            CmpOp::Lt => ord == Less,
            CmpOp::Le => ord != Greater,
            CmpOp::Gt => ord == Greater,
            CmpOp::Ge => ord != Less,
        }
    }

    /// Null or incomparable operands never satisfy a comparison.
    fn apply(self, lhs: &PropertyValue, rhs: &PropertyValue) -> bool {
        lhs.compare(rhs).is_some_and(|o| self.holds(o))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodePredicate {
    Degree { op: CmpOp, value: usize },
    Property { key: String, op: CmpOp, value: PropertyValue },
    HasLabel(String),
    Member(BTreeSet<NodeId>),
    All(Vec<NodePredicate>),
}

impl NodePredicate {
    pub fn min_degree(value: usize) -> Self {
        NodePredicate::Degree { op: CmpOp::Ge, value }
    }

    pub fn property(key: impl Into<String>, op: CmpOp, value: impl Into<PropertyValue>) -> Self {
        NodePredicate::Property { key: key.into(), op, value: value.into() }
    }

    pub fn matches(&self, g: &PropertyGraph, id: NodeId) -> bool {
        let Some(node) = g.node(id) else { return false };
        match self {
            NodePredicate::Degree { op, value } => {
                let d = g.degree(id, Direction::All).unwrap_or(0);
                op.holds(d.cmp(value))
            }
            NodePredicate::Property { key, op, value } => {
                node.get(key).is_some_and(|v| op.apply(v, value))
            }
            NodePredicate::HasLabel(label) => node.has_label(label),
            NodePredicate::Member(set) => set.contains(&id),
            NodePredicate::All(parts) => parts.iter().all(|p| p.matches(g, id)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgePredicate {
    /// Compares a property; edges lacking the key use `missing` instead
    /// (and fail when `missing` is `None`).
    Property { key: String, op: CmpOp, value: PropertyValue, missing: Option<PropertyValue> },
    HasType(String),
    Member(BTreeSet<EdgeId>),
    All(Vec<EdgePredicate>),
}

impl EdgePredicate {
    /// `weight > threshold`, with a missing weight read as 0.
    pub fn weight_above(key: impl Into<String>, threshold: impl Into<PropertyValue>) -> Self {
        EdgePredicate::Property {
            key: key.into(),
            op: CmpOp::Gt,
            value: threshold.into(),
            missing: Some(PropertyValue::Int(0)),
        }
    }

    pub fn matches(&self, g: &PropertyGraph, id: EdgeId) -> bool {
        let Some(edge) = g.edge(id) else { return false };
        match self {
            EdgePredicate::Property { key, op, value, missing } => {
                match edge.get(key).or(missing.as_ref()) {
                    Some(v) => op.apply(v, value),
                    None => false,
                }
            }
            EdgePredicate::HasType(t) => &edge.rel_type == t,
            EdgePredicate::Member(set) => set.contains(&id),
            EdgePredicate::All(parts) => parts.iter().all(|p| p.matches(g, id)),
        }
    }
}

/// The given nodes plus every edge with both endpoints among them. Ids,
/// labels and properties are preserved.
pub fn induced_subgraph(g: &PropertyGraph, nodes: &BTreeSet<NodeId>) -> Result<PropertyGraph, OpsError> {
    let mut out = PropertyGraph::new(g.kind());
    for &id in nodes {
        let node = g.node(id).ok_or(GraphError::UnknownNode(id))?;
        out.insert_node(id, node.labels.clone(), node.properties.clone())?;
    }
    for edge in g.edges() {
        if nodes.contains(&edge.source) && nodes.contains(&edge.target) {
            out.insert_edge(edge.id, edge.source, edge.target, &edge.rel_type, edge.properties.clone())?;
        }
    }
    Ok(out)
}

/// The given edges plus their endpoints.
pub fn edge_subgraph(g: &PropertyGraph, edges: &BTreeSet<EdgeId>) -> Result<PropertyGraph, OpsError> {
    let mut records = Vec::with_capacity(edges.len());
    let mut nodes = BTreeSet::new();
    for &id in edges {
        let edge = g.edge(id).ok_or_else(|| GraphError::UnknownEdge(id.to_string()))?;
        nodes.insert(edge.source);
        nodes.insert(edge.target);
        records.push(edge);
    }
    let mut out = PropertyGraph::new(g.kind());
    for id in nodes {
        let node = g.node(id).expect("live endpoint");
        out.insert_node(id, node.labels.clone(), node.properties.clone())?;
    }
    for edge in records {
        out.insert_edge(edge.id, edge.source, edge.target, &edge.rel_type, edge.properties.clone())?;
    }
    Ok(out)
}

pub fn filter_nodes(g: &PropertyGraph, predicate: &NodePredicate) -> BTreeSet<NodeId> {
    g.node_ids().into_iter().filter(|&id| predicate.matches(g, id)).collect()
}

pub fn filter_edges(g: &PropertyGraph, predicate: &EdgePredicate) -> BTreeSet<EdgeId> {
    g.edge_ids().into_iter().filter(|&id| predicate.matches(g, id)).collect()
}

/// Uniform sample of `k` nodes without replacement, reproducible per seed.
pub fn sample_nodes(g: &PropertyGraph, k: usize, seed: u64) -> Result<BTreeSet<NodeId>, OpsError> {
    let n = g.node_count();
    if k > n {
        return Err(OpsError::SampleTooLarge { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(g.node_ids().into_iter().choose_multiple(&mut rng, k).into_iter().collect())
}

/// Cross-graph identity of a node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKey {
    Name(PropertyValue),
    Id(NodeId),
}

pub fn node_key(g: &PropertyGraph, id: NodeId) -> NodeKey {
    match g.node(id).and_then(|n| n.get("name")) {
        Some(name) => NodeKey::Name(name.clone()),
        None => NodeKey::Id(id),
    }
}

/// Cross-graph identity of an edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgeKey {
    pub source: NodeKey,
    pub target: NodeKey,
    pub rel_type: String,
}

pub fn edge_key(g: &PropertyGraph, id: EdgeId) -> Option<EdgeKey> {
    let e = g.edge(id)?;
    let (mut source, mut target) = (node_key(g, e.source), node_key(g, e.target));
    if !g.is_directed() && target < source {
        std::mem::swap(&mut source, &mut target);
    }
    Some(EdgeKey { source, target, rel_type: e.rel_type.clone() })
}

/// First node (lowest id) per key.
fn key_table(g: &PropertyGraph) -> BTreeMap<NodeKey, NodeId> {
    let mut table = BTreeMap::new();
    for id in g.node_ids() {
        table.entry(node_key(g, id)).or_insert(id);
    }
    table
}

fn edge_key_set(g: &PropertyGraph) -> BTreeSet<EdgeKey> {
    g.edge_ids().into_iter().filter_map(|e| edge_key(g, e)).collect()
}

fn same_kind(g1: &PropertyGraph, g2: &PropertyGraph) -> Result<(), OpsError> {
    if g1.kind() != g2.kind() {
        return Err(OpsError::KindMismatch(g1.kind(), g2.kind()));
    }
    Ok(())
}

/// All nodes and edges of both graphs. On a key collision the second
/// graph's properties overwrite the first's key by key and labels are
/// merged.
pub fn union(g1: &PropertyGraph, g2: &PropertyGraph) -> Result<PropertyGraph, OpsError> {
    same_kind(g1, g2)?;
    let mut out = g1.clone();
    let table = key_table(g1);
    let mut mapping: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    let mut fresh = out.next_node_id().max(g2.next_node_id());

    for node in g2.nodes() {
        let key = node_key(g2, node.id);
        if let Some(&existing) = table.get(&key) {
            out.add_labels(existing, node.labels.iter().cloned())?;
            out.set_properties(ElementRef::Node(existing), node.properties.clone())?;
            mapping.insert(node.id, existing);
        } else {
            let id = if out.contains_node(node.id) {
                fresh += 1;
                fresh - 1
            } else {
                node.id
            };
            out.insert_node(id, node.labels.clone(), node.properties.clone())?;
            mapping.insert(node.id, id);
        }
    }
    let mut fresh_edge = g1.edge_ids().last().map_or(0, |e| e + 1).max(g2.edge_ids().last().map_or(0, |e| e + 1));
    for edge in g2.edges() {
        let (s, t) = (mapping[&edge.source], mapping[&edge.target]);
        if let Some(existing) = out.find_edge(s, t, &edge.rel_type) {
            out.set_properties(ElementRef::Edge(existing), edge.properties.clone())?;
        } else {
            let id = if out.edge(edge.id).is_some() {
                fresh_edge += 1;
                fresh_edge - 1
            } else {
                edge.id
            };
            out.insert_edge(id, s, t, &edge.rel_type, edge.properties.clone())?;
        }
    }
    Ok(out)
}

/// Nodes present in both graphs and edges present in both, taken from the
/// first graph.
pub fn intersection(g1: &PropertyGraph, g2: &PropertyGraph) -> Result<PropertyGraph, OpsError> {
    same_kind(g1, g2)?;
    let keys2 = key_table(g2);
    let edges2 = edge_key_set(g2);
    let nodes: BTreeSet<NodeId> = g1
        .node_ids()
        .into_iter()
        .filter(|&id| keys2.contains_key(&node_key(g1, id)))
        .collect();
    let mut out = induced_subgraph(g1, &nodes)?;
    for id in out.edge_ids() {
        let key = edge_key(g1, id).expect("edge of g1");
        if !edges2.contains(&key) {
            out.remove_edge_by_id(id)?;
        }
    }
    Ok(out)
}

/// All nodes of the first graph and those of its edges absent from the
/// second.
pub fn difference(g1: &PropertyGraph, g2: &PropertyGraph) -> Result<PropertyGraph, OpsError> {
    same_kind(g1, g2)?;
    let edges2 = edge_key_set(g2);
    let mut out = g1.clone();
    for id in g1.edge_ids() {
        if edges2.contains(&edge_key(g1, id).expect("edge of g1")) {
            out.remove_edge_by_id(id)?;
        }
    }
    Ok(out)
}

//! The property-graph store: labeled nodes, typed edges, property maps,
//! adjacency, and equality indexes over node properties.
//!
//! Node and edge ids are dense integers handed out by the store and never
//! reused. All iteration is in ascending id order so that every derived
//! result is reproducible.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::value::{Properties, PropertyValue};

pub type NodeId = u64;
pub type EdgeId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Directed,
    Undirected,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Directed => "directed",
            GraphKind::Undirected => "undirected",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    In,
    Out,
    All,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("node {id} still has {degree} relationship(s); use DETACH DELETE")]
    NodeHasEdges { id: NodeId, degree: usize },
    #[error("graph needs at least 2 nodes, has {0}")]
    GraphTooSmall(usize),
    #[error("index on :{label}({key}) already exists")]
    IndexExists { label: String, key: String },
    #[error("labels must be nonempty")]
    EmptyLabel,
    #[error("relationship type must be nonempty")]
    EmptyType,
    #[error("id {0} is already in use")]
    DuplicateId(u64),
}

pub type Result<T> = std::result::Result<T, GraphError>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: NodeId,
    pub labels: BTreeSet<String>,
    pub properties: Properties,
}

impl NodeRecord {
    pub fn has_label(&self, label: &str) -> bool {
        self.labels.contains(label)
    }

    pub fn get(&self, key: &str) -> Option<&PropertyValue> {
        self.properties.get(key)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub source: NodeId,
    pub target: NodeId,
    pub rel_type: String,
    pub properties: Properties,
}

impl EdgeRecord {
    pub fn get(&self, key: &str) -> Option<&PropertyValue> {
        self.properties.get(key)
    }

    /// The endpoint opposite `node`. For a self-loop this is `node` itself.
    pub fn other(&self, node: NodeId) -> NodeId {
        if self.source == node {
            self.target
        } else {
            self.source
        }
    }
}

/// Reference to a node or an edge, used by property updates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementRef {
    Node(NodeId),
    Edge(EdgeId),
}

#[derive(Debug, Clone, Default)]
struct Adjacency {
    out: BTreeSet<EdgeId>,
    inc: BTreeSet<EdgeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct EdgeKey {
    a: NodeId,
    b: NodeId,
    rel_type: String,
}

/// Equality index over one `(label, key)` pair.
#[derive(Debug, Clone)]
pub struct PropertyIndex {
    pub label: String,
    pub key: String,
    entries: BTreeMap<PropertyValue, BTreeSet<NodeId>>,
}

impl PropertyIndex {
    pub fn lookup(&self, value: &PropertyValue) -> BTreeSet<NodeId> {
        self.entries.get(value).cloned().unwrap_or_default()
    }

    fn insert(&mut self, value: &PropertyValue, id: NodeId) {
        self.entries.entry(value.clone()).or_default().insert(id);
    }

    fn remove(&mut self, value: &PropertyValue, id: NodeId) {
        if let Some(set) = self.entries.get_mut(value) {
            set.remove(&id);
            if set.is_empty() {
                self.entries.remove(value);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct PropertyGraph {
    kind: GraphKind,
    nodes: BTreeMap<NodeId, NodeRecord>,
    edges: BTreeMap<EdgeId, EdgeRecord>,
    adjacency: BTreeMap<NodeId, Adjacency>,
    edge_keys: HashMap<EdgeKey, EdgeId>,
    indexes: BTreeMap<(String, String), PropertyIndex>,
    next_node: NodeId,
    next_edge: EdgeId,
}

/// Graph equality compares kind, nodes and edges. Id counters and indexes are
/// not part of a graph's identity.
impl PartialEq for PropertyGraph {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.nodes == other.nodes && self.edges == other.edges
    }
}

impl PropertyGraph {
    pub fn new(kind: GraphKind) -> Self {
        PropertyGraph {
            kind,
            nodes: BTreeMap::new(),
            edges: BTreeMap::new(),
            adjacency: BTreeMap::new(),
            edge_keys: HashMap::new(),
            indexes: BTreeMap::new(),
            next_node: 0,
            next_edge: 0,
        }
    }

    pub fn directed() -> Self {
        Self::new(GraphKind::Directed)
    }

    pub fn undirected() -> Self {
        Self::new(GraphKind::Undirected)
    }

    pub fn kind(&self) -> GraphKind {
        self.kind
    }

    pub fn is_directed(&self) -> bool {
        self.kind == GraphKind::Directed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn node(&self, id: NodeId) -> Option<&NodeRecord> {
        self.nodes.get(&id)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&EdgeRecord> {
        self.edges.get(&id)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeRecord> + '_ {
        self.nodes.values()
    }

    pub fn edges(&self) -> impl Iterator<Item = &EdgeRecord> + '_ {
        self.edges.values()
    }

    pub fn node_ids(&self) -> Vec<NodeId> {
        self.nodes.keys().copied().collect()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.keys().copied().collect()
    }

    /// Id the next `add_node` call will return.
    pub fn next_node_id(&self) -> NodeId {
        self.next_node
    }

    pub fn add_node<L, S>(&mut self, labels: L, properties: Properties) -> NodeId
    where
        L: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let id = self.next_node;
        let labels: BTreeSet<String> = labels
            .into_iter()
            .map(Into::into)
            .filter(|l: &String| !l.is_empty())
            .collect();
        self.insert_node_unchecked(id, labels, properties);
        id
    }

    /// Inserts a node under a caller-chosen id. Used by importers that must
    /// preserve ids.
    pub fn insert_node(
        &mut self,
        id: NodeId,
        labels: BTreeSet<String>,
        properties: Properties,
    ) -> Result<()> {
        if self.nodes.contains_key(&id) {
            return Err(GraphError::DuplicateId(id));
        }
        if labels.iter().any(String::is_empty) {
            return Err(GraphError::EmptyLabel);
        }
        self.insert_node_unchecked(id, labels, properties);
        Ok(())
    }

    fn insert_node_unchecked(&mut self, id: NodeId, labels: BTreeSet<String>, properties: Properties) {
        let properties: Properties = properties.into_iter().filter(|(_, v)| !v.is_null()).collect();
        let node = NodeRecord { id, labels, properties };
        for index in self.indexes.values_mut() {
            if node.has_label(&index.label) {
                if let Some(v) = node.properties.get(&index.key) {
                    index.insert(v, id);
                }
            }
        }
        self.nodes.insert(id, node);
        self.adjacency.insert(id, Adjacency::default());
        self.next_node = self.next_node.max(id + 1);
    }

    fn edge_key(&self, source: NodeId, target: NodeId, rel_type: &str) -> EdgeKey {
        let (a, b) = match self.kind {
            GraphKind::Directed => (source, target),
            GraphKind::Undirected => (source.min(target), source.max(target)),
        };
        EdgeKey { a, b, rel_type: rel_type.to_string() }
    }

    pub fn find_edge(&self, source: NodeId, target: NodeId, rel_type: &str) -> Option<EdgeId> {
        self.edge_keys.get(&self.edge_key(source, target, rel_type)).copied()
    }

    /// Adds an edge, or merges `properties` into the existing edge with the
    /// same endpoints and type.
    pub fn add_edge(
        &mut self,
        source: NodeId,
        target: NodeId,
        rel_type: &str,
        properties: Properties,
    ) -> Result<EdgeId> {
        self.check_edge_args(source, target, rel_type)?;
        if let Some(existing) = self.find_edge(source, target, rel_type) {
            self.set_properties(ElementRef::Edge(existing), properties)?;
            return Ok(existing);
        }
        let id = self.next_edge;
        self.insert_edge_unchecked(id, source, target, rel_type, properties);
        Ok(id)
    }

    /// Inserts an edge under a caller-chosen id.
    pub fn insert_edge(
        &mut self,
        id: EdgeId,
        source: NodeId,
        target: NodeId,
        rel_type: &str,
        properties: Properties,
    ) -> Result<()> {
        self.check_edge_args(source, target, rel_type)?;
        if self.edges.contains_key(&id) || self.find_edge(source, target, rel_type).is_some() {
            return Err(GraphError::DuplicateId(id));
        }
        self.insert_edge_unchecked(id, source, target, rel_type, properties);
        Ok(())
    }

    fn check_edge_args(&self, source: NodeId, target: NodeId, rel_type: &str) -> Result<()> {
        for end in [source, target] {
            if !self.nodes.contains_key(&end) {
                return Err(GraphError::UnknownNode(end));
            }
        }
        if rel_type.is_empty() {
            return Err(GraphError::EmptyType);
        }
        Ok(())
    }

    fn insert_edge_unchecked(
        &mut self,
        id: EdgeId,
        source: NodeId,
        target: NodeId,
        rel_type: &str,
        properties: Properties,
    ) {
        let properties: Properties = properties.into_iter().filter(|(_, v)| !v.is_null()).collect();
        let key = self.edge_key(source, target, rel_type);
        self.edge_keys.insert(key, id);
        self.adjacency.get_mut(&source).expect("live source").out.insert(id);
        self.adjacency.get_mut(&target).expect("live target").inc.insert(id);
        self.edges.insert(
            id,
            EdgeRecord { id, source, target, rel_type: rel_type.to_string(), properties },
        );
        self.next_edge = self.next_edge.max(id + 1);
    }

    /// Removes a node. With `detach`, incident edges go too and their count
    /// is returned; without it, a node with edges is left untouched.
    pub fn remove_node(&mut self, id: NodeId, detach: bool) -> Result<usize> {
        let adj = self.adjacency.get(&id).ok_or(GraphError::UnknownNode(id))?;
        let incident: BTreeSet<EdgeId> = adj.out.union(&adj.inc).copied().collect();
        if !detach && !incident.is_empty() {
            return Err(GraphError::NodeHasEdges { id, degree: incident.len() });
        }
        for edge in &incident {
            self.remove_edge_by_id(*edge)?;
        }
        let node = self.nodes.remove(&id).expect("adjacency and node table agree");
        self.adjacency.remove(&id);
        for index in self.indexes.values_mut() {
            if node.has_label(&index.label) {
                if let Some(v) = node.properties.get(&index.key) {
                    index.remove(v, id);
                }
            }
        }
        Ok(incident.len())
    }

    pub fn remove_edge(&mut self, source: NodeId, target: NodeId, rel_type: &str) -> Result<()> {
        let id = self.find_edge(source, target, rel_type).ok_or_else(|| {
            GraphError::UnknownEdge(format!("({source})-[:{rel_type}]-({target})"))
        })?;
        self.remove_edge_by_id(id).map(|_| ())
    }

    pub fn remove_edge_by_id(&mut self, id: EdgeId) -> Result<EdgeRecord> {
        let edge = self
            .edges
            .remove(&id)
            .ok_or_else(|| GraphError::UnknownEdge(id.to_string()))?;
        let key = self.edge_key(edge.source, edge.target, &edge.rel_type);
        self.edge_keys.remove(&key);
        if let Some(adj) = self.adjacency.get_mut(&edge.source) {
            adj.out.remove(&id);
        }
        if let Some(adj) = self.adjacency.get_mut(&edge.target) {
            adj.inc.remove(&id);
        }
        Ok(edge)
    }

    /// Overwrites or inserts each key of `updates`; a null value deletes the
    /// key. Returns the number of keys written or removed.
    pub fn set_properties(&mut self, target: ElementRef, updates: Properties) -> Result<usize> {
        match target {
            ElementRef::Node(id) => {
                let node = self.nodes.get_mut(&id).ok_or(GraphError::UnknownNode(id))?;
                let mut count = 0;
                for (key, value) in updates {
                    let old = if value.is_null() {
                        node.properties.remove(&key)
                    } else {
                        node.properties.insert(key.clone(), value.clone())
                    };
                    count += 1;
                    for index in self.indexes.values_mut() {
                        if index.key == key && node.labels.contains(&index.label) {
                            if let Some(old) = &old {
                                index.remove(old, id);
                            }
                            if !value.is_null() {
                                index.insert(&value, id);
                            }
                        }
                    }
                }
                Ok(count)
            }
            ElementRef::Edge(id) => {
                let edge = self
                    .edges
                    .get_mut(&id)
                    .ok_or_else(|| GraphError::UnknownEdge(id.to_string()))?;
                let mut count = 0;
                for (key, value) in updates {
                    if value.is_null() {
                        edge.properties.remove(&key);
                    } else {
                        edge.properties.insert(key, value);
                    }
                    count += 1;
                }
                Ok(count)
            }
        }
    }

    /// Adds labels to a live node; returns how many were new.
    pub fn add_labels<I, S>(&mut self, id: NodeId, labels: I) -> Result<usize>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let node = self.nodes.get_mut(&id).ok_or(GraphError::UnknownNode(id))?;
        let mut added = 0;
        for label in labels {
            let label = label.into();
            if label.is_empty() {
                return Err(GraphError::EmptyLabel);
            }
            if node.labels.insert(label.clone()) {
                added += 1;
                for index in self.indexes.values_mut() {
                    if index.label == label {
                        if let Some(v) = node.properties.get(&index.key) {
                            index.insert(v, id);
                        }
                    }
                }
            }
        }
        Ok(added)
    }

    fn adjacency_of(&self, id: NodeId) -> Result<&Adjacency> {
        self.adjacency.get(&id).ok_or(GraphError::UnknownNode(id))
    }

    /// Incident edge ids in ascending order. Undirected graphs ignore
    /// `direction`.
    pub fn incident_edges(&self, id: NodeId, direction: Direction) -> Result<Vec<EdgeId>> {
        let adj = self.adjacency_of(id)?;
        let direction = if self.is_directed() { direction } else { Direction::All };
        let set: BTreeSet<EdgeId> = match direction {
            Direction::Out => adj.out.clone(),
            Direction::In => adj.inc.clone(),
            Direction::All => adj.out.union(&adj.inc).copied().collect(),
        };
        Ok(set.into_iter().collect())
    }

    /// Edge-endpoint count. A self-loop contributes 2 to an undirected
    /// node's degree, matching the handshake identity.
    pub fn degree(&self, id: NodeId, direction: Direction) -> Result<usize> {
        let adj = self.adjacency_of(id)?;
        Ok(match (self.kind, direction) {
            (GraphKind::Directed, Direction::Out) => adj.out.len(),
            (GraphKind::Directed, Direction::In) => adj.inc.len(),
            _ => adj.out.len() + adj.inc.len(),
        })
    }

    /// Distinct neighbors in ascending id order.
    pub fn neighbors(&self, id: NodeId, direction: Direction) -> Result<Vec<NodeId>> {
        let adj = self.adjacency_of(id)?;
        let direction = if self.is_directed() { direction } else { Direction::All };
        let mut out = BTreeSet::new();
        if matches!(direction, Direction::Out | Direction::All) {
            out.extend(adj.out.iter().map(|e| self.edges[e].target));
        }
        if matches!(direction, Direction::In | Direction::All) {
            out.extend(adj.inc.iter().map(|e| self.edges[e].source));
        }
        Ok(out.into_iter().collect())
    }

    /// Dense adjacency matrix over nodes in ascending id order. With a
    /// weight key, entries carry the edge weight (default 1.0 when the edge
    /// lacks a numeric value); edges of different types between the same
    /// pair are summed.
    pub fn adjacency_matrix(&self, weight_key: Option<&str>) -> (Vec<NodeId>, Vec<Vec<f64>>) {
        let order = self.node_ids();
        let pos: HashMap<NodeId, usize> = order.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let n = order.len();
        let mut matrix = vec![vec![0.0; n]; n];
        for edge in self.edges.values() {
            let w = edge_weight(edge, weight_key);
            let (i, j) = (pos[&edge.source], pos[&edge.target]);
            matrix[i][j] += w;
            if !self.is_directed() && i != j {
                matrix[j][i] += w;
            }
        }
        (order, matrix)
    }

    /// 2m / n(n-1) for undirected graphs, m / n(n-1) for directed ones.
    pub fn density(&self) -> Result<f64> {
        let n = self.node_count();
        if n < 2 {
            return Err(GraphError::GraphTooSmall(n));
        }
        let m = self.edge_count() as f64;
        let pairs = (n * (n - 1)) as f64;
        Ok(match self.kind {
            GraphKind::Undirected => 2.0 * m / pairs,
            GraphKind::Directed => m / pairs,
        })
    }

    pub fn create_property_index(&mut self, label: &str, key: &str) -> Result<()> {
        let id = (label.to_string(), key.to_string());
        if self.indexes.contains_key(&id) {
            return Err(GraphError::IndexExists { label: id.0, key: id.1 });
        }
        let mut index = PropertyIndex {
            label: label.to_string(),
            key: key.to_string(),
            entries: BTreeMap::new(),
        };
        for node in self.nodes.values().filter(|n| n.has_label(label)) {
            if let Some(v) = node.properties.get(key) {
                index.insert(v, node.id);
            }
        }
        self.indexes.insert(id, index);
        Ok(())
    }

    pub fn has_index(&self, label: &str, key: &str) -> bool {
        self.indexes.contains_key(&(label.to_string(), key.to_string()))
    }

    pub fn indexes(&self) -> impl Iterator<Item = &PropertyIndex> + '_ {
        self.indexes.values()
    }

    /// Indexed equality lookup; `None` when no index covers `(label, key)`.
    pub fn index_lookup(&self, label: &str, key: &str, value: &PropertyValue) -> Option<BTreeSet<NodeId>> {
        self.indexes
            .get(&(label.to_string(), key.to_string()))
            .map(|idx| idx.lookup(value))
    }

    /// Full-scan equality lookup.
    pub fn scan_lookup(&self, label: &str, key: &str, value: &PropertyValue) -> BTreeSet<NodeId> {
        self.nodes
            .values()
            .filter(|n| n.has_label(label) && n.properties.get(key) == Some(value))
            .map(|n| n.id)
            .collect()
    }

    /// Nodes with `label` whose `key` equals `value`, through the index when
    /// one exists.
    pub fn find_nodes(&self, label: &str, key: &str, value: &PropertyValue) -> BTreeSet<NodeId> {
        self.index_lookup(label, key, value)
            .unwrap_or_else(|| self.scan_lookup(label, key, value))
    }

    /// Content hash over kind, nodes and edges in id order.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        self.kind.hash(&mut h);
        for node in self.nodes.values() {
            node.id.hash(&mut h);
            node.labels.hash(&mut h);
            node.properties.hash(&mut h);
        }
        for edge in self.edges.values() {
            edge.id.hash(&mut h);
            edge.source.hash(&mut h);
            edge.target.hash(&mut h);
            edge.rel_type.hash(&mut h);
            edge.properties.hash(&mut h);
        }
        h.finish()
    }

    /// Verifies the store's internal consistency: adjacency agrees with the
    /// edge table, no dangling endpoints, edge keys unique, and every index
    /// matches a full scan.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.adjacency.len() != self.nodes.len() {
            return Err("adjacency and node table differ in size".into());
        }
        let mut seen_out = 0;
        let mut seen_in = 0;
        for (id, adj) in &self.adjacency {
            if !self.nodes.contains_key(id) {
                return Err(format!("adjacency entry for dead node {id}"));
            }
            for e in &adj.out {
                match self.edges.get(e) {
                    Some(edge) if edge.source == *id => seen_out += 1,
                    _ => return Err(format!("out-list of {id} holds foreign edge {e}")),
                }
            }
            for e in &adj.inc {
                match self.edges.get(e) {
                    Some(edge) if edge.target == *id => seen_in += 1,
                    _ => return Err(format!("in-list of {id} holds foreign edge {e}")),
                }
            }
        }
        if seen_out != self.edges.len() || seen_in != self.edges.len() {
            return Err("edge missing from an adjacency list".into());
        }
        if self.edge_keys.len() != self.edges.len() {
            return Err("duplicate (source, target, type) edge".into());
        }
        for edge in self.edges.values() {
            if !self.nodes.contains_key(&edge.source) || !self.nodes.contains_key(&edge.target) {
                return Err(format!("edge {} dangles", edge.id));
            }
        }
        for index in self.indexes.values() {
            let mut expected: BTreeMap<PropertyValue, BTreeSet<NodeId>> = BTreeMap::new();
            for node in self.nodes.values().filter(|n| n.has_label(&index.label)) {
                if let Some(v) = node.properties.get(&index.key) {
                    expected.entry(v.clone()).or_default().insert(node.id);
                }
            }
            if expected != index.entries {
                return Err(format!("index :{}({}) diverges from scan", index.label, index.key));
            }
        }
        Ok(())
    }
}

/// Resolves an edge's weight: the numeric value under `weight_key`, or 1.0
/// when no key is given or the edge lacks a numeric value.
pub fn edge_weight(edge: &EdgeRecord, weight_key: Option<&str>) -> f64 {
    weight_key
        .and_then(|k| edge.properties.get(k))
        .and_then(PropertyValue::as_f64)
        .unwrap_or(1.0)
}

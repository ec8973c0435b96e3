//! Graph algorithms over a [`PropertyGraph`] snapshot: shortest paths,
//! connected components, centralities, PageRank, Louvain community
//! detection and modularity.
//!
//! Every algorithm first builds a compact index-based view of the graph with
//! nodes in ascending id order, so results never depend on hash ordering.

mod centrality;
mod community;
mod components;
mod pagerank;
mod paths;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::graph::{edge_weight, EdgeId, GraphError, NodeId, PropertyGraph};

pub use centrality::{betweenness_centrality, closeness_centrality, degree_centrality, eigenvector_centrality};
pub use community::{louvain, modularity, LouvainResult};
pub use components::{connected_components, weakly_connected_components};
pub use pagerank::{pagerank, PageRankConfig};
pub use paths::{bfs_shortest_path, dijkstra, ShortestPath};

/// Per-node scores, total over live nodes.
pub type CentralityScores = BTreeMap<NodeId, f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgoError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("edge {edge} has negative weight {weight}")]
    NegativeWeight { edge: EdgeId, weight: f64 },
    #[error("edge {edge} has non-finite weight")]
    NonFiniteWeight { edge: EdgeId },
    #[error("no path from {from} to {to}")]
    NoPath { from: NodeId, to: NodeId },
    #[error("algorithm requires an undirected graph")]
    DirectedInput,
    #[error("graph needs at least 2 nodes, has {0}")]
    GraphTooSmall(usize),
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("damping factor {0} outside (0, 1)")]
    BadDamping(f64),
    #[error("partition does not assign node {0}")]
    IncompletePartition(NodeId),
}

pub type Result<T> = std::result::Result<T, AlgoError>;

/// Which edge property carries the weight. Edges lacking a numeric value
/// under the key weigh 1.0, as do all edges when no key is set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightSpec {
    pub key: Option<String>,
}

impl WeightSpec {
    pub fn unweighted() -> Self {
        WeightSpec { key: None }
    }

    pub fn key(key: impl Into<String>) -> Self {
        WeightSpec { key: Some(key.into()) }
    }

    fn resolve(&self, g: &PropertyGraph, edge: EdgeId) -> Result<f64> {
        let record = g.edge(edge).ok_or_else(|| GraphError::UnknownEdge(edge.to_string()))?;
        let w = edge_weight(record, self.key.as_deref());
        if !w.is_finite() {
            return Err(AlgoError::NonFiniteWeight { edge });
        }
        Ok(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    Raw,
    #[default]
    Normalized,
}

/// Node → community assignment with community ids `0..k`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    assignment: BTreeMap<NodeId, usize>,
}

impl Partition {
    /// Builds a partition from any labelling, renumbering communities in
    /// order of their smallest member id.
    pub fn from_labels<L: Ord + Clone>(labels: impl IntoIterator<Item = (NodeId, L)>) -> Self {
        let labels: BTreeMap<NodeId, L> = labels.into_iter().collect();
        let mut renumber: BTreeMap<L, usize> = BTreeMap::new();
        let mut assignment = BTreeMap::new();
        for (node, label) in labels {
            let next = renumber.len();
            let id = *renumber.entry(label).or_insert(next);
            assignment.insert(node, id);
        }
        Partition { assignment }
    }

    pub fn community_of(&self, node: NodeId) -> Option<usize> {
        self.assignment.get(&node).copied()
    }

    pub fn assignment(&self) -> &BTreeMap<NodeId, usize> {
        &self.assignment
    }

    pub fn community_count(&self) -> usize {
        self.assignment.values().max().map_or(0, |m| m + 1)
    }

    /// Communities as node sets, indexed by community id.
    pub fn communities(&self) -> Vec<BTreeSet<NodeId>> {
        let mut out = vec![BTreeSet::new(); self.community_count()];
        for (&node, &c) in &self.assignment {
            out[c].insert(node);
        }
        out
    }
}

/// Index-based adjacency snapshot. Undirected graphs list every edge in both
/// endpoints' `out` and `inc` lists; a self-loop appears once.
pub(crate) struct View {
    pub ids: Vec<NodeId>,
    pub index: HashMap<NodeId, usize>,
    pub out: Vec<Vec<(usize, f64)>>,
    pub inc: Vec<Vec<(usize, f64)>>,
    pub directed: bool,
}

impl View {
    pub fn new(g: &PropertyGraph, weights: &WeightSpec) -> Result<Self> {
        let ids = g.node_ids();
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let n = ids.len();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        let directed = g.is_directed();
        for edge in g.edges() {
            let w = weights.resolve(g, edge.id)?;
            let (s, t) = (index[&edge.source], index[&edge.target]);
            out[s].push((t, w));
            inc[t].push((s, w));
            if !directed && s != t {
                out[t].push((s, w));
                inc[s].push((t, w));
            }
        }
        for list in out.iter_mut().chain(inc.iter_mut()) {
            list.sort_by_key(|&(v, _)| v);
        }
        Ok(View { ids, index, out, inc, directed })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn position(&self, id: NodeId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(AlgoError::Graph(GraphError::UnknownNode(id)))
    }

    /// Distinct out-neighbours (or in-neighbours), ascending.
    pub fn simple_neighbors(&self, reverse: bool) -> Vec<Vec<usize>> {
        let lists = if reverse { &self.inc } else { &self.out };
        lists
            .iter()
            .map(|l| {
                let mut v: Vec<usize> = l.iter().map(|&(j, _)| j).collect();
                v.dedup();
                v
            })
            .collect()
    }
}

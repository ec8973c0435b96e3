//! Generators and brute-force oracles for the set operations.

use std::collections::{BTreeMap, BTreeSet};

use grafion_core::ops::{edge_key, node_key, EdgeKey, NodeKey};
use grafion_core::{props, GraphKind, Properties, PropertyGraph, PropertyValue};
use proptest::prelude::*;

/// Key → (labels, properties) for every node.
pub type NodeTable = BTreeMap<NodeKey, (BTreeSet<String>, Properties)>;
pub type EdgeTable = BTreeMap<EdgeKey, Properties>;

pub fn node_table(g: &PropertyGraph) -> NodeTable {
    g.nodes().map(|n| (node_key(g, n.id), (n.labels.clone(), n.properties.clone()))).collect()
}

pub fn edge_table(g: &PropertyGraph) -> EdgeTable {
    g.edges().map(|e| (edge_key(g, e.id).unwrap(), e.properties.clone())).collect()
}

pub fn pairs(g: &PropertyGraph) -> BTreeSet<(u64, u64)> {
    g.edges().map(|e| (e.source.min(e.target), e.source.max(e.target))).collect()
}

/// Graphs whose nodes all carry distinct names drawn from a shared pool, so
/// two graphs overlap on some names.
pub fn arb_named(kind: GraphKind) -> impl Strategy<Value = PropertyGraph> {
    let node = (prop::collection::btree_set("[AB]", 0..2), prop::option::of(0i64..3));
    (prop::sample::subsequence((0..12).collect::<Vec<i64>>(), 0..=10), prop::collection::vec(node, 10))
        .prop_flat_map(move |(names, attrs)| {
            let n = names.len();
            let edges = if n == 0 {
                Just(Vec::new()).boxed()
            } else {
                prop::collection::vec((0..n, 0..n, "[RS]", prop::option::of(0i64..3)), 0..20).boxed()
            };
            (Just(names), Just(attrs), edges)
        })
        .prop_map(move |(names, attrs, edges)| {
            let mut g = PropertyGraph::new(kind);
            for (name, (labels, x)) in names.iter().zip(attrs) {
                let mut p = props([("name", format!("n{name}"))]);
                if let Some(x) = x {
                    p.insert("x".into(), PropertyValue::Int(x));
                }
                g.add_node(labels, p);
            }
            for (a, b, t, w) in edges {
                let p: Properties = w.map(|w| ("w".to_string(), PropertyValue::Int(w))).into_iter().collect();
                g.add_edge(a as u64, b as u64, &t, p).unwrap();
            }
            g
        })
}

pub fn arb_pair() -> impl Strategy<Value = (PropertyGraph, PropertyGraph)> {
    any::<bool>().prop_flat_map(|directed| {
        let kind = if directed { GraphKind::Directed } else { GraphKind::Undirected };
        (arb_named(kind), arb_named(kind))
    })
}

pub fn union_oracle(g1: &PropertyGraph, g2: &PropertyGraph) -> (NodeTable, EdgeTable) {
    let mut nodes = node_table(g1);
    for (k, (labels, p)) in node_table(g2) {
        let entry = nodes.entry(k).or_default();
        entry.0.extend(labels);
        entry.1.extend(p);
    }
    let mut edges = edge_table(g1);
    for (k, p) in edge_table(g2) {
        edges.entry(k).or_default().extend(p);
    }
    (nodes, edges)
}

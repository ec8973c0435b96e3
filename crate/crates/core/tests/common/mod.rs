//! Graph generators and independent reference implementations shared by
//! the integration tests. The oracles deliberately use different methods
//! from the library: dense matrices, Floyd-Warshall, union-find, path
//! enumeration and direct linear solves.
#![allow(dead_code)]

pub mod corpus;
pub mod setops;

use std::collections::{BTreeMap, BTreeSet};

use grafion_core::{props, GraphKind, NodeId, PropertyGraph, PropertyValue};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

pub fn empty() -> grafion_core::Properties {
    grafion_core::Properties::new()
}

/// Nodes `0..n` (ids match indices) and edges of type `E`.
pub fn build(kind: GraphKind, n: usize, edges: &[(usize, usize)]) -> PropertyGraph {
    let mut g = PropertyGraph::new(kind);
    for _ in 0..n {
        g.add_node(["N"], empty());
    }
    for &(a, b) in edges {
        g.add_edge(a as u64, b as u64, "E", empty()).unwrap();
    }
    g
}

/// Nodes `1..=max` with edges weighted by `weight`.
pub fn numbered(kind: GraphKind, edges: &[(u64, u64, f64)]) -> PropertyGraph {
    let mut g = PropertyGraph::new(kind);
    let max = edges.iter().map(|e| e.0.max(e.1)).max().unwrap_or(0);
    for id in 1..=max {
        g.insert_node(id, BTreeSet::new(), empty()).unwrap();
    }
    for &(a, b, w) in edges {
        g.add_edge(a, b, "E", props([("weight", PropertyValue::Float(w))])).unwrap();
    }
    g
}

/// `(n, edges)` with `n` in `1..=max_n`; edges may repeat or self-loop.
pub fn arb_edges(max_n: usize, max_m: usize) -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1..=max_n).prop_flat_map(move |n| (Just(n), prop::collection::vec((0..n, 0..n), 0..=max_m)))
}

pub fn arb_graph(max_n: usize, max_m: usize) -> impl Strategy<Value = PropertyGraph> {
    (arb_edges(max_n, max_m), any::<bool>()).prop_map(|((n, edges), directed)| {
        let kind = if directed { GraphKind::Directed } else { GraphKind::Undirected };
        build(kind, n, &edges)
    })
}

/// Simple undirected graph without self-loops.
pub fn arb_simple_undirected(max_n: usize, max_m: usize) -> impl Strategy<Value = PropertyGraph> {
    arb_edges(max_n, max_m).prop_map(|(n, edges)| {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| a != b).collect();
        build(GraphKind::Undirected, n, &edges)
    })
}

/// Positive-weight graph over `0..n` with weights in `1..=20`.
pub fn arb_weighted(max_n: usize, max_m: usize) -> impl Strategy<Value = PropertyGraph> {
    (1..=max_n, any::<bool>())
        .prop_flat_map(move |(n, directed)| {
            (Just(n), Just(directed), prop::collection::vec((0..n, 0..n, 1..=20i64), 0..=max_m))
        })
        .prop_map(|(n, directed, edges)| {
            let mut g = PropertyGraph::new(if directed { GraphKind::Directed } else { GraphKind::Undirected });
            for _ in 0..n {
                g.add_node(["N"], empty());
            }
            for (a, b, w) in edges {
                g.add_edge(a as u64, b as u64, "E", props([("weight", w)])).unwrap();
            }
            g
        })
}

pub fn index_of(g: &PropertyGraph) -> BTreeMap<NodeId, usize> {
    g.node_ids().into_iter().enumerate().map(|(i, id)| (id, i)).collect()
}

/// Directed arc list `(u, v, weight)`, undirected edges listed both ways.
pub fn arcs(g: &PropertyGraph, key: Option<&str>) -> Vec<(usize, usize, f64)> {
    let idx = index_of(g);
    let mut out = Vec::new();
    for e in g.edges() {
        let w = key.and_then(|k| e.get(k)).and_then(PropertyValue::as_f64).unwrap_or(1.0);
        let (u, v) = (idx[&e.source], idx[&e.target]);
        out.push((u, v, w));
        if !g.is_directed() && u != v {
            out.push((v, u, w));
        }
    }
    out
}

/// All-pairs shortest distances by Floyd-Warshall.
pub fn floyd(g: &PropertyGraph, key: Option<&str>) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (u, v, w) in arcs(g, key) {
        if w < d[u][v] {
            d[u][v] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Components by union-find, ignoring direction; each set holds node ids.
pub fn union_find_components(g: &PropertyGraph) -> BTreeSet<BTreeSet<NodeId>> {
    let ids = g.node_ids();
    let idx = index_of(g);
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in g.edges() {
        let (a, b) = (find(&mut parent, idx[&e.source]), find(&mut parent, idx[&e.target]));
        parent[a] = b;
    }
    let mut groups: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for (i, &id) in ids.iter().enumerate() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().insert(id);
    }
    groups.into_values().collect()
}

/// PageRank by solving `(I - d Mᵀ) x = (1-d)/N · 1` where `M` is the
/// row-stochastic transition matrix with dangling rows made uniform.
pub fn pagerank_solve(g: &PropertyGraph, d: f64) -> BTreeMap<NodeId, f64> {
    let n = g.node_count();
    let mut w = DMatrix::<f64>::zeros(n, n);
    for (u, v, weight) in arcs(g, None) {
        w[(u, v)] += weight;
    }
    let nf = n as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        let total: f64 = w.row(u).sum();
        for v in 0..n {
            m[(u, v)] = if total > 0.0 { w[(u, v)] / total } else { 1.0 / nf };
        }
    }
    let a = DMatrix::<f64>::identity(n, n) - m.transpose() * d;
    let b = DVector::<f64>::from_element(n, (1.0 - d) / nf);
    let x = a.lu().solve(&b).expect("nonsingular");
    g.node_ids().into_iter().zip(x.iter().copied()).collect()
}

/// Distinct out-neighbours per index, ignoring self-loops.
fn simple_adjacency(g: &PropertyGraph) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); g.node_count()];
    for (u, v, _) in arcs(g, None) {
        if u != v {
            adj[u].insert(v);
        }
    }
    adj
}

/// Closeness from Floyd-Warshall hop distances into each node.
pub fn closeness_oracle(g: &PropertyGraph, normalized: bool) -> BTreeMap<NodeId, f64> {
    let d = floyd(g, None);
    let n = g.node_count();
    g.node_ids()
        .into_iter()
        .enumerate()
        .map(|(v, id)| {
            let reach: Vec<f64> = (0..n).filter(|&u| u != v && d[u][v].is_finite()).map(|u| d[u][v]).collect();
            let total: f64 = reach.iter().sum();
            let score = if total == 0.0 {
                0.0
            } else if normalized {
                let r = reach.len() as f64;
                (r / total) * (r / (n - 1) as f64)
            } else {
                1.0 / total
            };
            (id, score)
        })
        .collect()
}

/// Betweenness by enumerating every simple path between every ordered pair
/// and keeping the shortest ones.
pub fn betweenness_oracle(g: &PropertyGraph, normalized: bool) -> BTreeMap<NodeId, f64> {
    let n = g.node_count();
    let adj = simple_adjacency(g);
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let mut shortest: Vec<Vec<usize>> = Vec::new();
            let mut path = vec![s];
            enumerate(&adj, t, &mut path, &mut shortest);
            let Some(best) = shortest.iter().map(Vec::len).min() else { continue };
            let paths: Vec<&Vec<usize>> = shortest.iter().filter(|p| p.len() == best).collect();
            let sigma = paths.len() as f64;
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    score[v] += 1.0 / sigma;
                }
            }
        }
    }
    if !g.is_directed() {
        score.iter_mut().for_each(|x| *x /= 2.0);
    }
    if normalized && n > 2 {
        let pairs = ((n - 1) * (n - 2)) as f64;
        let pairs = if g.is_directed() { pairs } else { pairs / 2.0 };
        score.iter_mut().for_each(|x| *x /= pairs);
    }
    g.node_ids().into_iter().zip(score).collect()
}

fn enumerate(adj: &[BTreeSet<usize>], t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let u = *path.last().unwrap();
    if u == t {
        out.push(path.clone());
        return;
    }
    for &v in &adj[u] {
        if !path.contains(&v) {
            path.push(v);
            enumerate(adj, t, path, out);
            path.pop();
        }
    }
}

/// Newman modularity from the dense adjacency matrix, directions ignored.
pub fn modularity_oracle(g: &PropertyGraph, community: &BTreeMap<NodeId, usize>) -> f64 {
    let idx = index_of(g);
    let n = idx.len();
    let mut a = vec![vec![0.0; n]; n];
    for e in g.edges() {
        let (u, v) = (idx[&e.source], idx[&e.target]);
        a[u][v] += 1.0;
        if u != v {
            a[v][u] += 1.0;
        } else {
            a[u][u] += 1.0;
        }
    }
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let ids = g.node_ids();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if community[&ids[i]] == community[&ids[j]] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n`, as community labels (restricted growth
/// strings).
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=max + 1 {
            cur.push(c);
            go(i + 1, n, max.max(c), cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        let mut cur = vec![0];
        go(1, n, 0, &mut cur, &mut out);
    }
    out
}

pub fn two_triangles() -> PropertyGraph {
    let mut g = PropertyGraph::undirected();
    for name in ["a", "b", "c", "d", "e", "f"] {
        g.add_node(["N"], props([("name", name)]));
    }
    for (a, b) in [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)] {
        g.add_edge(a, b, "E", empty()).unwrap();
    }
    g
}

/// Strings that stress CSV and JSON quoting.
pub fn adversarial_text() -> impl Strategy<Value = String> {
    prop_oneof![
        Just(String::new()),
        Just(",".to_string()),
        Just(";".to_string()),
        Just("\"".to_string()),
        Just("a\nb".to_string()),
        Just("\r\n".to_string()),
        Just("x:int".to_string()),
        Just("1:string".to_string()),
        Just(" lead".to_string()),
        Just("héllo, \"wörld\"".to_string()),
        "[ -~\n\t,;\"']{0,8}",
        ".{0,6}",
    ]
}

pub fn arb_value() -> impl Strategy<Value = PropertyValue> {
    prop_oneof![
        any::<bool>().prop_map(PropertyValue::Bool),
        any::<i64>().prop_map(PropertyValue::Int),
        any::<f64>().prop_filter("not NaN", |f| !f.is_nan()).prop_map(|f| PropertyValue::float(f).unwrap()),
        adversarial_text().prop_map(PropertyValue::Text),
    ]
}

/// Graphs with random labels, types and property maps.
pub fn arb_property_graph() -> impl Strategy<Value = PropertyGraph> {
    let key = "[a-z][a-z0-9 ]{0,4}";
    let label = "[A-Z][a-zA-Z]{0,4}";
    let node = (prop::collection::btree_set(label, 0..3), prop::collection::btree_map(key, arb_value(), 0..4));
    (any::<bool>(), prop::collection::vec(node, 1..10))
        .prop_flat_map(move |(directed, nodes)| {
            let n = nodes.len();
            let edge = (0..n, 0..n, "[A-Z_]{1,5}", prop::collection::btree_map(key, arb_value(), 0..3));
            (Just(directed), Just(nodes), prop::collection::vec(edge, 0..15))
        })
        .prop_map(|(directed, nodes, edges)| {
            let mut g = PropertyGraph::new(if directed { GraphKind::Directed } else { GraphKind::Undirected });
            for (labels, properties) in nodes {
                g.add_node(labels, properties);
            }
            for (a, b, t, properties) in edges {
                g.add_edge(a as u64, b as u64, &t, properties).unwrap();
            }
            g
        })
}

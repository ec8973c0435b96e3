use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::graph::{Direction, NodeId, PropertyGraph};

use super::{AlgoError, Result, View, WeightSpec};

/// A source→target path with per-node cumulative cost.
#[derive(Debug, Clone, PartialEq)]
pub struct ShortestPath {
    pub nodes: Vec<NodeId>,
    /// `cumulative[i]` is the cost of reaching `nodes[i]`.
    pub cumulative: Vec<f64>,
    pub cost: f64,
}

#[derive(Clone, Copy, PartialEq)]
struct Label {
    cost: f64,
    hops: usize,
    node: usize,
}

impl Eq for Label {}

impl Ord for Label {
    // Reversed for a min-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.hops.cmp(&self.hops))
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Minimum-cost path by Dijkstra's algorithm. Among minimum-cost paths the
/// one with fewest hops wins, then the lexicographically smallest node-id
/// sequence.
///
/// Runs a reverse search from `target` to get (cost, hops) to the target for
/// every node, then walks forward from `source` always taking the smallest
/// neighbour that stays on an optimal path.
pub fn dijkstra(g: &PropertyGraph, source: NodeId, target: NodeId, weights: &WeightSpec) -> Result<ShortestPath> {
    for edge in g.edges() {
        let w = weights.resolve(g, edge.id)?;
        if w < 0.0 {
            return Err(AlgoError::NegativeWeight { edge: edge.id, weight: w });
        }
    }
    let view = View::new(g, weights)?;
    let s = view.position(source)?;
    let t = view.position(target)?;
    let n = view.len();

    let mut dist = vec![f64::INFINITY; n];
    let mut hops = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[t] = 0.0;
    hops[t] = 0;
    heap.push(Label { cost: 0.0, hops: 0, node: t });
    while let Some(Label { cost, hops: h, node: u }) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(v, w) in &view.inc[u] {
            let (c, nh) = (cost + w, h + 1);
            if c < dist[v] || (c == dist[v] && nh < hops[v]) {
                dist[v] = c;
                hops[v] = nh;
                heap.push(Label { cost: c, hops: nh, node: v });
            }
        }
    }
    if !dist[s].is_finite() {
        return Err(AlgoError::NoPath { from: source, to: target });
    }

    let mut nodes = vec![source];
    let mut cumulative = vec![0.0];
    let mut u = s;
    let mut acc = 0.0;
    while u != t {
        let (next, w) = view.out[u]
            .iter()
            .filter(|&&(v, w)| hops[v] != usize::MAX && hops[v] + 1 == hops[u] && close(w + dist[v], dist[u]))
            .min_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)))
            .copied()
            .expect("an optimal successor exists on every optimal path");
        acc += w;
        u = next;
        nodes.push(view.ids[u]);
        cumulative.push(acc);
    }
    Ok(ShortestPath { nodes, cumulative, cost: acc })
}

/// Minimum-hop path, ties broken toward the lexicographically smallest
/// node-id sequence. `Direction::Out` follows edges forward, `In` backward
/// and `All` ignores direction; undirected graphs always use `All`.
pub fn bfs_shortest_path(g: &PropertyGraph, source: NodeId, target: NodeId, direction: Direction) -> Result<Vec<NodeId>> {
    let view = View::new(g, &WeightSpec::unweighted())?;
    let s = view.position(source)?;
    let t = view.position(target)?;
    let forward = view.simple_neighbors(false);
    let backward = view.simple_neighbors(true);
    let merged: Vec<Vec<usize>>;
    let (succ, pred): (&Vec<Vec<usize>>, &Vec<Vec<usize>>) = match (view.directed, direction) {
        (true, Direction::Out) => (&forward, &backward),
        (true, Direction::In) => (&backward, &forward),
        _ => {
            merged = forward
                .iter()
                .zip(&backward)
                .map(|(a, b)| {
                    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
                    v.sort_unstable();
                    v.dedup();
                    v
                })
                .collect();
            (&merged, &merged)
        }
    };

    let mut hops = vec![usize::MAX; view.len()];
    hops[t] = 0;
    let mut queue = VecDeque::from([t]);
    while let Some(u) = queue.pop_front() {
        for &v in &pred[u] {
            if hops[v] == usize::MAX {
                hops[v] = hops[u] + 1;
                queue.push_back(v);
            }
        }
    }
    if hops[s] == usize::MAX {
        return Err(AlgoError::NoPath { from: source, to: target });
    }
    let mut path = vec![source];
    let mut u = s;
    while u != t {
        u = *succ[u]
            .iter()
            .find(|&&v| hops[v] != usize::MAX && hops[v] + 1 == hops[u])
            .expect("BFS layer below is reachable");
        path.push(view.ids[u]);
    }
    Ok(path)
}

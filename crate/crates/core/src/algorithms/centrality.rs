use std::collections::VecDeque;

use crate::graph::{Direction, PropertyGraph};

use super::{AlgoError, CentralityScores, Mode, Result, View, WeightSpec};

/// `deg(v)`, or `deg(v) / (n - 1)` when normalized. Directed graphs count
/// in- and out-edges.
pub fn degree_centrality(g: &PropertyGraph, mode: Mode) -> Result<CentralityScores> {
    let n = g.node_count();
    if mode == Mode::Normalized && n < 2 {
        return Err(AlgoError::GraphTooSmall(n));
    }
    let scale = match mode {
        Mode::Raw => 1.0,
        Mode::Normalized => 1.0 / (n - 1) as f64,
    };
    g.node_ids()
        .into_iter()
        .map(|id| Ok((id, g.degree(id, Direction::All)? as f64 * scale)))
        .collect()
}

/// Hop distances from `source` along `adj`; `usize::MAX` marks unreachable.
fn bfs(adj: &[Vec<usize>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Inverse total distance from the nodes that can reach `v`.
///
/// Raw mode is `1 / Σ d(u, v)`. Normalized mode scales by the reachable
/// fraction: `(r - 1) / Σ d · (r - 1) / (n - 1)` with `r` counting `v`
/// itself, which reduces to `(n - 1) / Σ d` on connected graphs. Nodes no
/// other node reaches score 0.
pub fn closeness_centrality(g: &PropertyGraph, mode: Mode) -> Result<CentralityScores> {
    let view = View::new(g, &WeightSpec::unweighted())?;
    let n = view.len();
    // Distances *into* v: search the reversed graph.
    let reversed = view.simple_neighbors(true);
    let mut scores = CentralityScores::new();
    for v in 0..n {
        let dist = bfs(&reversed, v);
        let (reach, total) = dist
            .iter()
            .filter(|&&d| d != usize::MAX)
            .fold((0usize, 0usize), |(r, s), &d| (r + 1, s + d));
        let score = if total == 0 {
            0.0
        } else {
            match mode {
                Mode::Raw => 1.0 / total as f64,
                Mode::Normalized => {
                    let r1 = (reach - 1) as f64;
                    (r1 / total as f64) * (r1 / (n - 1) as f64)
                }
            }
        };
        scores.insert(view.ids[v], score);
    }
    Ok(scores)
}

/// Brandes' accumulation of `σ_st(v) / σ_st` over shortest paths.
///
/// Raw mode sums over unordered pairs for undirected graphs and ordered
/// pairs for directed ones. Normalized mode divides by the pair count
/// `(n-1)(n-2)/2` (undirected) or `(n-1)(n-2)` (directed).
pub fn betweenness_centrality(g: &PropertyGraph, mode: Mode) -> Result<CentralityScores> {
    let view = View::new(g, &WeightSpec::unweighted())?;
    let n = view.len();
    // Undirected views list both directions in `out`.
    let adj = view.simple_neighbors(false);
    let mut acc = vec![0.0f64; n];
    let mut stack = Vec::with_capacity(n);
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in 0..n {
        stack.clear();
        preds.iter_mut().for_each(Vec::clear);
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![usize::MAX; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            stack.push(u);
            for &v in &adj[u] {
                if v == u {
                    continue;
                }
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
                if dist[v] == dist[u] + 1 {
                    sigma[v] += sigma[u];
                    preds[v].push(u);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &u in &preds[w] {
                delta[u] += sigma[u] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                acc[w] += delta[w];
            }
        }
    }
    if !view.directed {
        acc.iter_mut().for_each(|x| *x /= 2.0);
    }
    if mode == Mode::Normalized && n > 2 {
        let pairs = ((n - 1) * (n - 2)) as f64;
        let pairs = if view.directed { pairs } else { pairs / 2.0 };
        acc.iter_mut().for_each(|x| *x /= pairs);
    }
    Ok(view.ids.iter().copied().zip(acc).collect())
}

/// Dominant eigenvector of the adjacency matrix by power iteration,
/// L2-normalized with non-negative entries.
///
/// Iterates with `A + I` rather than `A`: the eigenvectors are the same but
/// the shift keeps bipartite graphs (stars, even cycles) from oscillating.
/// Directed graphs use in-edges (`x_v ← Σ_{u→v} x_u`). Convergence is an L1
/// change between successive iterates below `tol`.
pub fn eigenvector_centrality(g: &PropertyGraph, max_iter: usize, tol: f64) -> Result<CentralityScores> {
    if g.edge_count() == 0 {
        return Err(AlgoError::EmptyGraph);
    }
    let view = View::new(g, &WeightSpec::unweighted())?;
    let n = view.len();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..max_iter {
        let mut next = x.clone();
        for (v, row) in view.inc.iter().enumerate() {
            for &(u, _) in row {
                next[v] += x[u];
            }
        }
        let norm = next.iter().map(|a| a * a).sum::<f64>().sqrt();
        next.iter_mut().for_each(|a| *a /= norm);
        let change: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if change < tol {
            return Ok(view.ids.iter().copied().zip(x).collect());
        }
    }
    Err(AlgoError::NoConvergence(max_iter))
}

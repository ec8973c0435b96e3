use crate::graph::PropertyGraph;

use super::{AlgoError, CentralityScores, Result, View, WeightSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    /// `None` means every edge counts once, `L(u)` being the out-degree.
    pub weights: Option<WeightSpec>,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig { damping: 0.85, weights: None, max_iter: 1000, tol: 1e-9 }
    }
}

/// Iterates `PR(v) = (1-d)/N + d Σ_{u→v} PR(u)·share(u,v)` from the uniform
/// vector, where `share` is `1/L(u)` or, with weights, `w(u,v) / Σ_out w(u,·)`.
/// Mass held by nodes without outgoing weight is spread uniformly. Undirected
/// edges count in both directions. Stops once the L1 change drops below
/// `tol`.
pub fn pagerank(g: &PropertyGraph, config: &PageRankConfig) -> Result<CentralityScores> {
    let d = config.damping;
    if !(d > 0.0 && d < 1.0) {
        return Err(AlgoError::BadDamping(d));
    }
    let weights = config.weights.clone().unwrap_or_default();
    let view = View::new(g, &weights)?;
    let n = view.len();
    if n == 0 {
        return Ok(CentralityScores::new());
    }
    if let Some(edge) = g.edges().find(|e| weights.resolve(g, e.id).is_ok_and(|w| w < 0.0)) {
        return Err(AlgoError::NegativeWeight { edge: edge.id, weight: weights.resolve(g, edge.id)? });
    }
    let out_weight: Vec<f64> = view.out.iter().map(|l| l.iter().map(|&(_, w)| w).sum()).collect();
    let nf = n as f64;
    let mut rank = vec![1.0 / nf; n];
    for _ in 0..config.max_iter {
        let dangling: f64 = (0..n).filter(|&u| out_weight[u] <= 0.0).map(|u| rank[u]).sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        let mut next = vec![base; n];
        for (v, incoming) in view.inc.iter().enumerate() {
            let mut flow = 0.0;
            for &(u, w) in incoming {
                if out_weight[u] > 0.0 {
                    flow += rank[u] * w / out_weight[u];
                }
            }
            next[v] += d * flow;
        }
        let change: f64 = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        rank = next;
        if change < config.tol {
            let total: f64 = rank.iter().sum();
            return Ok(view.ids.iter().copied().zip(rank.into_iter().map(|r| r / total)).collect());
        }
    }
    Err(AlgoError::NoConvergence(config.max_iter))
}

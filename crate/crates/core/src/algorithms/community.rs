//! Modularity and Louvain community detection.
//!
//! Modularity is Newman's `Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
//! Internally a graph is a symmetric weight matrix in sparse form where a
//! self-loop of weight `w` contributes `A_ii = 2w`, so `k_i = Σ_j A_ij` and
//! `2m = Σ_i k_i` hold for aggregated graphs as well.

use std::collections::BTreeMap;

use crate::graph::{NodeId, PropertyGraph};

use super::{AlgoError, Partition, Result, WeightSpec};

const MIN_GAIN: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct LouvainResult {
    pub partition: Partition,
    /// Modularity of the final partition on the input graph.
    pub modularity: f64,
    /// Modularity after each aggregation level, in order.
    pub levels: Vec<f64>,
}

struct WeightedGraph {
    /// Off-diagonal neighbours with summed weights, ascending.
    adj: Vec<Vec<(usize, f64)>>,
    /// Diagonal entries `A_ii`.
    diag: Vec<f64>,
    degree: Vec<f64>,
    total: f64,
}

impl WeightedGraph {
    fn from_graph(g: &PropertyGraph, weights: &WeightSpec) -> Result<(Vec<NodeId>, Self)> {
        let ids = g.node_ids();
        let pos: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let n = ids.len();
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        let mut diag = vec![0.0; n];
        for edge in g.edges() {
            let w = weights.resolve(g, edge.id)?;
            if w < 0.0 {
                return Err(AlgoError::NegativeWeight { edge: edge.id, weight: w });
            }
            let (s, t) = (pos[&edge.source], pos[&edge.target]);
            if s == t {
                diag[s] += 2.0 * w;
            } else {
                *rows[s].entry(t).or_default() += w;
                *rows[t].entry(s).or_default() += w;
            }
        }
        Ok((ids, Self::from_rows(rows, diag)))
    }

    fn from_rows(rows: Vec<BTreeMap<usize, f64>>, diag: Vec<f64>) -> Self {
        let adj: Vec<Vec<(usize, f64)>> = rows.into_iter().map(|r| r.into_iter().collect()).collect();
        let degree: Vec<f64> = adj
            .iter()
            .zip(&diag)
            .map(|(row, d)| d + row.iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        let total = degree.iter().sum();
        WeightedGraph { adj, diag, degree, total }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, community: &[usize]) -> f64 {
        let k = community.iter().max().map_or(0, |m| m + 1);
        let mut internal = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for i in 0..self.len() {
            let c = community[i];
            tot[c] += self.degree[i];
            internal[c] += self.diag[i];
            for &(j, w) in &self.adj[i] {
                if community[j] == c {
                    internal[c] += w;
                }
            }
        }
        let m2 = self.total;
        internal.iter().zip(&tot).map(|(a, t)| a / m2 - (t / m2) * (t / m2)).sum()
    }

    /// Local moving phase. Returns the (renumbered) community of each node
    /// and whether anything moved.
    fn local_moves(&self) -> (Vec<usize>, bool) {
        let n = self.len();
        let m2 = self.total;
        let mut community: Vec<usize> = (0..n).collect();
        let mut tot = self.degree.clone();
        let mut moved_any = false;
        loop {
            let mut moved = false;
            for i in 0..n {
                let own = community[i];
                let ki = self.degree[i];
                tot[own] -= ki;
                let mut links: BTreeMap<usize, f64> = BTreeMap::new();
                for &(j, w) in &self.adj[i] {
                    *links.entry(community[j]).or_default() += w;
                }
                let gain = |c: usize, k_in: f64| k_in - tot[c] * ki / m2;
                let stay = gain(own, links.get(&own).copied().unwrap_or(0.0));
                let mut best = (own, stay);
                // Ascending community order: among equal gains the smallest id
                // is kept. Staying wins ties with the own community.
                for (&c, &k_in) in &links {
                    let g = gain(c, k_in);
                    if g > best.1 + 1e-12 {
                        best = (c, g);
                    }
                }
                tot[best.0] += ki;
                if best.0 != own {
                    community[i] = best.0;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        (renumber(&community), moved_any)
    }

    fn aggregate(&self, community: &[usize]) -> Self {
        let k = community.iter().max().map_or(0, |m| m + 1);
        let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
        let mut diag = vec![0.0; k];
        for i in 0..self.len() {
            let ci = community[i];
            diag[ci] += self.diag[i];
            for &(j, w) in &self.adj[i] {
                let cj = community[j];
                if ci == cj {
                    diag[ci] += w;
                } else {
                    *rows[ci].entry(cj).or_default() += w;
                }
            }
        }
        Self::from_rows(rows, diag)
    }
}

/// Renumbers labels in order of first appearance.
fn renumber(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Newman modularity of `partition` over `g`, with edge directions ignored.
pub fn modularity(g: &PropertyGraph, partition: &Partition, weights: &WeightSpec) -> Result<f64> {
    if g.edge_count() == 0 {
        return Err(AlgoError::EmptyGraph);
    }
    let (ids, wg) = WeightedGraph::from_graph(g, weights)?;
    if wg.total <= 0.0 {
        return Err(AlgoError::EmptyGraph);
    }
    let community = ids
        .iter()
        .map(|&id| partition.community_of(id).ok_or(AlgoError::IncompletePartition(id)))
        .collect::<Result<Vec<_>>>()?;
    Ok(wg.modularity(&community))
}

/// Louvain method: alternate local moving (nodes in ascending order, each
/// joining the neighbouring community of largest positive modularity gain,
/// ties to the smallest community id) with aggregation of communities into
/// super-nodes, until a level improves modularity by less than `1e-7`.
pub fn louvain(g: &PropertyGraph, weights: &WeightSpec) -> Result<LouvainResult> {
    if g.is_directed() {
        return Err(AlgoError::DirectedInput);
    }
    if g.edge_count() == 0 {
        return Err(AlgoError::EmptyGraph);
    }
    let (ids, mut level) = WeightedGraph::from_graph(g, weights)?;
    if level.total <= 0.0 {
        return Err(AlgoError::EmptyGraph);
    }
    // Community of each original node, in terms of the current level's nodes.
    let mut membership: Vec<usize> = (0..ids.len()).collect();
    let mut current_q = level.modularity(&membership);
    let mut levels = Vec::new();
    loop {
        let (community, moved) = level.local_moves();
        if !moved {
            break;
        }
        let q = level.modularity(&community);
        if q - current_q < MIN_GAIN {
            // Keep the move only if it did not lower modularity.
            if q >= current_q {
                membership.iter_mut().for_each(|m| *m = community[*m]);
                levels.push(q);
            }
            break;
        }
        membership.iter_mut().for_each(|m| *m = community[*m]);
        current_q = q;
        levels.push(q);
        level = level.aggregate(&community);
    }
    let partition = Partition::from_labels(ids.iter().copied().zip(membership));
    let q = modularity(g, &partition, weights)?;
    Ok(LouvainResult { partition, modularity: q, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Properties;
    use std::collections::BTreeSet;

    fn build(n: u64, edges: &[(u64, u64)]) -> PropertyGraph {
        let mut g = PropertyGraph::undirected();
        for id in 0..n {
            g.insert_node(id, BTreeSet::new(), Properties::new()).unwrap();
        }
        for &(a, b) in edges {
            g.add_edge(a, b, "E", Properties::new()).unwrap();
        }
        g
    }

    fn two_triangles() -> PropertyGraph {
        build(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    }

    #[test]
    fn two_triangle_split() {
        let res = louvain(&two_triangles(), &WeightSpec::unweighted()).unwrap();
        assert_eq!(res.partition.communities(), vec![BTreeSet::from([0, 1, 2]), BTreeSet::from([3, 4, 5])]);
        assert!((res.modularity - 5.0 / 14.0).abs() < 1e-12);
    }

    #[test]
    fn small_fixtures() {
        let res = louvain(&build(2, &[(0, 1)]), &WeightSpec::unweighted()).unwrap();
        assert_eq!(res.partition.community_count(), 1);
        assert!(res.modularity.abs() < 1e-12);
        let res = louvain(&build(4, &[(0, 1), (2, 3)]), &WeightSpec::unweighted()).unwrap();
        assert_eq!(res.partition.community_count(), 2);
        assert!((res.modularity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn louvain_errors() {
        assert_eq!(louvain(&PropertyGraph::directed(), &WeightSpec::unweighted()), Err(AlgoError::DirectedInput));
        assert_eq!(louvain(&build(3, &[]), &WeightSpec::unweighted()), Err(AlgoError::EmptyGraph));
    }

    #[test]
    fn modularity_values() {
        let g = two_triangles();
        let one = Partition::from_labels(g.node_ids().into_iter().map(|id| (id, 0)));
        assert!(modularity(&g, &one, &WeightSpec::unweighted()).unwrap().abs() < 1e-12);
        let split = Partition::from_labels(g.node_ids().into_iter().map(|id| (id, id / 3)));
        assert!((modularity(&g, &split, &WeightSpec::unweighted()).unwrap() - 0.35714).abs() < 1e-5);
        let c5 = build(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let singles = Partition::from_labels(c5.node_ids().into_iter().map(|id| (id, id)));
        assert!((modularity(&c5, &singles, &WeightSpec::unweighted()).unwrap() + 0.2).abs() < 1e-12);
        let partial = Partition::from_labels([(0, 0)]);
        assert_eq!(modularity(&c5, &partial, &WeightSpec::unweighted()), Err(AlgoError::IncompletePartition(1)));
    }
}

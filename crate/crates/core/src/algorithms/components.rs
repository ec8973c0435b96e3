use std::collections::{BTreeSet, VecDeque};

use crate::graph::{NodeId, PropertyGraph};

use super::{AlgoError, Partition, Result, View, WeightSpec};

/// Component index per view position, numbered in order of smallest member.
fn label_components(view: &View) -> Vec<usize> {
    let n = view.len();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in view.out[u].iter().chain(&view.inc[u]) {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Connected components of an undirected graph, ordered by smallest member.
pub fn connected_components(g: &PropertyGraph) -> Result<Vec<BTreeSet<NodeId>>> {
    if g.is_directed() {
        return Err(AlgoError::DirectedInput);
    }
    Ok(weakly_connected_components(g)?.communities())
}

/// Components with edge direction ignored.
pub fn weakly_connected_components(g: &PropertyGraph) -> Result<Partition> {
    let view = View::new(g, &WeightSpec::unweighted())?;
    let comp = label_components(&view);
    Ok(Partition::from_labels(view.ids.iter().copied().zip(comp)))
}

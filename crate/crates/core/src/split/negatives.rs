//! Uniform sampling of non-edges.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{canonical, Edge, Graph, NodeId};
use crate::rng;

/// Restricts sampled pairs to one endpoint from each set. Overlapping sets
/// are allowed; `(all, all)` is the unconstrained case and
/// `(observed, new)` gives semi-inductive candidates.
#[derive(Debug, Clone, Copy)]
pub struct EndpointConstraint<'a> {
    pub left: &'a [NodeId],
    pub right: &'a [NodeId],
}

/// Draws `count` distinct unordered pairs absent from `graph`, uniformly
/// without replacement. Pairs already in `exclude` are also skipped, which
/// lets callers draw disjoint batches.
pub fn sample_negatives(
    graph: &Graph,
    count: usize,
    seed: u64,
    constraint: Option<EndpointConstraint<'_>>,
) -> Result<Vec<Edge>> {
    sample_negatives_excluding(graph, count, seed, constraint, &HashSet::new())
}

pub fn sample_negatives_excluding(
    graph: &Graph,
    count: usize,
    seed: u64,
    constraint: Option<EndpointConstraint<'_>>,
    exclude: &HashSet<Edge>,
) -> Result<Vec<Edge>> {
    let n = graph.num_nodes();
    let all: Vec<NodeId>;
    let (left, right) = match constraint {
        Some(c) => (dedup(c.left, n)?, dedup(c.right, n)?),
        None => {
            all = (0..n).collect();
            (all.clone(), all)
        }
    };
    let mut in_left = vec![false; n];
    let mut in_right = vec![false; n];
    left.iter().for_each(|&v| in_left[v] = true);
    right.iter().for_each(|&v| in_right[v] = true);
    let both = |v: NodeId| in_left[v] && in_right[v];

    let overlap = (0..n).filter(|&v| both(v)).count();
    let pairs = left.len() * right.len() - overlap - overlap * overlap.saturating_sub(1) / 2;
    let in_space = |&(a, b): &Edge| (in_left[a] && in_right[b]) || (in_right[a] && in_left[b]);
    let blocked = graph.edges().iter().filter(|e| in_space(e)).count()
        + exclude
            .iter()
            .filter(|e| in_space(e) && !graph.has_edge(e.0, e.1))
            .count();
    let available = pairs - blocked;
    if count > available {
        return Err(Error::InsufficientNonEdges {
            requested: count,
            available,
        });
    }
    if count == 0 {
        return Ok(Vec::new());
    }

    let mut rng = rng::seeded(seed);
    let dense = pairs > 0 && blocked as f64 / pairs as f64 > 0.5;
    if dense || 2 * count > available {
        // Enumerate the candidate space explicitly.
        let mut candidates = Vec::with_capacity(available);
        for &a in &left {
            for &b in &right {
                if a == b || (both(a) && both(b) && a > b) {
                    continue;
                }
                let e = canonical(a, b);
                if !graph.has_edge(a, b) && !exclude.contains(&e) {
                    candidates.push(e);
                }
            }
        }
        debug_assert_eq!(candidates.len(), available);
        return Ok(sample(&mut rng, candidates.len(), count)
            .into_iter()
            .map(|i| candidates[i])
            .collect());
    }

    let mut chosen = HashSet::with_capacity(count);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let a = left[rng.random_range(0..left.len())];
        let b = right[rng.random_range(0..right.len())];
        // Pairs with both endpoints in the overlap are reachable in two
        // orders; keep one so every unordered pair is equally likely.
        if a == b || (both(a) && both(b) && a > b) {
            continue;
        }
        let e = canonical(a, b);
        if graph.has_edge(a, b) || exclude.contains(&e) || !chosen.insert(e) {
            continue;
        }
        out.push(e);
    }
    Ok(out)
}

fn dedup(nodes: &[NodeId], n: usize) -> Result<Vec<NodeId>> {
    let mut v = nodes.to_vec();
    v.sort_unstable();
    v.dedup();
    if let Some(&bad) = v.iter().find(|&&x| x >= n) {
        return Err(Error::UnknownNode(bad));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_triangle_has_no_non_edges() {
        let k3 = Graph::from_edges(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(matches!(
            sample_negatives(&k3, 1, 0, None),
            Err(Error::InsufficientNonEdges { requested: 1, available: 0 })
        ));
    }

    #[test]
    fn path_has_unique_non_edge() {
        let p = Graph::from_edges(3, vec![(0, 1), (1, 2)]).unwrap();
        for seed in 0..5 {
            assert_eq!(sample_negatives(&p, 1, seed, None).unwrap(), vec![(0, 2)]);
        }
    }

    #[test]
    fn empty_graph_sample_is_distinct_and_reproducible() {
        let g = Graph::from_edges(100, vec![]).unwrap();
        let a = sample_negatives(&g, 50, 11, None).unwrap();
        let b = sample_negatives(&g, 50, 11, None).unwrap();
        assert_eq!(a, b);
        let distinct: HashSet<_> = a.iter().collect();
        assert_eq!(distinct.len(), 50);
        assert!(a.iter().all(|&(x, y)| x < y && y < 100));
        assert_ne!(a, sample_negatives(&g, 50, 12, None).unwrap());
    }

    #[test]
    fn constrained_endpoints() {
        let g = Graph::from_edges(6, vec![(0, 3)]).unwrap();
        let old = [0, 1, 2];
        let new = [3, 4, 5];
        let c = EndpointConstraint { left: &old, right: &new };
        let all = sample_negatives(&g, 8, 4, Some(c)).unwrap();
        assert_eq!(all.len(), 8);
        for (a, b) in all {
            assert!(old.contains(&a) && new.contains(&b));
            assert_ne!((a, b), (0, 3));
        }
        assert!(sample_negatives(&g, 9, 4, Some(c)).is_err());
    }

    #[test]
    fn overlapping_sets_count_pairs_once() {
        let g = Graph::from_edges(4, vec![]).unwrap();
        let a = [0, 1, 2];
        let b = [1, 2, 3];
        // {0,1},{0,2},{0,3},{1,2},{1,3},{2,3}
        let c = EndpointConstraint { left: &a, right: &b };
        let s = sample_negatives(&g, 6, 1, Some(c)).unwrap();
        let set: HashSet<_> = s.into_iter().collect();
        assert_eq!(set.len(), 6);
        assert!(sample_negatives(&g, 7, 1, Some(c)).is_err());
    }

    #[test]
    fn rejection_path_is_roughly_uniform() {
        // 10 nodes, 45 pairs, 2000 single draws: each pair expected ~44 times.
        let g = Graph::from_edges(10, vec![(0, 1)]).unwrap();
        let mut hits = std::collections::HashMap::new();
        for seed in 0..2000 {
            let e = sample_negatives(&g, 1, seed, None).unwrap()[0];
            *hits.entry(e).or_insert(0usize) += 1;
        }
        assert_eq!(hits.len(), 44);
        assert!(hits.values().all(|&c| (15..=90).contains(&c)), "{hits:?}");
    }

    #[test]
    fn dense_graph_uses_enumeration() {
        let mut edges = Vec::new();
        for a in 0..30 {
            for b in a + 1..30 {
                if (a + b) % 7 != 0 {
                    edges.push((a, b));
                }
            }
        }
        let g = Graph::from_edges(30, edges).unwrap();
        let free = 30 * 29 / 2 - g.num_edges();
        let s = sample_negatives(&g, free, 2, None).unwrap();
        assert_eq!(s.iter().collect::<HashSet<_>>().len(), free);
        assert!(s.iter().all(|&(a, b)| (a + b) % 7 == 0));
    }
}

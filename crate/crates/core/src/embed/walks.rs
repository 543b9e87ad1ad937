use rand::Rng as _;
use rayon::prelude::*;

use super::Node2VecParams;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::rng;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<NodeId>>,
}

impl WalkCorpus {
    pub fn num_tokens(&self) -> usize {
        self.walks.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.num_tokens() == 0
    }

    /// Checks that every consecutive pair in every walk is an edge.
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        for (i, walk) in self.walks.iter().enumerate() {
            for step in walk.windows(2) {
                if !graph.has_edge(step[0], step[1]) {
                    return Err(Error::invalid(format!(
                        "walk {i} steps along a non-edge {}-{}",
                        step[0], step[1]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Second-order walks: from `cur` having arrived from `prev`, a neighbour
/// `x` is weighted `1/p` if `x == prev`, `1` if `x` neighbours `prev`, and
/// `1/q` otherwise. Walks are grouped by round, then by start node; each
/// walk draws from its own derived stream so scheduling cannot change them.
pub fn biased_walks(graph: &Graph, params: &Node2VecParams) -> Result<WalkCorpus> {
    params.validate()?;
    if graph.num_nodes() == 0 {
        return Err(Error::Empty("graph has no nodes".into()));
    }
    let starts: Vec<NodeId> = graph.non_isolated().collect();
    let jobs: Vec<(usize, NodeId)> = (0..params.walks_per_node)
        .flat_map(|round| starts.iter().map(move |&v| (round, v)))
        .collect();
    let walks = jobs
        .par_iter()
        .map(|&(round, start)| {
            let seed = rng::derive(params.seed, &[2, round as u64, start as u64]);
            walk_from(graph, start, params, seed)
        })
        .collect();
    Ok(WalkCorpus { walks })
}

fn walk_from(graph: &Graph, start: NodeId, params: &Node2VecParams, seed: u64) -> Vec<NodeId> {
    let mut r = rng::seeded(seed);
    let mut walk = Vec::with_capacity(params.walk_length);
    walk.push(start);
    let (inv_p, inv_q) = (1.0 / params.p, 1.0 / params.q);
    let mut weights = Vec::new();
    while walk.len() < params.walk_length {
        let cur = *walk.last().unwrap();
        let nbrs = graph.neighbors(cur);
        if nbrs.is_empty() {
            break;
        }
        let next = if walk.len() == 1 {
            nbrs[r.random_range(0..nbrs.len())]
        } else {
            let prev = walk[walk.len() - 2];
            let back = graph.neighbors(prev);
            weights.clear();
            // both lists are sorted: merge to find common neighbours
            let mut j = 0;
            for &x in nbrs {
                while j < back.len() && back[j] < x {
                    j += 1;
                }
                let w = if x == prev {
                    inv_p
                } else if j < back.len() && back[j] == x {
                    1.0
                } else {
                    inv_q
                };
                weights.push(w);
            }
            let total: f64 = weights.iter().sum();
            let mut target = r.random::<f64>() * total;
            let mut pick = nbrs.len() - 1;
            for (i, &w) in weights.iter().enumerate() {
                if target < w {
                    pick = i;
                    break;
                }
                target -= w;
            }
            nbrs[pick]
        };
        walk.push(next);
    }
    walk
}

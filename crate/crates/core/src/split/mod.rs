//! Train/validation/test splits for transductive, inductive and temporal
//! evaluation.
//!
//! All splits are pure functions of `(input, ratios, seed)`.

mod io;
mod negatives;
mod temporal;

use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::rng;

pub use io::{read_split_dir, write_split_dir, SplitDir, SplitManifest, SplitMode};
pub use negatives::{sample_negatives, sample_negatives_excluding, EndpointConstraint};
pub use temporal::{temporal_split, temporal_split_with, TemporalSplit};

/// Train / validation / test fractions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Ratios {
    pub fn new(train: f64, valid: f64, test: f64) -> Result<Self> {
        let r = Self { train, valid, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let parts = [self.train, self.valid, self.test];
        if parts.iter().any(|&p| !(p > 0.0) || !p.is_finite()) {
            return Err(Error::invalid(format!("ratios must be positive, got {parts:?}")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("ratios must sum to 1, got {sum}")));
        }
        Ok(())
    }

    /// Splits `total` into three counts with the largest-remainder rule so
    /// the counts always add up to `total`. Ties go to the earlier part.
    pub fn counts(&self, total: usize) -> [usize; 3] {
        let exact = [self.train, self.valid, self.test].map(|r| r * total as f64);
        let mut counts = exact.map(|x| x.floor() as usize);
        let assigned: usize = counts.iter().sum();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
        });
        for &i in order.iter().take(total.saturating_sub(assigned)) {
            counts[i] += 1;
        }
        counts
    }
}

impl Default for Ratios {
    fn default() -> Self {
        Self {
            train: 0.8,
            valid: 0.1,
            test: 0.1,
        }
    }
}

/// Parses `"0.8,0.1,0.1"` or percentages such as `"80,10,10"`.
impl FromStr for Ratios {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::invalid(format!("ratios must be three numbers, got {s:?}")))?;
        let [a, b, c] = parts[..] else {
            return Err(Error::invalid(format!("ratios must be three numbers, got {s:?}")));
        };
        let sum = a + b + c;
        if (sum - 100.0).abs() <= 1e-7 {
            Self::new(a / 100.0, b / 100.0, c / 100.0)
        } else {
            Self::new(a, b, c)
        }
    }
}

/// Positive edge partition plus sampled non-edges for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSplit {
    pub train_edges: Vec<Edge>,
    pub valid_pos: Vec<Edge>,
    pub valid_neg: Vec<Edge>,
    pub test_pos: Vec<Edge>,
    pub test_neg: Vec<Edge>,
}

/// Shuffles edges and cuts them by `ratios`; validation and test negatives
/// are disjoint uniform non-edges of the full graph, one per positive.
pub fn random_edge_split(graph: &Graph, ratios: Ratios, seed: u64) -> Result<EdgeSplit> {
    ratios.validate()?;
    if graph.num_edges() < 3 {
        return Err(Error::invalid(format!(
            "edge split needs at least 3 edges, graph has {}",
            graph.num_edges()
        )));
    }
    let mut edges = graph.edges().to_vec();
    edges.shuffle(&mut rng::seeded(rng::derive(seed, &[0])));
    let [n_train, n_valid, _] = ratios.counts(edges.len());
    let test_pos = edges.split_off(n_train + n_valid);
    let valid_pos = edges.split_off(n_train);
    let train_edges = edges;

    let mut negs = sample_negatives(
        graph,
        valid_pos.len() + test_pos.len(),
        rng::derive(seed, &[1]),
        None,
    )?;
    let test_neg = negs.split_off(valid_pos.len());
    Ok(EdgeSplit {
        train_edges,
        valid_pos,
        valid_neg: negs,
        test_pos,
        test_neg,
    })
}

/// Random node split with induced subgraphs.
#[derive(Debug, Clone)]
pub struct InductiveSplit {
    pub train_nodes: Vec<NodeId>,
    pub valid_nodes: Vec<NodeId>,
    pub test_nodes: Vec<NodeId>,
    /// Induced subgraphs, each on the full graph's id space.
    pub train_graph: Graph,
    pub valid_graph: Graph,
    pub test_graph: Graph,
    /// Edges whose endpoints fall in different groups.
    pub lost_edges: usize,
}

pub fn random_node_split(graph: &Graph, ratios: Ratios, seed: u64) -> Result<InductiveSplit> {
    ratios.validate()?;
    let n = graph.num_nodes();
    if n < 3 {
        return Err(Error::invalid(format!("node split needs at least 3 nodes, graph has {n}")));
    }
    let mut order: Vec<NodeId> = (0..n).collect();
    order.shuffle(&mut rng::seeded(seed));
    let [n_train, n_valid, _] = ratios.counts(n);

    let mut group = vec![0u8; n];
    for (rank, &v) in order.iter().enumerate() {
        group[v] = if rank < n_train {
            0
        } else if rank < n_train + n_valid {
            1
        } else {
            2
        };
    }
    let members = |g: u8| -> Vec<bool> { group.iter().map(|&x| x == g).collect() };
    let nodes = |g: u8| -> Vec<NodeId> { (0..n).filter(|&v| group[v] == g).collect() };

    let train_graph = graph.induced(&members(0));
    let valid_graph = graph.induced(&members(1));
    let test_graph = graph.induced(&members(2));
    let lost_edges =
        graph.num_edges() - train_graph.num_edges() - valid_graph.num_edges() - test_graph.num_edges();
    Ok(InductiveSplit {
        train_nodes: nodes(0),
        valid_nodes: nodes(1),
        test_nodes: nodes(2),
        train_graph,
        valid_graph,
        test_graph,
        lost_edges,
    })
}

impl InductiveSplit {
    /// Evaluation edges for the fully inductive regime: positives are the
    /// validation/test subgraph edges, negatives are non-edges of the full
    /// graph with both endpoints inside the same held-out group.
    pub fn edge_split(&self, full: &Graph, seed: u64) -> Result<EdgeSplit> {
        let valid_pos = self.valid_graph.edges().to_vec();
        let test_pos = self.test_graph.edges().to_vec();
        let valid_neg = sample_negatives(
            full,
            valid_pos.len(),
            rng::derive(seed, &[2]),
            Some(EndpointConstraint {
                left: &self.valid_nodes,
                right: &self.valid_nodes,
            }),
        )?;
        let test_neg = sample_negatives(
            full,
            test_pos.len(),
            rng::derive(seed, &[3]),
            Some(EndpointConstraint {
                left: &self.test_nodes,
                right: &self.test_nodes,
            }),
        )?;
        Ok(EdgeSplit {
            train_edges: self.train_graph.edges().to_vec(),
            valid_pos,
            valid_neg,
            test_pos,
            test_neg,
        })
    }
}

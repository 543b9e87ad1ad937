//! Degree-sequence edge scorers.
//!
//! Both models look only at how many edges each node has in the training
//! graph. Strong test scores from them mean the benchmark can be solved by a
//! topological shortcut, without any node attributes.

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::split::sample_negatives;

/// Anything that assigns a real score to a candidate node pair.
pub trait EdgeScorer {
    fn score(&self, a: NodeId, b: NodeId) -> Result<f64>;

    fn score_all(&self, edges: &[Edge]) -> Result<Vec<f64>> {
        edges.iter().map(|&(a, b)| self.score(a, b)).collect()
    }
}

/// Configuration-model expectation `k_a k_b / 2m`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeModel {
    degrees: Vec<usize>,
    two_m: usize,
}

impl DegreeModel {
    pub fn from_graph(train: &Graph) -> Self {
        let degrees = train.degrees();
        let two_m = 2 * train.num_edges();
        Self { degrees, two_m }
    }

    pub fn from_degrees(degrees: Vec<usize>) -> Self {
        let two_m = degrees.iter().sum();
        Self { degrees, two_m }
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn two_m(&self) -> usize {
        self.two_m
    }

    fn degree(&self, v: NodeId) -> Result<usize> {
        self.degrees.get(v).copied().ok_or(Error::UnknownNode(v))
    }
}

/// The constant `2m` (rather than `2m - 1`) does not affect any ranking.
pub fn config_score(model: &DegreeModel, a: NodeId, b: NodeId) -> Result<f64> {
    let (ka, kb) = (model.degree(a)?, model.degree(b)?);
    if model.two_m == 0 {
        return Ok(0.0);
    }
    Ok((ka * kb) as f64 / model.two_m as f64)
}

impl EdgeScorer for DegreeModel {
    fn score(&self, a: NodeId, b: NodeId) -> Result<f64> {
        config_score(self, a, b)
    }
}

/// Degrees in a positive and a negative layer over one node universe.
#[derive(Debug, Clone, PartialEq)]
pub struct DuplexDegreeModel {
    pos_degrees: Vec<usize>,
    neg_degrees: Vec<usize>,
}

impl DuplexDegreeModel {
    pub fn pos_degrees(&self) -> &[usize] {
        &self.pos_degrees
    }

    pub fn neg_degrees(&self) -> &[usize] {
        &self.neg_degrees
    }
}

pub fn build_duplex(
    train_pos: &[Edge],
    train_neg: &[Edge],
    num_nodes: usize,
) -> Result<DuplexDegreeModel> {
    let pos = Graph::from_edges(num_nodes, train_pos.iter().copied())?;
    let neg = Graph::from_edges(num_nodes, train_neg.iter().copied())?;
    if let Some(&(a, b)) = neg.edges().iter().find(|&&(a, b)| pos.has_edge(a, b)) {
        return Err(Error::invalid(format!(
            "pair ({a}, {b}) appears in both the positive and negative layer"
        )));
    }
    Ok(DuplexDegreeModel {
        pos_degrees: pos.degrees(),
        neg_degrees: neg.degrees(),
    })
}

/// Duplex model whose negative layer is a seeded uniform sample of
/// non-edges of `train`, equal in size to the positive layer.
pub fn duplex_from_train(train: &Graph, seed: u64) -> Result<DuplexDegreeModel> {
    let neg = sample_negatives(train, train.num_edges(), seed, None)?;
    build_duplex(train.edges(), &neg, train.num_nodes())
}

/// `k+_a k+_b / (k+_a k+_b + k-_a k-_b)`, or 0.5 when both products vanish.
pub fn duplex_config_score(model: &DuplexDegreeModel, a: NodeId, b: NodeId) -> Result<f64> {
    let get = |d: &[usize], v: NodeId| d.get(v).copied().ok_or(Error::UnknownNode(v));
    let plus = (get(&model.pos_degrees, a)? * get(&model.pos_degrees, b)?) as f64;
    let minus = (get(&model.neg_degrees, a)? * get(&model.neg_degrees, b)?) as f64;
    if plus + minus == 0.0 {
        return Ok(0.5);
    }
    Ok(plus / (plus + minus))
}

impl EdgeScorer for DuplexDegreeModel {
    fn score(&self, a: NodeId, b: NodeId) -> Result<f64> {
        duplex_config_score(self, a, b)
    }
}

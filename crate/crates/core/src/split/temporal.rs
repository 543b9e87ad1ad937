use super::{sample_negatives, EdgeSplit, EndpointConstraint};
use crate::attrs::AttributeMatrix;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::temporal::TemporalGraphSequence;

/// Observed snapshot `j` and what arrives by snapshot `j + 1`.
#[derive(Debug, Clone)]
pub struct TemporalSplit {
    pub base_index: usize,
    pub observed_graph: Graph,
    pub observed_nodes: Vec<NodeId>,
    /// Nodes present at `j + 1` but not at `j`.
    pub new_nodes: Vec<NodeId>,
    /// Edges of `j + 1` absent from `j`.
    pub new_edges: Vec<Edge>,
    /// Node-aligned attributes: observed rows from snapshot `j`, new-node rows
    /// from snapshot `j + 1`. `None` when the snapshots carry no attributes.
    pub attrs: Option<AttributeMatrix>,
}

#[derive(Debug, Clone, Copy)]
pub struct TemporalOptions {
    /// Keep only new edges with at least one newly arrived endpoint.
    pub new_node_edges_only: bool,
}

impl Default for TemporalOptions {
    fn default() -> Self {
        Self {
            new_node_edges_only: true,
        }
    }
}

pub fn temporal_split(seq: &TemporalGraphSequence, j: usize) -> Result<TemporalSplit> {
    temporal_split_with(seq, j, TemporalOptions::default())
}

pub fn temporal_split_with(
    seq: &TemporalGraphSequence,
    j: usize,
    options: TemporalOptions,
) -> Result<TemporalSplit> {
    let snaps = seq.snapshots();
    if j + 1 >= snaps.len() {
        return Err(Error::invalid(format!(
            "snapshot index {j} out of range for {} snapshots",
            snaps.len()
        )));
    }
    let (now, next) = (&snaps[j], &snaps[j + 1]);
    let new_nodes: Vec<NodeId> = next.nodes().filter(|&v| !now.present[v]).collect();
    let is_new = |v: NodeId| next.present[v] && !now.present[v];
    let new_edges: Vec<Edge> = next
        .graph
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| !now.graph.has_edge(a, b))
        .filter(|&(a, b)| !options.new_node_edges_only || is_new(a) || is_new(b))
        .collect();

    let attrs = match (&now.attrs, &next.attrs) {
        (Some(cur), Some(nxt)) => {
            let mut merged = cur.clone();
            for &v in &new_nodes {
                merged.row_mut(v).copy_from_slice(nxt.row(v));
            }
            Some(merged)
        }
        (None, Some(nxt)) => Some(nxt.clone()),
        (Some(cur), None) => Some(cur.clone()),
        (None, None) => None,
    };

    Ok(TemporalSplit {
        base_index: j,
        observed_graph: now.graph.clone(),
        observed_nodes: now.nodes().collect(),
        new_nodes,
        new_edges,
        attrs,
    })
}

impl TemporalSplit {
    /// Observed edges for training and the arrivals as test positives,
    /// against as many uniform negatives pairing a newcomer with any node of
    /// either snapshot. No validation edges.
    pub fn edge_split(&self, seed: u64) -> Result<EdgeSplit> {
        if self.new_nodes.is_empty() || self.new_edges.is_empty() {
            return Err(Error::Empty("no newly arrived nodes with edges to test on".into()));
        }
        let n = self.observed_graph.num_nodes();
        let known = Graph::from_edges(
            n,
            self.observed_graph
                .edges()
                .iter()
                .chain(&self.new_edges)
                .copied(),
        )?;
        let mut universe: Vec<NodeId> = self
            .observed_nodes
            .iter()
            .chain(&self.new_nodes)
            .copied()
            .collect();
        universe.sort_unstable();
        let test_neg = sample_negatives(
            &known,
            self.new_edges.len(),
            seed,
            Some(EndpointConstraint {
                left: &self.new_nodes,
                right: &universe,
            }),
        )?;
        Ok(EdgeSplit {
            train_edges: self.observed_graph.edges().to_vec(),
            valid_pos: Vec::new(),
            valid_neg: Vec::new(),
            test_pos: self.new_edges.clone(),
            test_neg,
        })
    }
}

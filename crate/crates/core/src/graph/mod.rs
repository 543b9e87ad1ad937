//! Undirected simple graphs over dense integer node ids.
//!
//! Node ids are assigned at load time and index directly into an
//! [`AttributeMatrix`](crate::attrs::AttributeMatrix). The external string keys
//! live in a shared [`KeyMap`] so that induced subgraphs and temporal snapshots
//! keep one global id space.

mod io;
mod topo;

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use crate::error::{Error, Result};

pub use io::{load_graph, load_node_list, save_graph, EdgeListFormat, LoadedGraph};
pub use topo::{betweenness, topo_features, triangle_counts, BetweennessMode, TopoFeatures};

pub type NodeId = usize;

/// Unordered node pair stored with the smaller id first.
pub type Edge = (NodeId, NodeId);

#[inline]
pub fn canonical(a: NodeId, b: NodeId) -> Edge {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Bijection between external string keys and dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeyMap {
    keys: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl KeyMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Keys "0", "1", ... for graphs built in memory.
    pub fn numeric(n: usize) -> Self {
        let mut map = Self::new();
        for i in 0..n {
            map.intern(&i.to_string());
        }
        map
    }

    /// Returns the id of `key`, registering it if unseen.
    pub fn intern(&mut self, key: &str) -> NodeId {
        if let Some(&id) = self.index.get(key) {
            return id;
        }
        let id = self.keys.len();
        self.keys.push(key.to_owned());
        self.index.insert(key.to_owned(), id);
        id
    }

    pub fn get(&self, key: &str) -> Option<NodeId> {
        self.index.get(key).copied()
    }

    pub fn key(&self, id: NodeId) -> &str {
        &self.keys[id]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }
}

/// Counts of records dropped while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DropCounts {
    pub self_loops: usize,
    pub duplicates: usize,
}

/// Immutable undirected simple graph.
#[derive(Debug, Clone)]
pub struct Graph {
    keys: Arc<KeyMap>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<NodeId>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.keys.keys() == other.keys.keys() && self.edges == other.edges
    }
}

impl Graph {
    /// Graph with numeric keys. Self-loops and duplicates are dropped.
    pub fn from_edges(num_nodes: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        Self::with_keys(Arc::new(KeyMap::numeric(num_nodes)), edges)
    }

    pub fn with_keys(keys: Arc<KeyMap>, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        Self::with_keys_counted(keys, edges).map(|(g, _)| g)
    }

    /// Builds the graph and reports how many self-loops and duplicate
    /// records were discarded.
    pub fn with_keys_counted(
        keys: Arc<KeyMap>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<(Self, DropCounts)> {
        let n = keys.len();
        let mut counts = DropCounts::default();
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n {
                return Err(Error::UnknownNode(a));
            }
            if b >= n {
                return Err(Error::UnknownNode(b));
            }
            if a == b {
                counts.self_loops += 1;
                continue;
            }
            list.push(canonical(a, b));
        }
        let raw = list.len();
        list.sort_unstable();
        list.dedup();
        counts.duplicates = raw - list.len();

        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &list {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok((
            Self {
                keys,
                edges: list,
                adjacency,
            },
            counts,
        ))
    }

    /// Empty graph sharing this graph's node universe.
    pub fn empty_like(&self) -> Self {
        Self {
            keys: Arc::clone(&self.keys),
            edges: Vec::new(),
            adjacency: vec![Vec::new(); self.num_nodes()],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in ascending order, smaller endpoint first.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        a < self.num_nodes() && b < self.num_nodes() && self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn key_map(&self) -> &Arc<KeyMap> {
        &self.keys
    }

    pub fn key(&self, v: NodeId) -> &str {
        self.keys.key(v)
    }

    pub fn node_id(&self, key: &str) -> Option<NodeId> {
        self.keys.get(key)
    }

    pub fn edge_set(&self) -> HashSet<Edge> {
        self.edges.iter().copied().collect()
    }

    /// Subgraph on the same id space holding exactly the edges whose
    /// endpoints are both in `members`.
    pub fn induced(&self, members: &[bool]) -> Self {
        assert_eq!(members.len(), self.num_nodes(), "membership mask length");
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(a, b)| members[a] && members[b]);
        Self::with_keys(Arc::clone(&self.keys), edges).expect("subset of a valid edge set")
    }

    /// Nodes with at least one incident edge.
    pub fn non_isolated(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.num_nodes()).filter(|&v| !self.adjacency[v].is_empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_drops_loops_and_duplicates() {
        let (g, counts) = Graph::with_keys_counted(
            Arc::new(KeyMap::numeric(3)),
            vec![(0, 1), (1, 0), (2, 2), (1, 2)],
        )
        .unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(counts, DropCounts { self_loops: 1, duplicates: 1 });
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert!(g.has_edge(2, 1));
        assert!(!g.has_edge(0, 2));
    }

    #[test]
    fn endpoint_out_of_range() {
        assert!(matches!(Graph::from_edges(2, vec![(0, 2)]), Err(Error::UnknownNode(2))));
    }

    #[test]
    fn induced_keeps_universe() {
        let g = Graph::from_edges(4, vec![(0, 1), (1, 2), (2, 3)]).unwrap();
        let sub = g.induced(&[true, true, false, true]);
        assert_eq!(sub.num_nodes(), 4);
        assert_eq!(sub.edges(), &[(0, 1)]);
    }

    #[test]
    fn degree_sum_is_twice_edges() {
        let g = Graph::from_edges(5, vec![(0, 1), (0, 2), (0, 3), (3, 4)]).unwrap();
        assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.num_edges());
    }
}

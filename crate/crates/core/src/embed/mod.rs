//! Node feature variants: Node2Vec topology embeddings, row- or
//! column-shuffled attributes, and uniform random attributes.

mod skipgram;
mod walks;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::attrs::AttributeMatrix;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

pub use skipgram::{skipgram_embed, skipgram_init, skipgram_train, SkipGramModel};
pub use walks::{biased_walks, WalkCorpus};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Node2VecParams {
    pub dim: usize,
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub window: usize,
    pub p: f64,
    pub q: f64,
    pub negatives_per_target: usize,
    /// Zero leaves the seeded initialization untouched.
    pub epochs: usize,
    /// Starting rate, decayed linearly to zero over training.
    pub learning_rate: f64,
    pub seed: u64,
    /// Skip-gram workers. One is deterministic; more run lock-free and
    /// racy, so results vary from run to run.
    pub workers: usize,
}

impl Default for Node2VecParams {
    fn default() -> Self {
        Self {
            dim: 128,
            walks_per_node: 10,
            walk_length: 80,
            window: 10,
            p: 1.0,
            q: 1.0,
            negatives_per_target: 5,
            epochs: 1,
            learning_rate: 0.025,
            seed: 0,
            workers: 1,
        }
    }
}

impl Node2VecParams {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.walks_per_node == 0 || self.walk_length == 0 || self.window == 0 {
            return Err(Error::invalid(
                "dim, walks per node, walk length and window must be positive",
            ));
        }
        if !(self.p > 0.0 && self.q > 0.0 && self.learning_rate > 0.0) {
            return Err(Error::invalid("p, q and learning rate must be positive"));
        }
        if self.p.is_infinite() || self.q.is_infinite() || self.learning_rate.is_infinite() {
            return Err(Error::invalid("p, q and learning rate must be finite"));
        }
        Ok(())
    }
}

/// Walks plus skip-gram in one call; rows follow the graph's node ids.
pub fn node2vec(graph: &Graph, params: &Node2VecParams) -> Result<AttributeMatrix> {
    let corpus = biased_walks(graph, params)?;
    if corpus.is_empty() {
        return Err(Error::Empty("graph has no edges to walk".into()));
    }
    skipgram_embed(&corpus, params, graph.num_nodes())
}

/// How [`shuffle_attributes_with`] scrambles a matrix.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShuffleMode {
    /// One permutation of whole rows: each node receives another node's
    /// vector intact.
    #[default]
    Rows,
    /// An independent permutation per column. Every column keeps its
    /// histogram but correlations between columns are destroyed.
    Columns,
}

pub fn shuffle_attributes(attrs: &AttributeMatrix, seed: u64) -> Result<AttributeMatrix> {
    shuffle_attributes_with(attrs, seed, ShuffleMode::Rows)
}

pub fn shuffle_attributes_with(attrs: &AttributeMatrix, seed: u64, mode: ShuffleMode) -> Result<AttributeMatrix> {
    let n = attrs.num_rows();
    if n == 0 || attrs.dim() == 0 {
        return Err(Error::Empty("cannot shuffle an empty matrix".into()));
    }
    match mode {
        ShuffleMode::Rows => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng::seeded(seed));
            Ok(attrs.select_rows(&order))
        }
        ShuffleMode::Columns => {
            let mut out = attrs.clone();
            let mut order: Vec<usize> = (0..n).collect();
            for col in 0..attrs.dim() {
                order.shuffle(&mut rng::seeded(rng::derive(seed, &[col as u64])));
                for (i, &src) in order.iter().enumerate() {
                    out.row_mut(i)[col] = attrs.row(src)[col];
                }
            }
            Ok(out)
        }
    }
}

/// Independent uniform `[0, 1)` entries.
pub fn random_attributes(num_nodes: usize, dim: usize, seed: u64) -> Result<AttributeMatrix> {
    if num_nodes == 0 || dim == 0 {
        return Err(Error::invalid("random attributes need positive rows and dim"));
    }
    let mut r = rng::seeded(seed);
    let data = (0..num_nodes * dim).map(|_| r.random::<f64>()).collect();
    AttributeMatrix::new(num_nodes, dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quality::{adjusted_mutual_information, kmeans};

    fn two_cliques(size: usize) -> Graph {
        let mut edges = Vec::new();
        for base in [0, size] {
            for a in 0..size {
                for b in a + 1..size {
                    edges.push((base + a, base + b));
                }
            }
        }
        Graph::from_edges(2 * size, edges).unwrap()
    }

    fn small_params(seed: u64) -> Node2VecParams {
        Node2VecParams {
            dim: 16,
            walks_per_node: 5,
            walk_length: 20,
            window: 5,
            seed,
            ..Node2VecParams::default()
        }
    }

    #[test]
    fn planted_cliques_recovered() {
        let g = two_cliques(20);
        let truth: Vec<usize> = (0..40).map(|v| v / 20).collect();
        for seed in 0..3 {
            let emb = node2vec(&g, &small_params(seed)).unwrap();
            let c = kmeans(&emb, 2, seed, 100, 1e-9).unwrap();
            assert!(adjusted_mutual_information(&truth, &c.labels).unwrap() >= 0.9);
        }
    }

    #[test]
    fn zero_epochs_keeps_initialization() {
        let g = two_cliques(4);
        let params = Node2VecParams {
            epochs: 0,
            ..small_params(3)
        };
        let emb = node2vec(&g, &params).unwrap();
        assert_eq!(emb, skipgram_init(&params, 8).input);
    }

    #[test]
    fn training_lowers_loss() {
        let g = two_cliques(6);
        let params = small_params(1);
        let corpus = biased_walks(&g, &params).unwrap();
        let before = skipgram_init(&params, 12).loss(&corpus, &params, 99).unwrap();
        let after = skipgram_train(&corpus, &params, 12).unwrap().loss(&corpus, &params, 99).unwrap();
        assert!(after < before, "{after} >= {before}");
    }

    #[test]
    fn single_worker_is_bitwise_deterministic() {
        let g = two_cliques(5);
        assert_eq!(node2vec(&g, &small_params(7)).unwrap(), node2vec(&g, &small_params(7)).unwrap());
    }

    #[test]
    fn absent_nodes_keep_init() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2)]).unwrap();
        let params = small_params(2);
        let emb = node2vec(&g, &params).unwrap();
        let init = skipgram_init(&params, 5).input;
        assert_eq!(emb.row(4), init.row(4));
        assert_ne!(emb.row(1), init.row(1));
    }

    #[test]
    fn racy_mode_runs() {
        let g = two_cliques(6);
        let params = Node2VecParams {
            workers: 4,
            ..small_params(0)
        };
        let emb = node2vec(&g, &params).unwrap();
        assert!(emb.as_slice().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn row_shuffle_permutes_rows() {
        let m = AttributeMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 7.0]]).unwrap();
        let s = shuffle_attributes(&m, 4).unwrap();
        let sums = |m: &AttributeMatrix| {
            let mut v: Vec<f64> = m.rows().map(|r| r.iter().sum()).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        assert_eq!(sums(&m), sums(&s));
        assert_eq!(s, shuffle_attributes(&m, 4).unwrap());
        let one = AttributeMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert_eq!(shuffle_attributes(&one, 9).unwrap(), one);
    }

    #[test]
    fn column_shuffle_keeps_histograms() {
        let m = random_attributes(50, 4, 1).unwrap();
        for mode in [ShuffleMode::Rows, ShuffleMode::Columns] {
            let s = shuffle_attributes_with(&m, 2, mode).unwrap();
            for col in 0..4 {
                let column = |m: &AttributeMatrix| {
                    let mut c: Vec<f64> = m.rows().map(|r| r[col]).collect();
                    c.sort_by(f64::total_cmp);
                    c
                };
                assert_eq!(column(&m), column(&s));
            }
        }
    }

    #[test]
    fn random_entries() {
        let m = random_attributes(1000, 1000, 5).unwrap();
        assert!(m.as_slice().iter().all(|&v| (0.0..1.0).contains(&v)));
        let mean = m.as_slice().iter().sum::<f64>() / 1e6;
        assert!((mean - 0.5).abs() < 0.005);
        assert_ne!(random_attributes(3, 2, 1).unwrap(), random_attributes(3, 2, 2).unwrap());
        assert!(random_attributes(0, 2, 1).is_err());
    }
}

//! On-disk split directories.
//!
//! ```text
//! nodes.txt                      every node key, in id order
//! train_edges.tsv                src<TAB>dst
//! valid_pos.tsv valid_neg.tsv
//! test_pos.tsv  test_neg.tsv
//! nodes_train.txt nodes_valid.txt nodes_test.txt
//! manifest.json
//! ```

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{EdgeSplit, Ratios};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, KeyMap, NodeId};
use crate::textio::{for_each_record, parse_error, write_lines};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Edge,
    Node,
    Temporal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub mode: SplitMode,
    pub seed: u64,
    #[serde(default)]
    pub ratios: Option<Ratios>,
    #[serde(default)]
    pub lost_edges: Option<usize>,
    #[serde(default)]
    pub temporal_index: Option<usize>,
    pub num_nodes: usize,
    pub num_edges: usize,
    pub train_edges: usize,
    pub valid_pos: usize,
    pub test_pos: usize,
    /// Input file path and SHA-256 digest, when the split came from a file.
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub source_sha256: Option<String>,
    pub version: String,
}

/// Everything a split directory holds, with edges on the ids of `keys`.
#[derive(Debug, Clone)]
pub struct SplitDir {
    pub keys: Arc<KeyMap>,
    pub edges: EdgeSplit,
    pub train_nodes: Vec<NodeId>,
    pub valid_nodes: Vec<NodeId>,
    pub test_nodes: Vec<NodeId>,
    pub manifest: SplitManifest,
}

impl SplitDir {
    /// The observed graph, on the full node universe.
    pub fn train_graph(&self) -> Graph {
        Graph::with_keys(Arc::clone(&self.keys), self.edges.train_edges.iter().copied())
            .expect("split edges are valid")
    }

    /// Graph holding every positive edge of the split.
    pub fn positive_graph(&self) -> Graph {
        let e = &self.edges;
        Graph::with_keys(
            Arc::clone(&self.keys),
            e.train_edges
                .iter()
                .chain(&e.valid_pos)
                .chain(&e.test_pos)
                .copied(),
        )
        .expect("split edges are valid")
    }
}

pub fn write_split_dir(dir: &Path, split: &SplitDir) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let keys = &split.keys;
    write_lines(&dir.join("nodes.txt"), keys.keys())?;
    let edges = |name: &str, list: &[Edge]| {
        write_lines(
            &dir.join(name),
            list.iter()
                .map(|&(a, b)| format!("{}\t{}", keys.key(a), keys.key(b))),
        )
    };
    edges("train_edges.tsv", &split.edges.train_edges)?;
    edges("valid_pos.tsv", &split.edges.valid_pos)?;
    edges("valid_neg.tsv", &split.edges.valid_neg)?;
    edges("test_pos.tsv", &split.edges.test_pos)?;
    edges("test_neg.tsv", &split.edges.test_neg)?;
    let nodes = |name: &str, list: &[NodeId]| {
        write_lines(&dir.join(name), list.iter().map(|&v| keys.key(v)))
    };
    nodes("nodes_train.txt", &split.train_nodes)?;
    nodes("nodes_valid.txt", &split.valid_nodes)?;
    nodes("nodes_test.txt", &split.test_nodes)?;
    let manifest = serde_json::to_string_pretty(&split.manifest)?;
    write_lines(&dir.join("manifest.json"), [manifest])
}

pub fn read_split_dir(dir: &Path) -> Result<SplitDir> {
    let manifest_path = dir.join("manifest.json");
    let text = std::fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let manifest: SplitManifest = serde_json::from_str(&text)?;

    let mut keys = KeyMap::new();
    let nodes_path = dir.join("nodes.txt");
    for_each_record(&nodes_path, false, |line, fields| {
        if fields.len() != 1 {
            return Err(parse_error(&nodes_path, line, "expected one key"));
        }
        keys.intern(fields[0]);
        Ok(())
    })?;
    let keys = Arc::new(keys);

    let read_edges = |name: &str| -> Result<Vec<Edge>> {
        let path = dir.join(name);
        let mut out = Vec::new();
        for_each_record(&path, false, |line, fields| {
            let [a, b] = fields else {
                return Err(parse_error(&path, line, "expected 2 node keys"));
            };
            let lookup = |k: &str| {
                keys.get(k)
                    .ok_or_else(|| parse_error(&path, line, format!("unknown node {k}")))
            };
            out.push((lookup(a)?, lookup(b)?));
            Ok(())
        })?;
        Ok(out)
    };
    let read_nodes = |name: &str| -> Result<Vec<NodeId>> {
        let path = dir.join(name);
        let mut out = Vec::new();
        for_each_record(&path, false, |line, fields| {
            let id = keys
                .get(fields[0])
                .ok_or_else(|| parse_error(&path, line, format!("unknown node {}", fields[0])))?;
            out.push(id);
            Ok(())
        })?;
        Ok(out)
    };

    Ok(SplitDir {
        edges: EdgeSplit {
            train_edges: read_edges("train_edges.tsv")?,
            valid_pos: read_edges("valid_pos.tsv")?,
            valid_neg: read_edges("valid_neg.tsv")?,
            test_pos: read_edges("test_pos.tsv")?,
            test_neg: read_edges("test_neg.tsv")?,
        },
        train_nodes: read_nodes("nodes_train.txt")?,
        valid_nodes: read_nodes("nodes_valid.txt")?,
        test_nodes: read_nodes("nodes_test.txt")?,
        keys,
        manifest,
    })
}

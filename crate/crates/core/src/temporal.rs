//! Ordered graph snapshots over one global node universe.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use crate::attrs::AttributeMatrix;
use crate::error::{Error, Result};
use crate::graph::{load_node_list, Edge, Graph, KeyMap, NodeId};
use crate::textio::{for_each_record, parse_error};

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub timestamp: i64,
    /// Edges present at this time, on the global id space.
    pub graph: Graph,
    /// Nodes that exist at this time: every edge endpoint plus any node
    /// registered explicitly.
    pub present: Vec<bool>,
    pub attrs: Option<AttributeMatrix>,
}

impl Snapshot {
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter_map(|(v, &p)| p.then_some(v))
    }

    pub fn num_present(&self) -> usize {
        self.present.iter().filter(|&&p| p).count()
    }
}

#[derive(Debug, Clone)]
pub struct TemporalGraphSequence {
    keys: Arc<KeyMap>,
    snapshots: Vec<Snapshot>,
}

impl TemporalGraphSequence {
    pub fn new(keys: Arc<KeyMap>, snapshots: Vec<Snapshot>) -> Result<Self> {
        for pair in snapshots.windows(2) {
            if pair[1].timestamp <= pair[0].timestamp {
                return Err(Error::invalid(format!(
                    "snapshot timestamps must increase strictly ({} then {})",
                    pair[0].timestamp, pair[1].timestamp
                )));
            }
        }
        for s in &snapshots {
            if s.graph.num_nodes() != keys.len() || s.present.len() != keys.len() {
                return Err(Error::invalid("snapshot does not share the global node universe"));
            }
            if let Some(a) = &s.attrs {
                if a.num_rows() != keys.len() {
                    return Err(Error::DimensionMismatch {
                        expected: keys.len(),
                        found: a.num_rows(),
                    });
                }
            }
        }
        Ok(Self { keys, snapshots })
    }

    /// Builds snapshots from per-time edge lists over an existing key map.
    /// Each layer is `(timestamp, edges, extra_present_nodes)`.
    pub fn from_edge_sets(
        keys: Arc<KeyMap>,
        layers: Vec<(i64, Vec<Edge>, Vec<NodeId>)>,
    ) -> Result<Self> {
        let n = keys.len();
        let mut snapshots = Vec::with_capacity(layers.len());
        for (timestamp, edges, extra) in layers {
            let graph = Graph::with_keys(Arc::clone(&keys), edges)?;
            let mut present = vec![false; n];
            for &(a, b) in graph.edges() {
                present[a] = true;
                present[b] = true;
            }
            for v in extra {
                if v >= n {
                    return Err(Error::UnknownNode(v));
                }
                present[v] = true;
            }
            snapshots.push(Snapshot {
                timestamp,
                graph,
                present,
                attrs: None,
            });
        }
        Self::new(keys, snapshots)
    }

    pub fn key_map(&self) -> &Arc<KeyMap> {
        &self.keys
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Attaches one attribute matrix to every snapshot.
    pub fn with_attributes(mut self, attrs: &AttributeMatrix) -> Result<Self> {
        if attrs.num_rows() != self.keys.len() {
            return Err(Error::DimensionMismatch {
                expected: self.keys.len(),
                found: attrs.num_rows(),
            });
        }
        for s in &mut self.snapshots {
            s.attrs = Some(attrs.clone());
        }
        Ok(self)
    }

    /// A graph over all edges of all snapshots, for loading attribute files
    /// against the global universe.
    pub fn union_graph(&self) -> Graph {
        let edges = self
            .snapshots
            .iter()
            .flat_map(|s| s.graph.edges().iter().copied());
        Graph::with_keys(Arc::clone(&self.keys), edges).expect("valid snapshot edges")
    }
}

/// How timestamped edges are grouped into snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bucketing {
    /// Width of a snapshot window in timestamp units.
    pub width: i64,
    /// When set, snapshot `t` holds every edge seen up to the end of its
    /// window instead of only the window's own edges.
    pub cumulative: bool,
}

/// Reads `src dst timestamp` records and groups them by
/// `floor(timestamp / width)`.
pub fn load_temporal_edges(path: &Path, bucketing: Bucketing) -> Result<TemporalGraphSequence> {
    if bucketing.width <= 0 {
        return Err(Error::invalid("bucket width must be positive"));
    }
    let mut keys = KeyMap::new();
    let mut buckets: BTreeMap<i64, Vec<Edge>> = BTreeMap::new();
    let records = for_each_record(path, false, |line, fields| {
        if fields.len() != 3 {
            return Err(parse_error(
                path,
                line,
                format!("expected src, dst, timestamp; found {} fields", fields.len()),
            ));
        }
        let ts: i64 = fields[2]
            .parse()
            .map_err(|_| parse_error(path, line, format!("bad timestamp {}", fields[2])))?;
        let a = keys.intern(fields[0]);
        let b = keys.intern(fields[1]);
        buckets
            .entry(ts.div_euclid(bucketing.width) * bucketing.width)
            .or_default()
            .push((a, b));
        Ok(())
    })?;
    if records == 0 {
        return Err(Error::Empty(format!("{} has no temporal edges", path.display())));
    }
    let keys = Arc::new(keys);
    let mut layers = Vec::with_capacity(buckets.len());
    let mut running: Vec<Edge> = Vec::new();
    for (ts, edges) in buckets {
        if bucketing.cumulative {
            running.extend(edges);
            layers.push((ts, running.clone(), Vec::new()));
        } else {
            layers.push((ts, edges, Vec::new()));
        }
    }
    TemporalGraphSequence::from_edge_sets(keys, layers)
}

/// Reads a directory of `<timestamp>.edges` files (two keys per line), each
/// with an optional `<timestamp>.nodes` list of nodes present at that time.
pub fn load_snapshot_dir(dir: &Path) -> Result<TemporalGraphSequence> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files: Vec<(i64, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("edges") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let ts: i64 = stem.parse().map_err(|_| {
            Error::invalid(format!("snapshot file name is not a timestamp: {}", path.display()))
        })?;
        files.push((ts, path));
    }
    if files.is_empty() {
        return Err(Error::Empty(format!("{} has no .edges snapshots", dir.display())));
    }
    files.sort();

    let mut keys = KeyMap::new();
    let mut raw = Vec::with_capacity(files.len());
    for (ts, path) in &files {
        let mut edges = Vec::new();
        for_each_record(path, false, |line, fields| {
            if fields.len() != 2 {
                return Err(parse_error(path, line, "expected 2 node keys"));
            }
            edges.push((keys.intern(fields[0]), keys.intern(fields[1])));
            Ok(())
        })?;
        let nodes_path = path.with_extension("nodes");
        let mut extra = Vec::new();
        if nodes_path.exists() {
            let mut listed = KeyMap::new();
            load_node_list(&nodes_path, &mut listed)?;
            for k in listed.keys() {
                extra.push(keys.intern(k));
            }
        }
        raw.push((*ts, edges, extra));
    }
    TemporalGraphSequence::from_edge_sets(Arc::new(keys), raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn timestamps_must_increase() {
        let keys = Arc::new(KeyMap::numeric(2));
        let layers = vec![(5, vec![(0, 1)], vec![]), (5, vec![(0, 1)], vec![])];
        assert!(TemporalGraphSequence::from_edge_sets(keys, layers).is_err());
    }

    #[test]
    fn bucketed_file() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "a b 2014\nb c 2014\nc d 2015\nd d 2015\na e 2016").unwrap();
        let seq = load_temporal_edges(
            f.path(),
            Bucketing {
                width: 1,
                cumulative: false,
            },
        )
        .unwrap();
        assert_eq!(seq.len(), 3);
        assert_eq!(seq.snapshots()[0].graph.num_edges(), 2);
        assert_eq!(seq.snapshots()[1].graph.num_edges(), 1);
        assert_eq!(seq.snapshots()[1].num_present(), 2);

        let cumulative = load_temporal_edges(
            f.path(),
            Bucketing {
                width: 1,
                cumulative: true,
            },
        )
        .unwrap();
        assert_eq!(cumulative.snapshots()[2].graph.num_edges(), 4);
    }

    #[test]
    fn snapshot_directory() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("2015.edges"), "a b\na c\n").unwrap();
        std::fs::write(dir.path().join("2014.edges"), "a b\n").unwrap();
        std::fs::write(dir.path().join("2014.nodes"), "z\n").unwrap();
        std::fs::write(dir.path().join("README"), "ignored").unwrap();
        let seq = load_snapshot_dir(dir.path()).unwrap();
        assert_eq!(seq.snapshots()[0].timestamp, 2014);
        assert_eq!(seq.snapshots()[0].num_present(), 3);
        assert_eq!(seq.snapshots()[1].graph.num_edges(), 2);
        assert_eq!(seq.key_map().len(), 4);
    }
}

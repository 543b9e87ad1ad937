use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::warn;

use super::{DropCounts, Graph, KeyMap};
use crate::error::{Error, Result};
use crate::textio::{for_each_record, parse_error, write_lines};

/// Layout of an edge-list file.
#[derive(Debug, Clone, Default)]
pub struct EdgeListFormat {
    /// First non-comment line is a header.
    pub has_header: bool,
    /// Optional file with one node key per line, used to register nodes that
    /// have no edges (attribute-only newcomers).
    pub node_list: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub dropped: DropCounts,
}

/// Reads an undirected edge list. Ids follow first appearance in the edge
/// file; node-list keys not seen among edges are appended afterwards.
pub fn load_graph(path: &Path, format: &EdgeListFormat) -> Result<LoadedGraph> {
    let mut keys = KeyMap::new();
    let mut edges = Vec::new();
    let records = for_each_record(path, format.has_header, |line, fields| {
        if fields.len() != 2 {
            return Err(parse_error(
                path,
                line,
                format!("expected 2 node keys, found {} fields", fields.len()),
            ));
        }
        let a = keys.intern(fields[0]);
        let b = keys.intern(fields[1]);
        edges.push((a, b));
        Ok(())
    })?;
    let mut listed = 0;
    if let Some(list) = &format.node_list {
        listed = load_node_list(list, &mut keys)?;
    }
    if records == 0 && listed == 0 {
        return Err(Error::Empty(format!("{} has no edge records", path.display())));
    }
    let (graph, dropped) = Graph::with_keys_counted(Arc::new(keys), edges)?;
    if dropped.self_loops > 0 || dropped.duplicates > 0 {
        warn!(
            "{}: dropped {} self-loop(s) and {} duplicate edge(s)",
            path.display(),
            dropped.self_loops,
            dropped.duplicates
        );
    }
    Ok(LoadedGraph { graph, dropped })
}

/// Registers every key of a one-key-per-line file; returns the record count.
pub fn load_node_list(path: &Path, keys: &mut KeyMap) -> Result<usize> {
    for_each_record(path, false, |line, fields| {
        if fields.len() != 1 {
            return Err(parse_error(path, line, "expected a single node key"));
        }
        keys.intern(fields[0]);
        Ok(())
    })
}

/// Writes `src<TAB>dst` per edge using external keys.
pub fn save_graph(graph: &Graph, path: &Path) -> Result<()> {
    write_lines(
        path,
        graph
            .edges()
            .iter()
            .map(|&(a, b)| format!("{}\t{}", graph.key(a), graph.key(b))),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file_with(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn dedups_undirected_edges() {
        let f = file_with("a b\nb\tc\n# comment\na b\n");
        let loaded = load_graph(f.path(), &EdgeListFormat::default()).unwrap();
        assert_eq!(loaded.graph.num_nodes(), 3);
        assert_eq!(loaded.graph.num_edges(), 2);
        assert_eq!(loaded.dropped.duplicates, 1);
        assert_eq!(loaded.graph.node_id("c"), Some(2));
    }

    #[test]
    fn self_loop_counted() {
        let f = file_with("a a\n");
        let loaded = load_graph(f.path(), &EdgeListFormat::default()).unwrap();
        assert_eq!(loaded.graph.num_nodes(), 1);
        assert_eq!(loaded.graph.num_edges(), 0);
        assert_eq!(loaded.dropped.self_loops, 1);
    }

    #[test]
    fn malformed_line_reports_number() {
        let f = file_with("a b\nc\n");
        match load_graph(f.path(), &EdgeListFormat::default()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_file_rejected() {
        let f = file_with("# only a comment\n\n");
        assert!(matches!(
            load_graph(f.path(), &EdgeListFormat::default()),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn header_and_node_list() {
        let f = file_with("src dst\nx y\n");
        let nodes = file_with("y\nz\n");
        let format = EdgeListFormat {
            has_header: true,
            node_list: Some(nodes.path().to_path_buf()),
        };
        let g = load_graph(f.path(), &format).unwrap().graph;
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.degree(g.node_id("z").unwrap()), 0);
    }

    #[test]
    fn save_then_load_is_identical() {
        let f = file_with("p q\nq r\nr p\ns q\n");
        let g = load_graph(f.path(), &EdgeListFormat::default()).unwrap().graph;
        let out = tempfile::NamedTempFile::new().unwrap();
        save_graph(&g, out.path()).unwrap();
        let again = load_graph(out.path(), &EdgeListFormat::default()).unwrap().graph;
        let keyed = |g: &Graph| {
            let mut v: Vec<_> = g
                .edges()
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (g.key(a).to_owned(), g.key(b).to_owned());
                    if x < y { (x, y) } else { (y, x) }
                })
                .collect();
            v.sort();
            v
        };
        assert_eq!(keyed(&g), keyed(&again));
    }
}

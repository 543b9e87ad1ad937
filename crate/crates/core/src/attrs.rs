//! Dense node-aligned attribute rows and their text format.
//!
//! The same text layout (`key v1 v2 ... vd`) is used for pre-trained
//! attributes, shuffled and random variants, and learned embeddings.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::textio::{create, finish, for_each_record, parse_error};

/// Row-major real matrix; row `i` belongs to node id `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributeMatrix {
    rows: usize,
    dim: usize,
    data: Vec<f64>,
}

impl AttributeMatrix {
    pub fn new(rows: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::DimensionMismatch {
                expected: rows * dim,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim.max(1),
                col: pos % dim.max(1),
                value: data[pos],
            });
        }
        Ok(Self { rows, dim, data })
    }

    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            data: vec![0.0; rows * dim],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), dim, data)
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        // chunks_exact would reject dim == 0
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Rows selected in the given order.
    pub fn select_rows(&self, ids: &[usize]) -> Self {
        let mut data = Vec::with_capacity(ids.len() * self.dim);
        for &i in ids {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: ids.len(),
            dim: self.dim,
            data,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedAttributes {
    pub matrix: AttributeMatrix,
    /// Records whose key is not a node of the graph.
    pub extra_keys: usize,
}

/// Reads `key v1 ... vd` records and orders them by the graph's node ids.
pub fn load_attributes(path: &Path, graph: &Graph) -> Result<LoadedAttributes> {
    let n = graph.num_nodes();
    let mut dim: Option<usize> = None;
    let mut data: Vec<f64> = Vec::new();
    let mut seen = vec![false; n];
    let mut extra = 0usize;
    let mut extra_keys = HashSet::new();

    for_each_record(path, false, |line, fields| {
        let values = &fields[1..];
        let d = *dim.get_or_insert(values.len());
        if d == 0 {
            return Err(parse_error(path, line, "record has no attribute values"));
        }
        if values.len() != d {
            return Err(parse_error(
                path,
                line,
                format!("dimension mismatch: expected {d} values, found {}", values.len()),
            ));
        }
        if data.is_empty() {
            data = vec![0.0; n * d];
        }
        let Some(id) = graph.node_id(fields[0]) else {
            if !extra_keys.insert(fields[0].to_owned()) {
                return Err(parse_error(path, line, format!("duplicate key {}", fields[0])));
            }
            extra += 1;
            return Ok(());
        };
        if std::mem::replace(&mut seen[id], true) {
            return Err(parse_error(path, line, format!("duplicate key {}", fields[0])));
        }
        for (j, raw) in values.iter().enumerate() {
            let v: f64 = raw
                .parse()
                .map_err(|_| parse_error(path, line, format!("not a number: {raw}")))?;
            if !v.is_finite() {
                return Err(parse_error(path, line, format!("non-finite value {raw}")));
            }
            data[id * d + j] = v;
        }
        Ok(())
    })?;

    let Some(dim) = dim else {
        return Err(Error::Empty(format!("{} has no attribute records", path.display())));
    };
    let missing: Vec<String> = (0..n)
        .filter(|&v| !seen[v])
        .map(|v| graph.key(v).to_owned())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingNodes(missing));
    }
    if extra > 0 {
        warn!("{}: ignored {extra} record(s) for unknown nodes", path.display());
    }
    Ok(LoadedAttributes {
        matrix: AttributeMatrix::new(n, dim, data)?,
        extra_keys: extra,
    })
}

/// Writes one record per row using the graph's external keys. Values use
/// Rust's shortest round-trip formatting, so a save/load cycle is lossless.
pub fn save_attributes(matrix: &AttributeMatrix, graph: &Graph, path: &Path) -> Result<()> {
    if matrix.num_rows() != graph.num_nodes() {
        return Err(Error::DimensionMismatch {
            expected: graph.num_nodes(),
            found: matrix.num_rows(),
        });
    }
    let mut w = create(path)?;
    for (i, row) in matrix.rows().enumerate() {
        let mut line = String::from(graph.key(i));
        for v in row {
            line.push(' ');
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    finish(path, w)
}

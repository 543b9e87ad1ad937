//! Test performance broken down by the train-graph degree of edge endpoints.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::ranking::{auroc, hits_at_k, ScoredEdges};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::textio::{create, finish};

/// Which endpoint degree keys an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKey {
    #[default]
    Min,
    Max,
    Mean,
}

/// Which negatives a bin's positives are ranked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NegativeBinning {
    /// Negatives binned by the same degree key.
    #[default]
    SameBin,
    /// Every bin uses the full negative set.
    Global,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BinningOptions {
    pub key: DegreeKey,
    pub negatives: NegativeBinning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeBinRow {
    pub bin_lo: f64,
    pub bin_hi: f64,
    /// Positive test edges in this bin.
    pub count: usize,
    pub neg_count: usize,
    pub hits_at_k: Option<f64>,
    pub auroc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeBinTable {
    pub k: usize,
    pub rows: Vec<DegreeBinRow>,
}

pub fn degree_binned(
    train_graph: &Graph,
    test_pos: &[Edge],
    test_neg: &[Edge],
    scores: &ScoredEdges,
    k: usize,
    num_bins: usize,
) -> Result<DegreeBinTable> {
    degree_binned_with(
        train_graph,
        test_pos,
        test_neg,
        scores,
        k,
        num_bins,
        BinningOptions::default(),
    )
}

/// Bins are logarithmically spaced over `[1, max train degree]`; keys below
/// 1 (newcomers with no train edges) fall in the lowest bin. Bins without
/// positives, or without enough negatives, report `None` metrics.
pub fn degree_binned_with(
    train_graph: &Graph,
    test_pos: &[Edge],
    test_neg: &[Edge],
    scores: &ScoredEdges,
    k: usize,
    num_bins: usize,
    options: BinningOptions,
) -> Result<DegreeBinTable> {
    if num_bins == 0 {
        return Err(Error::invalid("number of bins must be positive"));
    }
    if scores.pos_scores.len() != test_pos.len() || scores.neg_scores.len() != test_neg.len() {
        return Err(Error::invalid("scores are not aligned with the test edges"));
    }
    let max_degree = train_graph.degrees().into_iter().max().unwrap_or(0).max(1) as f64;
    let key = |&(a, b): &Edge| -> Result<f64> {
        if a >= train_graph.num_nodes() || b >= train_graph.num_nodes() {
            return Err(Error::UnknownNode(a.max(b)));
        }
        let (da, db) = (train_graph.degree(a) as f64, train_graph.degree(b) as f64);
        Ok(match options.key {
            DegreeKey::Min => da.min(db),
            DegreeKey::Max => da.max(db),
            DegreeKey::Mean => 0.5 * (da + db),
        })
    };
    let bin_of = |d: f64| -> usize {
        if d <= 1.0 || max_degree <= 1.0 {
            return 0;
        }
        let pos = num_bins as f64 * d.ln() / max_degree.ln();
        (pos.floor() as usize).min(num_bins - 1)
    };

    let mut pos_bins = vec![Vec::new(); num_bins];
    for (e, &s) in test_pos.iter().zip(&scores.pos_scores) {
        pos_bins[bin_of(key(e)?)].push(s);
    }
    let mut neg_bins = vec![Vec::new(); num_bins];
    for (e, &s) in test_neg.iter().zip(&scores.neg_scores) {
        neg_bins[bin_of(key(e)?)].push(s);
    }

    let rows = (0..num_bins)
        .map(|i| {
            let negs = match options.negatives {
                NegativeBinning::SameBin => neg_bins[i].clone(),
                NegativeBinning::Global => scores.neg_scores.clone(),
            };
            let local = ScoredEdges {
                pos_scores: pos_bins[i].clone(),
                neg_scores: negs,
            };
            let usable = !local.pos_scores.is_empty() && !local.neg_scores.is_empty();
            DegreeBinRow {
                bin_lo: max_degree.powf(i as f64 / num_bins as f64),
                bin_hi: max_degree.powf((i + 1) as f64 / num_bins as f64),
                count: local.pos_scores.len(),
                neg_count: local.neg_scores.len(),
                hits_at_k: (usable && local.neg_scores.len() >= k)
                    .then(|| hits_at_k(&local, k).ok())
                    .flatten(),
                auroc: usable.then(|| auroc(&local).ok()).flatten(),
            }
        })
        .collect();
    Ok(DegreeBinTable { k, rows })
}

impl DegreeBinTable {
    /// CSV with columns `bin_lo,bin_hi,count,hits_at_k,auroc`; undefined
    /// metrics are left empty.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = create(path)?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let io = |e| Error::io(path, e);
        writeln!(w, "bin_lo,bin_hi,count,hits_at_k,auroc").map_err(io)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                r.bin_lo,
                r.bin_hi,
                r.count,
                opt(r.hits_at_k),
                opt(r.auroc)
            )
            .map_err(io)?;
        }
        finish(path, w)
    }

    pub fn total_count(&self) -> usize {
        self.rows.iter().map(|r| r.count).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_degree_gives_single_bin_equal_to_global() {
        // 6-cycle: every degree is 2
        let g = Graph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6))).unwrap();
        let pos = vec![(0, 2), (1, 3)];
        let neg = vec![(0, 3), (1, 4), (2, 5)];
        let sc = ScoredEdges::new(vec![0.9, 0.2], vec![0.5, 0.1, 0.3]).unwrap();
        let t = degree_binned(&g, &pos, &neg, &sc, 1, 4).unwrap();
        let occupied: Vec<_> = t.rows.iter().filter(|r| r.count > 0).collect();
        assert_eq!(occupied.len(), 1);
        assert_eq!(occupied[0].hits_at_k, Some(hits_at_k(&sc, 1).unwrap()));
        assert_eq!(occupied[0].auroc, Some(auroc(&sc).unwrap()));
        assert_eq!(t.total_count(), 2);
    }

    #[test]
    fn newcomers_land_in_lowest_bin() {
        let g = Graph::from_edges(6, vec![(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)]).unwrap();
        let pos = vec![(5, 0), (1, 2)];
        let neg = vec![(5, 1)];
        let sc = ScoredEdges::new(vec![0.4, 0.6], vec![0.5]).unwrap();
        let t = degree_binned(&g, &pos, &neg, &sc, 1, 3).unwrap();
        assert_eq!(t.rows[0].count, 1);
        assert_eq!(t.rows[0].neg_count, 1);
        assert_eq!(t.total_count(), 2);
        // bins keep their place even when empty
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().any(|r| r.count == 0 && r.auroc.is_none()));
    }

    #[test]
    fn misaligned_scores_rejected() {
        let g = Graph::from_edges(3, vec![(0, 1)]).unwrap();
        let sc = ScoredEdges::new(vec![0.4], vec![]).unwrap();
        assert!(degree_binned(&g, &[(0, 1), (1, 2)], &[], &sc, 1, 2).is_err());
    }

    #[test]
    fn csv_has_empty_cells_for_null_metrics() {
        let g = Graph::from_edges(3, vec![(0, 1)]).unwrap();
        let sc = ScoredEdges::new(vec![0.4], vec![]).unwrap();
        let t = degree_binned(&g, &[(0, 1)], &[], &sc, 1, 1).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        t.write_csv(f.path()).unwrap();
        let text = std::fs::read_to_string(f.path()).unwrap();
        assert_eq!(text, "bin_lo,bin_hi,count,hits_at_k,auroc\n1,1,1,,\n");
    }
}

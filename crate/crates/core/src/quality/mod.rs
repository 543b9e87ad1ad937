//! Attribute-quality scoring: k-means, the Davies-Bouldin index, adjusted
//! mutual information against topology clusters, and the information
//! bound on generalization error.

mod ami;
mod kmeans;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::attrs::AttributeMatrix;
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub use ami::{
    adjusted_mutual_information, adjusted_mutual_information_with, entropy,
    expected_mutual_information, mutual_information, AmiNormalization,
};
pub use kmeans::{kmeans, kmeans_restarts, Clustering, DEFAULT_RESTARTS, DEFAULT_MAX_ITER, DEFAULT_TOL};

/// Cluster counts scored by default.
pub const DEFAULT_KS: [usize; 3] = [3, 5, 8];

/// Mean over nonempty clusters of the worst `(s_i + s_j) / d(c_i, c_j)`,
/// with centroids recomputed from the labels. Lower is better.
pub fn davies_bouldin(points: &AttributeMatrix, clustering: &Clustering) -> Result<f64> {
    davies_bouldin_labels(points, &clustering.labels)
}

pub fn davies_bouldin_labels(points: &AttributeMatrix, labels: &[usize]) -> Result<f64> {
    if labels.len() != points.num_rows() {
        return Err(Error::DimensionMismatch {
            expected: points.num_rows(),
            found: labels.len(),
        });
    }
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let dim = points.dim();
    let mut centroids = vec![vec![0.0; dim]; k];
    let mut sizes = vec![0usize; k];
    for (p, &l) in points.rows().zip(labels) {
        sizes[l] += 1;
        for (c, v) in centroids[l].iter_mut().zip(p) {
            *c += v;
        }
    }
    let live: Vec<usize> = (0..k).filter(|&c| sizes[c] > 0).collect();
    if live.len() < 2 {
        return Err(Error::invalid(format!(
            "Davies-Bouldin needs at least 2 nonempty clusters, found {}",
            live.len()
        )));
    }
    for &c in &live {
        let s = sizes[c] as f64;
        centroids[c].iter_mut().for_each(|v| *v /= s);
    }
    let mut spread = vec![0.0; k];
    for (p, &l) in points.rows().zip(labels) {
        spread[l] += dist(p, &centroids[l]);
    }
    for &c in &live {
        spread[c] /= sizes[c] as f64;
    }
    let mut total = 0.0;
    for &i in &live {
        let mut worst: f64 = 0.0;
        for &j in &live {
            if i == j {
                continue;
            }
            let d = dist(&centroids[i], &centroids[j]);
            if d == 0.0 {
                return Err(Error::CoincidentCentroids(i.min(j), i.max(j)));
            }
            worst = worst.max((spread[i] + spread[j]) / d);
        }
        total += worst;
    }
    Ok(total / live.len() as f64)
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `sqrt(2 sigma^2 I)`: the bound on expected generalization error of a
/// `sigma`-subgaussian loss whose hypothesis shares `I` nats with the data.
pub fn generalization_bound(sigma: f64, mutual_info: f64) -> Result<f64> {
    if !(sigma >= 0.0) || !(mutual_info >= 0.0) {
        return Err(Error::invalid(format!(
            "bound inputs must be nonnegative (sigma = {sigma}, I = {mutual_info})"
        )));
    }
    Ok((2.0 * sigma * sigma * mutual_info).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub k: usize,
    pub seed: u64,
    /// k-means runs per matrix; the lowest-inertia run is scored.
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub normalization: AmiNormalization,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            k: 5,
            seed: 0,
            restarts: DEFAULT_RESTARTS,
            max_iter: DEFAULT_MAX_ITER,
            tol: DEFAULT_TOL,
            normalization: AmiNormalization::Arithmetic,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeReport {
    pub k: usize,
    pub seed: u64,
    /// Davies-Bouldin score of each attribute variant.
    pub db: BTreeMap<String, f64>,
    /// AMI between the reference variant's clusters and the topology
    /// embedding's clusters.
    pub ami: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
}

impl AttributeReport {
    /// Fills `bound` from a fitted subgaussian `sigma` and the report's AMI
    /// (clamped at 0, since a chance-corrected score can dip below it).
    pub fn with_bound(mut self, sigma: f64) -> Result<Self> {
        self.bound = Some(generalization_bound(sigma, self.ami.max(0.0))?);
        Ok(self)
    }
}

/// Scores attribute variants on the nodes that carry at least one edge of
/// `graph`. `reference` names the variant compared against
/// `topology_embedding`.
pub fn attribute_report(
    graph: &Graph,
    variants: &BTreeMap<String, AttributeMatrix>,
    reference: &str,
    topology_embedding: &AttributeMatrix,
    options: &ReportOptions,
) -> Result<AttributeReport> {
    let nodes: Vec<NodeId> = graph.non_isolated().collect();
    if nodes.len() < 2 {
        return Err(Error::Empty("graph has fewer than 2 connected nodes".into()));
    }
    let check = |name: &str, m: &AttributeMatrix| {
        if m.num_rows() != graph.num_nodes() {
            return Err(Error::invalid(format!(
                "attribute variant '{name}' has {} rows for {} nodes",
                m.num_rows(),
                graph.num_nodes()
            )));
        }
        Ok(())
    };
    check("topology", topology_embedding)?;
    if !variants.contains_key(reference) {
        return Err(Error::invalid(format!("no attribute variant named '{reference}'")));
    }
    let cluster = |m: &AttributeMatrix| {
        let pts = m.select_rows(&nodes);
        kmeans_restarts(&pts, options.k, options.seed, options.restarts, options.max_iter, options.tol).map(|c| (pts, c))
    };

    let mut db = BTreeMap::new();
    let mut reference_labels = Vec::new();
    for (name, m) in variants {
        check(name, m)?;
        let (pts, c) = cluster(m)?;
        db.insert(name.clone(), davies_bouldin(&pts, &c)?);
        if name == reference {
            reference_labels = c.labels;
        }
    }
    let (_, topo) = cluster(topology_embedding)?;
    let ami = adjusted_mutual_information_with(&reference_labels, &topo.labels, options.normalization)?;
    Ok(AttributeReport {
        k: options.k,
        seed: options.seed,
        db,
        ami,
        bound: None,
    })
}

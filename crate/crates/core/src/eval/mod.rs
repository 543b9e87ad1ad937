//! Ranking metrics, degree-binned breakdowns and the loss-tail diagnostic.

mod degree_bins;
mod ranking;
mod subgaussian;

pub use degree_bins::{
    degree_binned, degree_binned_with, BinningOptions, DegreeBinRow, DegreeBinTable, DegreeKey,
    NegativeBinning,
};
pub use ranking::{auprc, auroc, hits_at_k, MetricReport, ScoredEdges};
pub use subgaussian::{fit_subgaussian, fit_subgaussian_losses, SubgaussianFit};

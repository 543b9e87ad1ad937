//! Toolkit for building and evaluating inductive link prediction pipelines.
//!
//! * [`graph`], [`attrs`], [`temporal`]: data model, file formats and
//!   per-node topological features.
//! * [`split`]: transductive edge splits, random node splits and temporal
//!   snapshot splits with exact edge accounting.
//! * [`null_model`]: degree-sequence scorers that expose topological
//!   shortcuts.
//! * [`embed`]: Node2Vec embeddings plus shuffled and random attribute
//!   variants.
//! * [`quality`]: k-means, Davies-Bouldin, adjusted mutual information and
//!   the information-theoretic generalization bound.
//! * [`predictor`]: attribute-only MLP link predictor.
//! * [`eval`]: ranking metrics, degree-binned analysis and the subgaussian
//!   loss-tail fit.
//! * [`pipeline`]: end-to-end runs driven by a config and recorded in a
//!   manifest.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attrs;
pub mod embed;
pub mod error;
pub mod eval;
pub mod graph;
pub mod null_model;
pub mod pipeline;
pub mod predictor;
pub mod quality;
pub mod rng;
pub mod split;
pub mod synth;
pub mod temporal;
mod textio;

pub use attrs::AttributeMatrix;
pub use error::{Error, Result};
pub use graph::{Edge, Graph, NodeId};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Attribute-only link predictor: an MLP over the concatenated attribute
//! rows of the two endpoints, trained with binary cross-entropy and Adam.
//!
//! Undirected symmetry is handled by presenting every training pair in both
//! endpoint orders and by averaging both orders at inference.

mod io;
mod mlp;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::attrs::AttributeMatrix;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, NodeId};
use crate::null_model::EdgeScorer;
use crate::rng;
use crate::split::{sample_negatives, EndpointConstraint};

pub use io::{load_model, read_trace_csv, save_model, write_trace_csv, MODEL_MAGIC, MODEL_VERSION};
pub use mlp::{Layer, MlpModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Fresh uniform non-edges drawn each epoch per positive edge.
    pub negatives_per_positive: f64,
    pub seed: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 200,
            negatives_per_positive: 1.0,
            seed: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || self.batch_size == 0 || !(self.negatives_per_positive > 0.0)
        {
            return Err(Error::invalid(
                "learning rate, batch size and negative ratio must be positive",
            ));
        }
        if !(0.0 < self.beta1 && self.beta1 < 1.0 && 0.0 < self.beta2 && self.beta2 < 1.0) {
            return Err(Error::invalid("Adam betas must lie in (0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid("Adam epsilon must be positive"));
        }
        Ok(())
    }
}

/// Hidden widths used when none are given: three layers of 100 units.
pub const DEFAULT_HIDDEN: [usize; 3] = [100, 100, 100];

/// Mean training loss of each epoch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainTrace {
    pub losses: Vec<f64>,
}

/// An edge with its target: 1 for an observed edge, 0 for a non-edge.
pub type LabeledEdge = (Edge, f64);

/// Trains on `pos_edges` against per-epoch uniform non-edges among the
/// nodes that appear in `pos_edges`.
pub fn train_link_mlp(
    attrs: &AttributeMatrix,
    pos_edges: &[Edge],
    config: &TrainConfig,
    hidden_dims: &[usize],
) -> Result<(MlpModel, TrainTrace)> {
    config.validate()?;
    if pos_edges.is_empty() {
        return Err(Error::Empty("no positive training edges".into()));
    }
    if hidden_dims.is_empty() {
        return Err(Error::invalid("at least one hidden layer is required"));
    }
    let n = attrs.num_rows();
    if let Some(&(a, b)) = pos_edges.iter().find(|&&(a, b)| a >= n || b >= n) {
        return Err(Error::UnknownNode(a.max(b)));
    }

    let mut dims = vec![2 * attrs.dim()];
    dims.extend_from_slice(hidden_dims);
    dims.push(1);
    let mut model = MlpModel::new(&dims, rng::derive(config.seed, &[0]))?;
    let mut trace = TrainTrace::default();
    if config.epochs == 0 {
        return Ok((model, trace));
    }

    let positives = Graph::from_edges(n, pos_edges.iter().copied())?;
    let pool: Vec<NodeId> = positives
        .edges()
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let n_neg = ((positives.num_edges() as f64 * config.negatives_per_positive).round() as usize).max(1);

    let mut adam = Adam::new(model.num_params(), config);
    for epoch in 0..config.epochs {
        let negs = sample_negatives(
            &positives,
            n_neg,
            rng::derive(config.seed, &[1, epoch as u64]),
            Some(EndpointConstraint {
                left: &pool,
                right: &pool,
            }),
        )?;
        let mut samples: Vec<LabeledEdge> = positives
            .edges()
            .iter()
            .map(|&e| (e, 1.0))
            .chain(negs.into_iter().map(|e| (e, 0.0)))
            .collect();
        samples.shuffle(&mut rng::seeded(rng::derive(config.seed, &[2, epoch as u64])));

        let mut total = 0.0;
        for batch in samples.chunks(config.batch_size) {
            let (loss, grads) = loss_and_gradients(&model, attrs, batch)?;
            total += loss * batch.len() as f64;
            adam.step(&mut model, &grads);
        }
        trace.losses.push(total / samples.len() as f64);
    }
    Ok((model, trace))
}

/// Mean binary cross-entropy of `batch`, each pair counted in both endpoint
/// orders, and its gradient with respect to every parameter (flattened in
/// [`MlpModel::flat_params`] order).
pub fn loss_and_gradients(
    model: &MlpModel,
    attrs: &AttributeMatrix,
    batch: &[LabeledEdge],
) -> Result<(f64, Vec<f64>)> {
    if batch.is_empty() {
        return Err(Error::Empty("empty batch".into()));
    }
    check_input(model, attrs)?;
    let mut grads = model.zero_grads();
    let mut acts: Vec<Vec<f64>> = vec![Vec::new()];
    let mut loss = 0.0;
    for &((a, b), y) in batch {
        for (u, v) in [(a, b), (b, a)] {
            acts[0] = concat(attrs, u, v)?;
            let z = model.forward_cached(&mut acts);
            // softplus(z) - y z, stable for large |z|
            loss += z.max(0.0) - y * z + (-z.abs()).exp().ln_1p();
            let p = 1.0 / (1.0 + (-z).exp());
            model.backward(&acts, p - y, &mut grads);
        }
    }
    let count = 2.0 * batch.len() as f64;
    let mut flat = Vec::with_capacity(model.num_params());
    for g in grads {
        flat.extend(g.weights.into_iter().map(|v| v / count));
        flat.extend(g.bias.into_iter().map(|v| v / count));
    }
    Ok((loss / count, flat))
}

/// Symmetrized edge probability `(f(a||b) + f(b||a)) / 2`.
pub fn predict_edge(model: &MlpModel, attrs: &AttributeMatrix, a: NodeId, b: NodeId) -> Result<f64> {
    check_input(model, attrs)?;
    let ab = mlp::sigmoid(model.logit(&concat(attrs, a, b)?));
    let ba = mlp::sigmoid(model.logit(&concat(attrs, b, a)?));
    Ok(0.5 * (ab + ba))
}

/// Largest relative gap between the analytic gradient and a central finite
/// difference with step `epsilon`, over every parameter. The relative gap
/// uses `max(|analytic|, |numeric|, 1e-6)` as its denominator.
pub fn gradient_check(
    model: &MlpModel,
    attrs: &AttributeMatrix,
    batch: &[LabeledEdge],
    epsilon: f64,
) -> Result<f64> {
    let (_, analytic) = loss_and_gradients(model, attrs, batch)?;
    let base = model.flat_params();
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for i in 0..base.len() {
        let mut p = base.clone();
        p[i] = base[i] + epsilon;
        probe.set_flat_params(&p);
        let up = batch_loss(&probe, attrs, batch)?;
        p[i] = base[i] - epsilon;
        probe.set_flat_params(&p);
        let down = batch_loss(&probe, attrs, batch)?;
        let numeric = (up - down) / (2.0 * epsilon);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    Ok(worst)
}

fn batch_loss(model: &MlpModel, attrs: &AttributeMatrix, batch: &[LabeledEdge]) -> Result<f64> {
    let mut loss = 0.0;
    for &((a, b), y) in batch {
        for (u, v) in [(a, b), (b, a)] {
            let z = model.logit(&concat(attrs, u, v)?);
            loss += z.max(0.0) - y * z + (-z.abs()).exp().ln_1p();
        }
    }
    Ok(loss / (2.0 * batch.len() as f64))
}

fn check_input(model: &MlpModel, attrs: &AttributeMatrix) -> Result<()> {
    if model.input_dim() != 2 * attrs.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            found: 2 * attrs.dim(),
        });
    }
    Ok(())
}

fn concat(attrs: &AttributeMatrix, a: NodeId, b: NodeId) -> Result<Vec<f64>> {
    for v in [a, b] {
        if v >= attrs.num_rows() {
            return Err(Error::UnknownNode(v));
        }
    }
    let mut x = Vec::with_capacity(2 * attrs.dim());
    x.extend_from_slice(attrs.row(a));
    x.extend_from_slice(attrs.row(b));
    Ok(x)
}

struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
}

impl Adam {
    fn new(n: usize, config: &TrainConfig) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            lr: config.learning_rate,
            beta1: config.beta1,
            beta2: config.beta2,
            eps: config.epsilon,
        }
    }

    fn step(&mut self, model: &mut MlpModel, grads: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for (((p, g), m), v) in model
            .params_mut()
            .zip(grads)
            .zip(self.m.iter_mut())
            .zip(self.v.iter_mut())
        {
            *m = self.beta1 * *m + (1.0 - self.beta1) * g;
            *v = self.beta2 * *v + (1.0 - self.beta2) * g * g;
            *p -= self.lr * (*m / c1) / ((*v / c2).sqrt() + self.eps);
        }
    }
}

/// A trained model bound to the attributes it scores.
pub struct MlpScorer<'a> {
    pub model: &'a MlpModel,
    pub attrs: &'a AttributeMatrix,
}

impl EdgeScorer for MlpScorer<'_> {
    fn score(&self, a: NodeId, b: NodeId) -> Result<f64> {
        predict_edge(self.model, self.attrs, a, b)
    }
}

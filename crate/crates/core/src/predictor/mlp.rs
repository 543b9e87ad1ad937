use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

/// Dense layer `y = W x + b`, `W` stored row-major as `out x in`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Layer {
    fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            bias: vec![0.0; out_dim],
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (o, (row, b)) in out
            .iter_mut()
            .zip(self.weights.chunks_exact(self.in_dim).zip(&self.bias))
        {
            *o = b + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
        }
    }
}

/// Feed-forward network with rectifier hidden units and one logistic output.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    layers: Vec<Layer>,
}

/// Largest logit magnitude passed to the logistic, keeping outputs strictly
/// inside (0, 1) in double precision.
const LOGIT_CLAMP: f64 = 35.0;

pub(crate) fn sigmoid(z: f64) -> f64 {
    let z = z.clamp(-LOGIT_CLAMP, LOGIT_CLAMP);
    1.0 / (1.0 + (-z).exp())
}

impl MlpModel {
    /// Parameters drawn uniformly from `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn new(layer_dims: &[usize], seed: u64) -> Result<Self> {
        let mut model = Self::zeros(layer_dims)?;
        let mut r = rng::seeded(seed);
        for layer in &mut model.layers {
            let bound = 1.0 / (layer.in_dim as f64).sqrt();
            for w in layer.weights.iter_mut().chain(layer.bias.iter_mut()) {
                *w = r.random_range(-bound..bound);
            }
        }
        Ok(model)
    }

    pub fn zeros(layer_dims: &[usize]) -> Result<Self> {
        if layer_dims.len() < 2 {
            return Err(Error::invalid("an MLP needs at least input and output dims"));
        }
        if layer_dims.contains(&0) {
            return Err(Error::invalid(format!("layer dims must be positive: {layer_dims:?}")));
        }
        if *layer_dims.last().unwrap() != 1 {
            return Err(Error::invalid("the output layer must have width 1"));
        }
        Ok(Self {
            layers: layer_dims
                .windows(2)
                .map(|w| Layer::zeros(w[0], w[1]))
                .collect(),
        })
    }

    pub(crate) fn from_layers(layers: Vec<Layer>) -> Result<Self> {
        let mut dims = vec![layers.first().map_or(0, |l| l.in_dim)];
        dims.extend(layers.iter().map(|l| l.out_dim));
        Self::zeros(&dims)?;
        for pair in layers.windows(2) {
            if pair[0].out_dim != pair[1].in_dim {
                return Err(Error::invalid("consecutive layer dims disagree"));
            }
        }
        if layers
            .iter()
            .flat_map(|l| l.weights.iter().chain(&l.bias))
            .any(|v| !v.is_finite())
        {
            return Err(Error::invalid("non-finite parameter"));
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.layers[0].in_dim];
        dims.extend(self.layers.iter().map(|l| l.out_dim));
        dims
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].in_dim
    }

    pub fn num_params(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    /// Parameters flattened layer by layer, weights before biases.
    pub fn flat_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_flat_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), self.num_params());
        let mut at = 0;
        for l in &mut self.layers {
            let w = l.weights.len();
            l.weights.copy_from_slice(&params[at..at + w]);
            at += w;
            let b = l.bias.len();
            l.bias.copy_from_slice(&params[at..at + b]);
            at += b;
        }
    }

    pub(crate) fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.layers
            .iter_mut()
            .flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }

    /// Pre-sigmoid output for one input vector.
    pub fn logit(&self, input: &[f64]) -> f64 {
        debug_assert_eq!(input.len(), self.input_dim());
        let mut cur = input.to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut next = vec![0.0; layer.out_dim];
            layer.apply(&cur, &mut next);
            if i != last {
                next.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            cur = next;
        }
        cur[0]
    }

    /// Forward pass over one input, keeping pre-activations of every layer
    /// and returning the logit. `acts[0]` is the input.
    pub(crate) fn forward_cached(&self, acts: &mut Vec<Vec<f64>>) -> f64 {
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = vec![0.0; layer.out_dim];
            layer.apply(&acts[i], &mut z);
            if i != last {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            if acts.len() > i + 1 {
                acts[i + 1] = z;
            } else {
                acts.push(z);
            }
        }
        acts[last + 1][0]
    }

    /// Accumulates `dloss/dlogit`-scaled gradients into `grads` given the
    /// activations of [`forward_cached`](Self::forward_cached).
    pub(crate) fn backward(&self, acts: &[Vec<f64>], dlogit: f64, grads: &mut [Layer]) {
        let mut delta = vec![dlogit];
        for i in (0..self.layers.len()).rev() {
            let layer = &self.layers[i];
            let input = &acts[i];
            let g = &mut grads[i];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                g.bias[o] += d;
                let row = &mut g.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (gw, x) in row.iter_mut().zip(input) {
                    *gw += d * x;
                }
            }
            if i == 0 {
                break;
            }
            let mut prev = vec![0.0; layer.in_dim];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                let row = &layer.weights[o * layer.in_dim..(o + 1) * layer.in_dim];
                for (p, w) in prev.iter_mut().zip(row) {
                    *p += d * w;
                }
            }
            // rectifier derivative: zero where the activation was clipped
            for (p, a) in prev.iter_mut().zip(input) {
                if *a <= 0.0 {
                    *p = 0.0;
                }
            }
            delta = prev;
        }
    }

    pub(crate) fn zero_grads(&self) -> Vec<Layer> {
        self.layers
            .iter()
            .map(|l| Layer::zeros(l.in_dim, l.out_dim))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_validated() {
        assert!(MlpModel::zeros(&[4]).is_err());
        assert!(MlpModel::zeros(&[4, 0, 1]).is_err());
        assert!(MlpModel::zeros(&[4, 3, 2]).is_err());
        assert_eq!(MlpModel::zeros(&[4, 3, 1]).unwrap().num_params(), 4 * 3 + 3 + 3 + 1);
    }

    #[test]
    fn zero_model_outputs_half() {
        let m = MlpModel::zeros(&[6, 5, 1]).unwrap();
        assert_eq!(sigmoid(m.logit(&[1.0; 6])), 0.5);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = MlpModel::new(&[8, 4, 1], 3).unwrap();
        assert_eq!(a, MlpModel::new(&[8, 4, 1], 3).unwrap());
        assert_ne!(a, MlpModel::new(&[8, 4, 1], 4).unwrap());
        let bound = 1.0 / 8f64.sqrt();
        assert!(a.layers[0].weights.iter().all(|w| w.abs() <= bound));
    }

    #[test]
    fn flat_params_round_trip() {
        let mut a = MlpModel::new(&[3, 2, 1], 1).unwrap();
        let p: Vec<f64> = (0..a.num_params()).map(|i| i as f64).collect();
        a.set_flat_params(&p);
        assert_eq!(a.flat_params(), p);
        assert_eq!(a.layers[1].bias, vec![10.0]);
    }

    #[test]
    fn sigmoid_strictly_inside_unit_interval() {
        assert!(sigmoid(1e6) < 1.0);
        assert!(sigmoid(-1e6) > 0.0);
    }
}

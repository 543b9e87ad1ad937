use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::Rng as _;
use rayon::prelude::*;

use super::{Node2VecParams, WalkCorpus};
use crate::attrs::AttributeMatrix;
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Input (node) and output (context) vectors of a skip-gram model.
#[derive(Debug, Clone, PartialEq)]
pub struct SkipGramModel {
    pub input: AttributeMatrix,
    pub output: AttributeMatrix,
}

/// f64 cells shared between training workers. With one worker every access
/// is ordered; with several, updates race without locks by design.
struct Shared(Vec<AtomicU64>);

impl Shared {
    fn from(values: &[f64]) -> Self {
        Self(values.iter().map(|v| AtomicU64::new(v.to_bits())).collect())
    }

    #[inline]
    fn get(&self, i: usize) -> f64 {
        f64::from_bits(self.0[i].load(Ordering::Relaxed))
    }

    #[inline]
    fn add(&self, i: usize, delta: f64) {
        self.0[i].store((self.get(i) + delta).to_bits(), Ordering::Relaxed);
    }

    fn into_vec(self) -> Vec<f64> {
        self.0.into_iter().map(|a| f64::from_bits(a.into_inner())).collect()
    }
}

/// Cumulative unigram^0.75 weights over walk occurrences.
struct NoiseTable {
    cumulative: Vec<f64>,
}

impl NoiseTable {
    fn new(corpus: &WalkCorpus, num_nodes: usize) -> Self {
        let mut counts = vec![0usize; num_nodes];
        for &v in corpus.walks.iter().flatten() {
            counts[v] += 1;
        }
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(0.75);
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample(&self, r: &mut Rng) -> usize {
        let x = r.random::<f64>() * self.cumulative.last().unwrap();
        self.cumulative.partition_point(|&c| c <= x).min(self.cumulative.len() - 1)
    }
}

fn check(corpus: &WalkCorpus, params: &Node2VecParams, num_nodes: usize) -> Result<()> {
    params.validate()?;
    if corpus.is_empty() {
        return Err(Error::Empty("walk corpus is empty".into()));
    }
    if let Some(&v) = corpus.walks.iter().flatten().find(|&&v| v >= num_nodes) {
        return Err(Error::UnknownNode(v));
    }
    Ok(())
}

/// Seeded starting point: input vectors uniform in `(-0.5/dim, 0.5/dim)`,
/// output vectors zero.
pub fn skipgram_init(params: &Node2VecParams, num_nodes: usize) -> SkipGramModel {
    let mut r = rng::seeded(rng::derive(params.seed, &[3]));
    let half = 0.5 / params.dim as f64;
    let data = (0..num_nodes * params.dim)
        .map(|_| r.random_range(-half..half))
        .collect();
    SkipGramModel {
        input: AttributeMatrix::new(num_nodes, params.dim, data).expect("finite init"),
        output: AttributeMatrix::zeros(num_nodes, params.dim),
    }
}

/// Skip-gram with negative sampling over the corpus, returning the node
/// vectors. Nodes that never occur keep their initial vectors.
pub fn skipgram_embed(corpus: &WalkCorpus, params: &Node2VecParams, num_nodes: usize) -> Result<AttributeMatrix> {
    Ok(skipgram_train(corpus, params, num_nodes)?.input)
}

pub fn skipgram_train(corpus: &WalkCorpus, params: &Node2VecParams, num_nodes: usize) -> Result<SkipGramModel> {
    check(corpus, params, num_nodes)?;
    let init = skipgram_init(params, num_nodes);
    let dim = params.dim;
    let input = Shared::from(init.input.as_slice());
    let output = Shared::from(init.output.as_slice());
    let noise = NoiseTable::new(corpus, num_nodes);
    let total = (params.epochs * corpus.num_tokens()).max(1);
    let done = AtomicUsize::new(0);

    for epoch in 0..params.epochs {
        let train_walks = |walks: &[Vec<usize>], r: &mut Rng| {
            let mut grad = vec![0.0; dim];
            for walk in walks {
                for (i, &center) in walk.iter().enumerate() {
                    let progress = done.fetch_add(1, Ordering::Relaxed) as f64 / total as f64;
                    let lr = params.learning_rate * (1.0 - progress).max(1e-4);
                    let lo = i.saturating_sub(params.window);
                    let hi = (i + params.window + 1).min(walk.len());
                    for (j, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                        if j == i {
                            continue;
                        }
                        grad.iter_mut().for_each(|g| *g = 0.0);
                        let h = center * dim;
                        for n in 0..=params.negatives_per_target {
                            let (target, label) = if n == 0 {
                                (context, 1.0)
                            } else {
                                let t = noise.sample(r);
                                if t == context {
                                    continue;
                                }
                                (t, 0.0)
                            };
                            let o = target * dim;
                            let dot: f64 = (0..dim).map(|k| input.get(h + k) * output.get(o + k)).sum();
                            let g = lr * (label - sigmoid(dot));
                            for k in 0..dim {
                                grad[k] += g * output.get(o + k);
                                output.add(o + k, g * input.get(h + k));
                            }
                        }
                        for (k, g) in grad.iter().enumerate() {
                            input.add(h + k, *g);
                        }
                    }
                }
            }
        };
        if params.workers <= 1 {
            let mut r = rng::seeded(rng::derive(params.seed, &[4, epoch as u64]));
            train_walks(&corpus.walks, &mut r);
        } else {
            let chunk = corpus.walks.len().div_ceil(params.workers).max(1);
            corpus
                .walks
                .par_chunks(chunk)
                .enumerate()
                .for_each(|(c, walks)| {
                    let mut r = rng::seeded(rng::derive(params.seed, &[4, epoch as u64, c as u64]));
                    train_walks(walks, &mut r);
                });
        }
    }
    Ok(SkipGramModel {
        input: AttributeMatrix::new(num_nodes, dim, input.into_vec())?,
        output: AttributeMatrix::new(num_nodes, dim, output.into_vec())?,
    })
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x.clamp(-30.0, 30.0)).exp())
}

fn log_sigmoid(x: f64) -> f64 {
    -((-x).max(0.0) + (-x.abs()).exp().ln_1p())
}

impl SkipGramModel {
    /// Mean negative-sampling loss per (centre, context) pair, with the
    /// negatives drawn from a stream fixed by `seed` so two models can be
    /// compared on identical noise.
    pub fn loss(&self, corpus: &WalkCorpus, params: &Node2VecParams, seed: u64) -> Result<f64> {
        check(corpus, params, self.input.num_rows())?;
        let noise = NoiseTable::new(corpus, self.input.num_rows());
        let mut r = rng::seeded(seed);
        let dot = |a: usize, b: usize| -> f64 {
            self.input.row(a).iter().zip(self.output.row(b)).map(|(x, y)| x * y).sum()
        };
        let mut total = 0.0;
        let mut pairs = 0usize;
        for walk in &corpus.walks {
            for (i, &center) in walk.iter().enumerate() {
                let lo = i.saturating_sub(params.window);
                let hi = (i + params.window + 1).min(walk.len());
                for (j, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    total -= log_sigmoid(dot(center, context));
                    for _ in 0..params.negatives_per_target {
                        let t = noise.sample(&mut r);
                        if t != context {
                            total -= log_sigmoid(-dot(center, t));
                        }
                    }
                    pairs += 1;
                }
            }
        }
        if pairs == 0 {
            return Err(Error::Empty("corpus has no context pairs".into()));
        }
        Ok(total / pairs as f64)
    }
}

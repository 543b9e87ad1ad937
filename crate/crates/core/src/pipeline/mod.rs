//! Reproducible runs: a config goes in; a run directory with a manifest,
//! split files, metrics and diagnostics comes out.
//!
//! ```text
//! <out>/manifest.json         config, seeds, version, input digests
//! <out>/metrics.json          per-fold and mean metrics
//! <out>/fold_<i>/split/       split directory
//! <out>/fold_<i>/scores.tsv   src dst label score
//! <out>/fold_<i>/trace.csv    (MLP) epoch,loss
//! <out>/fold_<i>/model.bin    (MLP)
//! <out>/fold_<i>/degree_bins.csv
//! ```
//!
//! `metrics.json` holds no paths, timestamps or thread-dependent values, so
//! rerunning a manifest reproduces it byte for byte.

mod config;
mod manifest;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::attrs::{load_attributes, AttributeMatrix};
use crate::embed::{node2vec, random_attributes, shuffle_attributes_with, ShuffleMode};
use crate::error::{Error, Result};
use crate::eval::{degree_binned, fit_subgaussian, MetricReport, ScoredEdges, SubgaussianFit};
use crate::graph::{load_graph, Edge, EdgeListFormat, Graph, KeyMap};
use crate::null_model::{duplex_from_train, DegreeModel, EdgeScorer};
use crate::predictor::{save_model, train_link_mlp, write_trace_csv, MlpScorer};
use crate::quality::{attribute_report, AttributeReport, ReportOptions};
use crate::rng;
use crate::split::{
    random_edge_split, random_node_split, temporal_split, write_split_dir, SplitDir,
    SplitManifest, SplitMode,
};
use crate::temporal::{load_snapshot_dir, load_temporal_edges, Bucketing, TemporalGraphSequence};
use crate::textio::{create, finish, for_each_record, parse_error};

pub use config::{
    DataConfig, EvalConfig, FeatureConfig, FeatureVariant, ModelConfig, ModelKind, RunConfig,
    SplitConfig,
};
pub use manifest::{digest_inputs, sha256_file, InputDigest, RunManifest, MANIFEST_FILE};

/// Environment variable naming the directory under which runs land when no
/// output directory is given.
pub const OUTPUT_ROOT_ENV: &str = "LPKIT_OUTPUT_ROOT";

/// `explicit` if set, else `$LPKIT_OUTPUT_ROOT/<name>`, else `./<name>`.
pub fn resolve_output_dir(explicit: Option<&Path>, name: &str) -> PathBuf {
    match explicit {
        Some(p) => p.to_path_buf(),
        None => std::env::var_os(OUTPUT_ROOT_ENV)
            .map(PathBuf::from)
            .unwrap_or_default()
            .join(name),
    }
}

/// Loaded inputs of a run.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// The static graph, or the union of all snapshots.
    pub graph: Graph,
    pub sequence: Option<TemporalGraphSequence>,
    pub attributes: Option<AttributeMatrix>,
}

pub fn load_dataset(data: &DataConfig) -> Result<Dataset> {
    let (graph, sequence) = if let Some(path) = &data.graph {
        let format = EdgeListFormat {
            has_header: data.has_header,
            node_list: data.node_list.clone(),
        };
        (load_graph(path, &format)?.graph, None)
    } else {
        let seq = if let Some(dir) = &data.snapshots {
            load_snapshot_dir(dir)?
        } else if let Some(path) = &data.temporal_edges {
            let width = data
                .bucket_width
                .ok_or_else(|| Error::Config("data.bucket_width is required".into()))?;
            load_temporal_edges(
                path,
                Bucketing {
                    width,
                    cumulative: data.cumulative,
                },
            )?
        } else {
            return Err(Error::Config("no graph input configured".into()));
        };
        (seq.union_graph(), Some(seq))
    };
    let attributes = match &data.attributes {
        Some(path) => Some(load_attributes(path, &graph)?.matrix),
        None => None,
    };
    let sequence = match (sequence, &attributes) {
        (Some(seq), Some(a)) => Some(seq.with_attributes(a)?),
        (seq, _) => seq,
    };
    Ok(Dataset {
        graph,
        sequence,
        attributes,
    })
}

/// Splits a dataset. The result lives on the dataset's global node ids.
pub fn make_split(dataset: &Dataset, split: &SplitConfig, seed: u64) -> Result<SplitDir> {
    let graph = &dataset.graph;
    let keys: Arc<KeyMap> = Arc::clone(graph.key_map());
    let n = graph.num_nodes();
    let (edges, train_nodes, valid_nodes, test_nodes, lost, ratios, index) = match split.mode {
        SplitMode::Edge => {
            let e = random_edge_split(graph, split.ratios, seed)?;
            (e, (0..n).collect(), Vec::new(), Vec::new(), None, Some(split.ratios), None)
        }
        SplitMode::Node => {
            let s = random_node_split(graph, split.ratios, seed)?;
            let e = s.edge_split(graph, seed)?;
            (
                e,
                s.train_nodes,
                s.valid_nodes,
                s.test_nodes,
                Some(s.lost_edges),
                Some(split.ratios),
                None,
            )
        }
        SplitMode::Temporal => {
            let seq = dataset
                .sequence
                .as_ref()
                .ok_or_else(|| Error::Config("temporal split needs snapshot data".into()))?;
            let s = temporal_split(seq, split.temporal_index)?;
            let e = s.edge_split(rng::derive(seed, &[4]))?;
            (
                e,
                s.observed_nodes,
                Vec::new(),
                s.new_nodes,
                None,
                None,
                Some(split.temporal_index),
            )
        }
    };
    let manifest = SplitManifest {
        mode: split.mode,
        seed,
        ratios,
        lost_edges: lost,
        temporal_index: index,
        num_nodes: n,
        num_edges: graph.num_edges(),
        train_edges: edges.train_edges.len(),
        valid_pos: edges.valid_pos.len(),
        test_pos: edges.test_pos.len(),
        source: None,
        source_sha256: None,
        version: crate::VERSION.to_string(),
    };
    Ok(SplitDir {
        keys,
        edges,
        train_nodes,
        valid_nodes,
        test_nodes,
        manifest,
    })
}

/// Node2Vec on the observed graph (or the full graph when configured).
pub fn topology_embedding(config: &RunConfig, dataset: &Dataset, train: &Graph, seed: u64) -> Result<AttributeMatrix> {
    let graph = if config.features.node2vec_full_graph {
        &dataset.graph
    } else {
        train
    };
    let params = crate::embed::Node2VecParams {
        seed,
        ..config.node2vec.clone()
    };
    node2vec(graph, &params)
}

fn pretrained(dataset: &Dataset) -> Result<&AttributeMatrix> {
    dataset
        .attributes
        .as_ref()
        .ok_or_else(|| Error::Config("pre-trained attributes are required".into()))
}

/// The attribute variant a model trains on.
pub fn build_features(
    config: &RunConfig,
    dataset: &Dataset,
    variant: FeatureVariant,
    topology: impl FnOnce() -> Result<AttributeMatrix>,
    seed: u64,
) -> Result<AttributeMatrix> {
    match variant {
        FeatureVariant::Pretrained => pretrained(dataset).cloned(),
        FeatureVariant::Shuffled => {
            shuffle_attributes_with(pretrained(dataset)?, seed, config.features.shuffle_mode)
        }
        FeatureVariant::Random => {
            let dim = config
                .features
                .random_dim
                .or(dataset.attributes.as_ref().map(AttributeMatrix::dim))
                .unwrap_or(config.node2vec.dim);
            random_attributes(dataset.graph.num_nodes(), dim, seed)
        }
        FeatureVariant::Node2vec => topology(),
    }
}

/// Results of one fold as they appear in `metrics.json`.
#[derive(Debug, Clone, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub split_seed: u64,
    pub split: SplitSummary,
    pub metrics: MetricReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subgaussian: Option<SubgaussianFit>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub attribute_reports: Vec<AttributeReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitSummary {
    pub train_edges: usize,
    pub test_pos: usize,
    pub test_neg: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lost_edges: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetrics {
    pub model: ModelKind,
    pub features: FeatureVariant,
    pub split_mode: SplitMode,
    pub folds: Vec<FoldResult>,
    /// Mean of each metric over folds.
    pub mean: BTreeMap<String, f64>,
}

pub const METRICS_FILE: &str = "metrics.json";

/// Split seed of fold `i`.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    rng::derive(seed, &[100, fold as u64])
}

/// Runs every fold of `config` into `out` and writes the manifest first.
pub fn run(config: &RunConfig, out: &Path) -> Result<RunMetrics> {
    config.validate()?;
    let fold_seeds: Vec<u64> = (0..config.folds).map(|i| fold_seed(config.seed, i)).collect();
    let manifest = RunManifest {
        version: crate::VERSION.to_string(),
        command: "run".into(),
        config: config.clone(),
        fold_seeds: fold_seeds.clone(),
        inputs: digest_inputs(config)?,
    };
    manifest.write(out)?;
    let dataset = load_dataset(&config.data)?;

    let folds: Vec<FoldResult> = fold_seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| run_fold(config, &dataset, i, seed, &out.join(format!("fold_{i}"))))
        .collect::<Result<_>>()?;

    let mut sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for f in &folds {
        for (name, v) in &f.metrics.metrics {
            let e = sums.entry(name.clone()).or_default();
            e.0 += v;
            e.1 += 1;
        }
    }
    let metrics = RunMetrics {
        model: config.model.kind,
        features: config.features.variant,
        split_mode: config.split.mode,
        folds,
        mean: sums.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect(),
    };
    let path = out.join(METRICS_FILE);
    std::fs::write(&path, serde_json::to_string_pretty(&metrics)? + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(metrics)
}

/// Repeats the run a manifest describes into `out`, after checking that
/// the recorded inputs are unchanged.
pub fn rerun(manifest_path: &Path, out: &Path) -> Result<RunMetrics> {
    let manifest = RunManifest::read(manifest_path)?;
    manifest.verify_inputs()?;
    run(&manifest.config, out)
}

fn run_fold(config: &RunConfig, dataset: &Dataset, fold: usize, seed: u64, dir: &Path) -> Result<FoldResult> {
    let split = make_split(dataset, &config.split, seed)?;
    write_split_dir(&dir.join("split"), &split)?;
    let train = split.train_graph();
    let e = &split.edges;

    let n2v_seed = rng::derive(seed, &[10]);
    let mut topo_cache: Option<AttributeMatrix> = None;
    let mut topology = || -> Result<AttributeMatrix> {
        if topo_cache.is_none() {
            topo_cache = Some(topology_embedding(config, dataset, &train, n2v_seed)?);
        }
        Ok(topo_cache.clone().unwrap())
    };

    let (pos, neg, fit) = match config.model.kind {
        ModelKind::Config => {
            let m = DegreeModel::from_graph(&train);
            (m.score_all(&e.test_pos)?, m.score_all(&e.test_neg)?, None)
        }
        ModelKind::Duplex => {
            let m = duplex_from_train(&train, rng::derive(seed, &[11]))?;
            (m.score_all(&e.test_pos)?, m.score_all(&e.test_neg)?, None)
        }
        ModelKind::Mlp => {
            let attrs = build_features(
                config,
                dataset,
                config.features.variant,
                &mut topology,
                rng::derive(seed, &[12]),
            )?;
            let train_cfg = crate::predictor::TrainConfig {
                seed: rng::derive(seed, &[13]),
                ..config.model.train.clone()
            };
            let (model, trace) = train_link_mlp(&attrs, &e.train_edges, &train_cfg, &config.model.hidden)?;
            save_model(&model, &dir.join("model.bin"))?;
            write_trace_csv(&trace, &dir.join("trace.csv"))?;
            let scorer = MlpScorer {
                model: &model,
                attrs: &attrs,
            };
            let fit = if config.eval.subgaussian {
                Some(fit_subgaussian(&trace, config.eval.tail_fraction)?)
            } else {
                None
            };
            (scorer.score_all(&e.test_pos)?, scorer.score_all(&e.test_neg)?, fit)
        }
    };
    write_scores(&dir.join("scores.tsv"), &split.keys, &e.test_pos, &e.test_neg, &pos, &neg)?;
    let scored = ScoredEdges::new(pos, neg)?;
    let metrics = MetricReport::compute(&scored, config.eval.k)?;
    if config.eval.degree_bins > 0 {
        degree_binned(&train, &e.test_pos, &e.test_neg, &scored, config.eval.k, config.eval.degree_bins)?
            .write_csv(&dir.join("degree_bins.csv"))?;
    }

    let mut reports = Vec::new();
    if !config.eval.report_ks.is_empty() {
        let base = pretrained(dataset)?;
        let variants = report_variants(base, dataset.graph.num_nodes(), &topology()?, rng::derive(seed, &[14]))?;
        for &k in &config.eval.report_ks {
            let options = ReportOptions {
                k,
                seed: rng::derive(seed, &[15]),
                ..ReportOptions::default()
            };
            let mut report = attribute_report(&train, &variants, "pretrained", &topology()?, &options)?;
            if let (true, Some(f)) = (config.eval.bound, &fit) {
                report = report.with_bound(f.sigma)?;
            }
            reports.push(report);
        }
    }

    Ok(FoldResult {
        fold,
        split_seed: seed,
        split: SplitSummary {
            train_edges: e.train_edges.len(),
            test_pos: e.test_pos.len(),
            test_neg: e.test_neg.len(),
            lost_edges: split.manifest.lost_edges,
        },
        metrics,
        subgaussian: fit,
        attribute_reports: reports,
    })
}

/// The four attribute variants scored side by side. The shuffled variant
/// permutes each column independently: a whole-row permutation would leave
/// the point cloud, and so every clustering score, unchanged.
pub fn report_variants(
    pretrained: &AttributeMatrix,
    num_nodes: usize,
    topology: &AttributeMatrix,
    seed: u64,
) -> Result<BTreeMap<String, AttributeMatrix>> {
    Ok(BTreeMap::from([
        ("pretrained".to_string(), pretrained.clone()),
        (
            "shuffled".to_string(),
            shuffle_attributes_with(pretrained, rng::derive(seed, &[0]), ShuffleMode::Columns)?,
        ),
        (
            "random".to_string(),
            random_attributes(num_nodes, pretrained.dim(), rng::derive(seed, &[1]))?,
        ),
        ("node2vec".to_string(), topology.clone()),
    ]))
}

/// `src<TAB>dst<TAB>label<TAB>score`, positives first.
pub fn write_scores(
    path: &Path,
    keys: &KeyMap,
    pos: &[Edge],
    neg: &[Edge],
    pos_scores: &[f64],
    neg_scores: &[f64],
) -> Result<()> {
    if pos.len() != pos_scores.len() || neg.len() != neg_scores.len() {
        return Err(Error::invalid("scores are not aligned with edges"));
    }
    let mut w = create(path)?;
    for (edges, scores, label) in [(pos, pos_scores, 1), (neg, neg_scores, 0)] {
        for (&(a, b), s) in edges.iter().zip(scores) {
            writeln!(w, "{}\t{}\t{label}\t{s}", keys.key(a), keys.key(b)).map_err(|e| Error::io(path, e))?;
        }
    }
    finish(path, w)
}

/// Scored edges read back from [`write_scores`] output.
#[derive(Debug, Clone)]
pub struct ScoreFile {
    pub pos: Vec<Edge>,
    pub neg: Vec<Edge>,
    pub scored: ScoredEdges,
}

pub fn read_scores(path: &Path, keys: &KeyMap) -> Result<ScoreFile> {
    let (mut pos, mut neg, mut ps, mut ns) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for_each_record(path, false, |line, fields| {
        let [a, b, label, score] = fields else {
            return Err(parse_error(path, line, "expected src, dst, label, score"));
        };
        let id = |k: &str| {
            keys.get(k)
                .ok_or_else(|| parse_error(path, line, format!("unknown node {k}")))
        };
        let edge = (id(a)?, id(b)?);
        let s: f64 = score
            .parse()
            .map_err(|_| parse_error(path, line, format!("bad score {score}")))?;
        match *label {
            "1" => {
                pos.push(edge);
                ps.push(s);
            }
            "0" => {
                neg.push(edge);
                ns.push(s);
            }
            other => return Err(parse_error(path, line, format!("label must be 0 or 1, got {other}"))),
        }
        Ok(())
    })?;
    Ok(ScoreFile {
        pos,
        neg,
        scored: ScoredEdges::new(ps, ns)?,
    })
}

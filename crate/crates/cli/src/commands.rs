use std::path::Path;

use log::info;
use serde::Serialize;

use lpkit::attrs::{load_attributes, save_attributes, AttributeMatrix};
use lpkit::embed::{node2vec, random_attributes, shuffle_attributes};
use lpkit::eval::{degree_binned, fit_subgaussian, MetricReport, SubgaussianFit};
use lpkit::graph::{load_graph, EdgeListFormat, Graph};
use lpkit::null_model::{duplex_from_train, DegreeModel, EdgeScorer};
use lpkit::pipeline::{self, DataConfig, RunConfig, SplitConfig};
use lpkit::predictor::{read_trace_csv, save_model, train_link_mlp, write_trace_csv, MlpScorer};
use lpkit::quality::{attribute_report, generalization_bound, ReportOptions};
use lpkit::split::{read_split_dir, write_split_dir, SplitDir};
use lpkit::{rng, Error, Result};

use crate::args::*;

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).map_err(|e| Error::Io {
                    path: parent.to_path_buf(),
                    source: e,
                })?;
            }
            std::fs::write(path, text).map_err(|e| Error::Io {
                path: path.to_path_buf(),
                source: e,
            })
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_graph(path: &Path, header: bool) -> Result<Graph> {
    let loaded = load_graph(
        path,
        &EdgeListFormat {
            has_header: header,
            node_list: None,
        },
    )?;
    Ok(loaded.graph)
}

pub fn split(a: SplitArgs) -> Result<()> {
    let data = DataConfig {
        graph: a.source.graph.clone(),
        has_header: a.graph.header,
        node_list: a.graph.node_list.clone(),
        snapshots: a.source.snapshots.clone(),
        temporal_edges: a.source.temporal_edges.clone(),
        bucket_width: a.graph.bucket_width,
        cumulative: a.graph.cumulative,
        attributes: None,
    };
    for p in data.inputs().into_iter().chain(data.snapshots.as_deref()) {
        if !p.exists() {
            return Err(Error::MissingInput(p.to_path_buf()));
        }
    }
    let temporal_data = data.graph.is_none();
    let mode: lpkit::split::SplitMode = a.mode.into();
    if temporal_data != (mode == lpkit::split::SplitMode::Temporal) {
        return Err(Error::InvalidArgument(
            "--mode temporal goes with --snapshots or --temporal-edges, and only with those".into(),
        ));
    }
    let dataset = pipeline::load_dataset(&data)?;
    let config = SplitConfig {
        mode,
        ratios: a.ratios,
        temporal_index: a.index,
    };
    let mut split = pipeline::make_split(&dataset, &config, a.seed)?;
    let source = a.source.graph.as_ref().or(a.source.temporal_edges.as_ref());
    if let Some(src) = source {
        split.manifest.source = Some(src.display().to_string());
        split.manifest.source_sha256 = Some(pipeline::sha256_file(src)?);
    } else if let Some(dir) = &a.source.snapshots {
        split.manifest.source = Some(dir.display().to_string());
    }
    write_split_dir(&a.out, &split)?;
    let m = &split.manifest;
    info!(
        "wrote {}: {} train, {} valid, {} test edges{}",
        a.out.display(),
        m.train_edges,
        m.valid_pos,
        m.test_pos,
        m.lost_edges.map(|l| format!(", {l} lost")).unwrap_or_default()
    );
    Ok(())
}

fn write_split_scores(split: &SplitDir, scorer: &dyn EdgeScorer, out: &Path) -> Result<()> {
    let e = &split.edges;
    let pos = scorer.score_all(&e.test_pos)?;
    let neg = scorer.score_all(&e.test_neg)?;
    pipeline::write_scores(out, &split.keys, &e.test_pos, &e.test_neg, &pos, &neg)?;
    info!("scored {} positive and {} negative test edges", pos.len(), neg.len());
    Ok(())
}

pub fn baseline(a: BaselineArgs) -> Result<()> {
    let split = read_split_dir(&a.split)?;
    let train = split.train_graph();
    match a.model {
        BaselineModel::Config => write_split_scores(&split, &DegreeModel::from_graph(&train), &a.out),
        BaselineModel::Duplex => {
            let model = duplex_from_train(&train, a.neg_seed)?;
            write_split_scores(&split, &model, &a.out)
        }
    }
}

pub fn embed(a: EmbedArgs) -> Result<()> {
    let graph = match (&a.graph, &a.split) {
        (Some(path), _) => read_graph(path, a.header)?,
        (None, Some(dir)) => read_split_dir(dir)?.train_graph(),
        (None, None) => unreachable!("clap requires one source"),
    };
    let emb = node2vec(&graph, &a.node2vec.params(a.seed))?;
    save_attributes(&emb, &graph, &a.out)?;
    info!("embedded {} nodes in {} dimensions", emb.num_rows(), emb.dim());
    Ok(())
}

pub fn attrs_score(a: AttrsScoreArgs) -> Result<()> {
    let graph = read_graph(&a.graph, a.header)?;
    let pretrained = load_attributes(&a.pretrained, &graph)?.matrix;
    let topology = node2vec(&graph, &a.node2vec.params(rng::derive(a.seed, &[0])))?;
    let variants = pipeline::report_variants(&pretrained, graph.num_nodes(), &topology, rng::derive(a.seed, &[1]))?;
    let mut reports = Vec::with_capacity(a.k.len());
    for &k in &a.k {
        let options = ReportOptions {
            k,
            seed: a.seed,
            ..ReportOptions::default()
        };
        let mut report = attribute_report(&graph, &variants, "pretrained", &topology, &options)?;
        if let Some(sigma) = a.sigma {
            report = report.with_bound(sigma)?;
        }
        reports.push(report);
    }
    emit_json(&reports, a.out.as_deref())
}

pub fn train(a: TrainArgs) -> Result<()> {
    let split = read_split_dir(&a.split)?;
    let train = split.train_graph();
    let load = || -> Result<AttributeMatrix> {
        let path = a
            .attributes
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("--attributes is required for these features".into()))?;
        Ok(load_attributes(path, &train)?.matrix)
    };
    let attrs = match a.features {
        FeatureArg::Pretrained => load()?,
        FeatureArg::Shuffled => shuffle_attributes(&load()?, rng::derive(a.seed, &[1]))?,
        FeatureArg::Random => {
            let dim = match &a.attributes {
                Some(_) => load()?.dim(),
                None => a.random_dim,
            };
            random_attributes(train.num_nodes(), dim, rng::derive(a.seed, &[1]))?
        }
        FeatureArg::Node2vec => node2vec(&train, &a.node2vec.params(rng::derive(a.seed, &[2])))?,
    };
    let (model, trace) = train_link_mlp(&attrs, &split.edges.train_edges, &a.train_config(), &a.hidden)?;
    save_model(&model, &a.out.join("model.bin"))?;
    write_trace_csv(&trace, &a.out.join("trace.csv"))?;
    if let Some(last) = trace.losses.last() {
        info!("trained {} epochs, final loss {last:.6}", trace.losses.len());
    }
    let scorer = MlpScorer {
        model: &model,
        attrs: &attrs,
    };
    write_split_scores(&split, &scorer, &a.out.join("scores.tsv"))
}

#[derive(Serialize)]
struct EvalOutput {
    #[serde(flatten)]
    metrics: MetricReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    subgaussian: Option<SubgaussianFit>,
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let split = read_split_dir(&a.split)?;
    let scores = pipeline::read_scores(&a.scores, &split.keys)?;
    let metrics = MetricReport::compute(&scores.scored, a.k)?;
    if let Some(bins) = a.degree_bins {
        let table = degree_binned(&split.train_graph(), &scores.pos, &scores.neg, &scores.scored, a.k, bins)?;
        match &a.bins_out {
            Some(path) => table.write_csv(path)?,
            None => emit_json(&table, None)?,
        }
    }
    let subgaussian = match (a.diagnose, &a.trace) {
        (Some(DiagnoseArg::Subgaussian), Some(trace)) => {
            Some(fit_subgaussian(&read_trace_csv(trace)?, a.tail_fraction)?)
        }
        _ => None,
    };
    emit_json(&EvalOutput { metrics, subgaussian }, a.out.as_deref())
}

pub fn diagnose(d: DiagnoseCommand) -> Result<()> {
    match d {
        DiagnoseCommand::Subgaussian(a) => {
            let fit = fit_subgaussian(&read_trace_csv(&a.trace)?, a.tail_fraction)?;
            emit_json(&fit, None)
        }
        DiagnoseCommand::Bound(a) => {
            let sigma = match (a.sigma, &a.trace) {
                (Some(s), _) => s,
                (None, Some(t)) => fit_subgaussian(&read_trace_csv(t)?, a.tail_fraction)?.sigma,
                (None, None) => unreachable!("clap requires one of --sigma, --trace"),
            };
            let bound = generalization_bound(sigma, a.ami.max(0.0))?;
            emit_json(&serde_json::json!({ "sigma": sigma, "ami": a.ami, "bound": bound }), None)
        }
    }
}

pub fn run(a: RunArgs) -> Result<()> {
    let mut config = RunConfig::from_toml_file(&a.config)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    if let Some(folds) = a.folds {
        config.folds = folds;
    }
    if let Some(m) = a.model {
        config.model.kind = m.into();
    }
    if let Some(f) = a.features {
        config.features.variant = f.into();
    }
    if let Some(s) = a.shuffle {
        config.features.shuffle_mode = s.into();
    }
    if a.diagnose == Some(DiagnoseArg::Subgaussian) {
        config.eval.subgaussian = true;
    }
    if a.bound {
        config.eval.bound = true;
    }
    let out = match (&a.out, &config.output_dir) {
        (Some(o), _) => o.clone(),
        (None, Some(o)) => o.clone(),
        (None, None) => pipeline::resolve_output_dir(None, &format!("run-{}", config.seed)),
    };
    let metrics = pipeline::run(&config, &out)?;
    report_run(&metrics, &out);
    Ok(())
}

pub fn rerun(a: RerunArgs) -> Result<()> {
    let metrics = pipeline::rerun(&a.manifest, &a.out)?;
    report_run(&metrics, &a.out);
    Ok(())
}

fn report_run(metrics: &pipeline::RunMetrics, out: &Path) {
    let summary: Vec<String> = metrics.mean.iter().map(|(k, v)| format!("{k} {v:.4}")).collect();
    info!("{} fold(s) in {}: {}", metrics.folds.len(), out.display(), summary.join(", "));
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lpkit::embed::{Node2VecParams, ShuffleMode};
use lpkit::pipeline::{FeatureVariant, ModelKind};
use lpkit::predictor::TrainConfig;
use lpkit::split::{Ratios, SplitMode};

#[derive(Debug, Parser)]
#[command(name = "lpkit", version, about = "Inductive link prediction toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Split a graph into train/valid/test edges and write a split directory.
    Split(SplitArgs),
    /// Score a split's test edges with a degree-sequence null model.
    Baseline(BaselineArgs),
    /// Node2Vec embedding of a graph, written as an attribute file.
    Embed(EmbedArgs),
    /// Attribute quality scoring.
    #[command(subcommand)]
    Attrs(AttrsCommand),
    /// Train the attribute-only MLP on a split and score its test edges.
    Train(TrainArgs),
    /// Ranking metrics of a scores file against its split.
    Eval(EvalArgs),
    /// Loss-curve diagnostics.
    #[command(subcommand)]
    Diagnose(DiagnoseCommand),
    /// Run a whole pipeline from a TOML config.
    Run(RunArgs),
    /// Repeat a recorded run after checking its inputs are unchanged.
    Rerun(RerunArgs),
}

/// One graph source. Exactly one of the three may be given.
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Edge list, one `src dst` pair per line.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Directory of `<timestamp>.edges` snapshot files.
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// `src dst timestamp` records; needs --bucket-width.
    #[arg(long)]
    pub temporal_edges: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphOptions {
    /// The edge list starts with a header line.
    #[arg(long)]
    pub header: bool,
    /// Extra node keys, one per line, for nodes without edges.
    #[arg(long)]
    pub node_list: Option<PathBuf>,
    #[arg(long)]
    pub bucket_width: Option<i64>,
    /// Snapshot `t` holds every edge up to bucket `t`.
    #[arg(long)]
    pub cumulative: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Edge,
    Node,
    Temporal,
}

impl From<ModeArg> for SplitMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Edge => SplitMode::Edge,
            ModeArg::Node => SplitMode::Node,
            ModeArg::Temporal => SplitMode::Temporal,
        }
    }
}

/// Three positive parts given as fractions or percentages, e.g. `80,10,10`.
pub fn parse_ratios(s: &str) -> Result<Ratios, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("'{p}' is not a number")))
        .collect::<Result<_, _>>()?;
    let [a, b, c] = parts[..] else {
        return Err(format!("expected three comma-separated parts, got {}", parts.len()));
    };
    let sum = a + b + c;
    let scale = if (sum - 100.0).abs() < 1e-6 { 100.0 } else { 1.0 };
    Ratios::new(a / scale, b / scale, c / scale).map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
pub struct SplitArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    #[arg(long, value_parser = parse_ratios, default_value = "80,10,10")]
    pub ratios: Ratios,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub source: GraphSource,
    #[command(flatten)]
    pub graph: GraphOptions,
    /// Temporal mode: observe snapshot INDEX, test on INDEX + 1.
    #[arg(long, default_value_t = 0)]
    pub index: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BaselineModel {
    Config,
    Duplex,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[arg(long, value_enum)]
    pub model: BaselineModel,
    /// Split directory.
    #[arg(long)]
    pub split: PathBuf,
    /// Scores TSV to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Seed of the duplex model's sampled negative layer.
    #[arg(long, default_value_t = 0)]
    pub neg_seed: u64,
}

#[derive(Debug, Args)]
pub struct Node2VecArgs {
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub walks_per_node: usize,
    #[arg(long, default_value_t = 80)]
    pub walk_length: usize,
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    #[arg(long, default_value_t = 1.0)]
    pub p: f64,
    #[arg(long, default_value_t = 1.0)]
    pub q: f64,
    #[arg(long, default_value_t = 5)]
    pub negatives: usize,
    #[arg(long = "n2v-epochs", id = "n2v_epochs", default_value_t = 1)]
    pub epochs: usize,
    /// Skip-gram threads; anything above 1 is not reproducible.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

impl Node2VecArgs {
    pub fn params(&self, seed: u64) -> Node2VecParams {
        Node2VecParams {
            dim: self.dim,
            walks_per_node: self.walks_per_node,
            walk_length: self.walk_length,
            window: self.window,
            p: self.p,
            q: self.q,
            negatives_per_target: self.negatives,
            epochs: self.epochs,
            seed,
            workers: self.workers,
            ..Node2VecParams::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    /// Edge list to embed.
    #[arg(long, conflicts_with = "split", required_unless_present = "split")]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub header: bool,
    /// Embed the train graph of this split directory instead.
    #[arg(long)]
    pub split: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub node2vec: Node2VecArgs,
    /// Attribute file to write.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum AttrsCommand {
    /// Davies-Bouldin scores of pre-trained, shuffled, random and Node2Vec
    /// attributes, plus AMI between pre-trained and Node2Vec clusters.
    Score(AttrsScoreArgs),
}

fn parse_ks(s: &str) -> Result<Vec<usize>, String> {
    let ks: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| format!("'{p}' is not a cluster count")))
        .collect::<Result<_, _>>()?;
    if ks.iter().any(|&k| k < 2) {
        return Err("cluster counts must be at least 2".into());
    }
    Ok(ks)
}

#[derive(Debug, Args)]
pub struct AttrsScoreArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub header: bool,
    /// Pre-trained attribute file, `key v1 ... vd` per line.
    #[arg(long)]
    pub pretrained: PathBuf,
    /// Cluster counts, comma separated; one report per value.
    #[arg(long, value_parser = parse_ks, default_value = "3,5,8")]
    pub k: ::std::vec::Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Subgaussian sigma; adds the generalization bound to each report.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[command(flatten)]
    pub node2vec: Node2VecArgs,
    /// JSON file to write; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FeatureArg {
    Pretrained,
    Shuffled,
    Random,
    Node2vec,
}

impl From<FeatureArg> for FeatureVariant {
    fn from(f: FeatureArg) -> Self {
        match f {
            FeatureArg::Pretrained => FeatureVariant::Pretrained,
            FeatureArg::Shuffled => FeatureVariant::Shuffled,
            FeatureArg::Random => FeatureVariant::Random,
            FeatureArg::Node2vec => FeatureVariant::Node2vec,
        }
    }
}

fn parse_widths(s: &str) -> Result<Vec<usize>, String> {
    let w: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| format!("'{p}' is not a layer width")))
        .collect::<Result<_, _>>()?;
    if w.contains(&0) {
        return Err("layer widths must be positive".into());
    }
    Ok(w)
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub split: PathBuf,
    /// Pre-trained attributes; needed for pretrained and shuffled features.
    #[arg(long)]
    pub attributes: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "pretrained")]
    pub features: FeatureArg,
    /// Random feature width when no attribute file is given.
    #[arg(long, default_value_t = 64)]
    pub random_dim: usize,
    #[arg(long, value_parser = parse_widths, default_value = "100,100,100")]
    pub hidden: ::std::vec::Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 200)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub node2vec: Node2VecArgs,
    /// Directory for model.bin, trace.csv and scores.tsv.
    #[arg(long)]
    pub out: PathBuf,
}

impl TrainArgs {
    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.lr,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seed,
            ..TrainConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DiagnoseArg {
    Subgaussian,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub split: PathBuf,
    /// Scores TSV (`src dst label score`).
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Write a degree-binned table with this many bins.
    #[arg(long)]
    pub degree_bins: Option<usize>,
    #[arg(long, requires = "degree_bins")]
    pub bins_out: Option<PathBuf>,
    /// Training trace (`epoch,loss`) for --diagnose.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, value_enum, requires = "trace")]
    pub diagnose: Option<DiagnoseArg>,
    #[arg(long, default_value_t = 0.25)]
    pub tail_fraction: f64,
    /// JSON file to write; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DiagnoseCommand {
    /// Fit `A exp(-sigma x^2)` to a training trace.
    Subgaussian(SubgaussianArgs),
    /// `sqrt(2 sigma^2 I)` from sigma (or a trace) and an AMI value.
    Bound(BoundArgs),
}

#[derive(Debug, Args)]
pub struct SubgaussianArgs {
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    pub tail_fraction: f64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[arg(long, conflicts_with = "trace", required_unless_present = "trace")]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    pub tail_fraction: f64,
    /// Mutual information estimate, e.g. an attribute report's AMI.
    #[arg(long)]
    pub ami: f64,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Run directory; defaults to the config's output_dir, then to
    /// `$LPKIT_OUTPUT_ROOT/run-<seed>`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long, value_enum)]
    pub model: Option<ModelChoice>,
    #[arg(long, value_enum)]
    pub features: Option<FeatureArg>,
    #[arg(long, value_enum)]
    pub shuffle: Option<ShuffleArg>,
    #[arg(long, value_enum)]
    pub diagnose: Option<DiagnoseArg>,
    /// Add the generalization bound to every attribute report.
    #[arg(long)]
    pub bound: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModelChoice {
    Mlp,
    Config,
    Duplex,
}

impl From<ModelChoice> for ModelKind {
    fn from(m: ModelChoice) -> Self {
        match m {
            ModelChoice::Mlp => ModelKind::Mlp,
            ModelChoice::Config => ModelKind::Config,
            ModelChoice::Duplex => ModelKind::Duplex,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShuffleArg {
    Rows,
    Columns,
}

impl From<ShuffleArg> for ShuffleMode {
    fn from(s: ShuffleArg) -> Self {
        match s {
            ShuffleArg::Rows => ShuffleMode::Rows,
            ShuffleArg::Columns => ShuffleMode::Columns,
        }
    }
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    /// manifest.json, or the run directory holding it.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ratios_accept_percentages_and_fractions() {
        assert_eq!(parse_ratios("80,10,10").unwrap(), Ratios::new(0.8, 0.1, 0.1).unwrap());
        assert_eq!(parse_ratios("0.5, 0.25, 0.25").unwrap(), Ratios::new(0.5, 0.25, 0.25).unwrap());
        assert!(parse_ratios("80,10").is_err());
        assert!(parse_ratios("80,10,5").is_err());
        assert!(parse_ratios("a,b,c").is_err());
    }

    #[test]
    fn list_parsers() {
        assert_eq!(parse_ks("3, 5,8").unwrap(), vec![3, 5, 8]);
        assert!(parse_ks("1").is_err());
        assert!(parse_widths("32,0").is_err());
    }
}

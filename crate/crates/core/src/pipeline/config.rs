use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embed::{Node2VecParams, ShuffleMode};
use crate::error::{Error, Result};
use crate::predictor::{TrainConfig, DEFAULT_HIDDEN};
use crate::split::{Ratios, SplitMode};

/// Everything a run needs. Relative paths in a config file are resolved
/// against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Base seed; every random stream of the run is derived from it.
    pub seed: u64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    pub data: DataConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub features: FeatureConfig,
    #[serde(default)]
    pub node2vec: Node2VecParams,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    /// Independent repeats with derived split seeds, run concurrently.
    #[serde(default = "one")]
    pub folds: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    /// Static edge list.
    pub graph: Option<PathBuf>,
    pub has_header: bool,
    pub node_list: Option<PathBuf>,
    /// Directory of `<timestamp>.edges` snapshot files.
    pub snapshots: Option<PathBuf>,
    /// `src dst timestamp` records, bucketed by `bucket_width`.
    pub temporal_edges: Option<PathBuf>,
    pub bucket_width: Option<i64>,
    pub cumulative: bool,
    /// Pre-trained node attributes.
    pub attributes: Option<PathBuf>,
}

impl DataConfig {
    pub fn inputs(&self) -> Vec<&Path> {
        [
            &self.graph,
            &self.node_list,
            &self.temporal_edges,
            &self.attributes,
        ]
        .into_iter()
        .flatten()
        .map(PathBuf::as_path)
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    pub mode: SplitMode,
    pub ratios: Ratios,
    /// Snapshot `j` observed, `j + 1` tested (temporal mode).
    pub temporal_index: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            mode: SplitMode::Node,
            ratios: Ratios::default(),
            temporal_index: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureVariant {
    #[default]
    Pretrained,
    Shuffled,
    Random,
    Node2vec,
}

impl FeatureVariant {
    pub fn name(self) -> &'static str {
        match self {
            FeatureVariant::Pretrained => "pretrained",
            FeatureVariant::Shuffled => "shuffled",
            FeatureVariant::Random => "random",
            FeatureVariant::Node2vec => "node2vec",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    /// Attributes the model is trained on.
    pub variant: FeatureVariant,
    /// Shuffle used when the model trains on shuffled attributes.
    pub shuffle_mode: ShuffleMode,
    /// Width of random attributes when no pre-trained file sets it.
    pub random_dim: Option<usize>,
    /// Run Node2Vec on the full graph instead of the observed one. This
    /// leaks held-out topology and exists only for comparison.
    pub node2vec_full_graph: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            variant: FeatureVariant::Pretrained,
            shuffle_mode: ShuffleMode::Rows,
            random_dim: None,
            node2vec_full_graph: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Mlp,
    Config,
    Duplex,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mlp" => Ok(Self::Mlp),
            "config" => Ok(Self::Config),
            "duplex" => Ok(Self::Duplex),
            other => Err(Error::invalid(format!("unknown model '{other}' (mlp, config, duplex)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub hidden: Vec<usize>,
    pub train: TrainConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kind: ModelKind::Mlp,
            hidden: DEFAULT_HIDDEN.to_vec(),
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// K of Hits@K.
    pub k: usize,
    /// Degree-binned table with this many bins; 0 disables it.
    pub degree_bins: usize,
    /// Fit the training loss curve to a Gaussian tail (MLP only).
    pub subgaussian: bool,
    pub tail_fraction: f64,
    /// Score attribute variants with k-means at each of these cluster
    /// counts; empty disables the attribute report.
    pub report_ks: Vec<usize>,
    /// Combine the fitted sigma with the report's AMI into the
    /// generalization bound. Needs `subgaussian` and `report_ks`.
    pub bound: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            k: 20,
            degree_bins: 0,
            subgaussian: false,
            tail_fraction: 0.25,
            report_ks: Vec::new(),
            bound: false,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Parses a TOML file and anchors its relative paths at the file's
    /// directory.
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::MissingInput(path.to_path_buf()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let d = &mut self.data;
        for p in [
            &mut d.graph,
            &mut d.node_list,
            &mut d.snapshots,
            &mut d.temporal_edges,
            &mut d.attributes,
            &mut self.output_dir,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks internal consistency and that every input exists.
    pub fn validate(&self) -> Result<()> {
        let d = &self.data;
        let sources = [d.graph.is_some(), d.snapshots.is_some(), d.temporal_edges.is_some()]
            .iter()
            .filter(|&&b| b)
            .count();
        if sources != 1 {
            return Err(Error::Config(
                "set exactly one of data.graph, data.snapshots, data.temporal_edges".into(),
            ));
        }
        for p in d.inputs().into_iter().chain(d.snapshots.as_deref()) {
            if !p.exists() {
                return Err(Error::MissingInput(p.to_path_buf()));
            }
        }
        let temporal_data = d.graph.is_none();
        if temporal_data != (self.split.mode == SplitMode::Temporal) {
            return Err(Error::Config(
                "temporal split mode goes with snapshot or temporal-edge data, and only with those"
                    .into(),
            ));
        }
        if d.temporal_edges.is_some() && d.bucket_width.is_none() {
            return Err(Error::Config("data.bucket_width is required with data.temporal_edges".into()));
        }
        self.split.ratios.validate().map_err(|e| Error::Config(format!("split.ratios: {e}")))?;
        let model_reads_attrs = self.model.kind == ModelKind::Mlp
            && matches!(self.features.variant, FeatureVariant::Pretrained | FeatureVariant::Shuffled);
        if (model_reads_attrs || !self.eval.report_ks.is_empty()) && d.attributes.is_none() {
            return Err(Error::Config(
                "data.attributes is required for pre-trained or shuffled features and for the attribute report"
                    .into(),
            ));
        }
        if self.folds == 0 {
            return Err(Error::Config("folds must be at least 1".into()));
        }
        if self.eval.k == 0 {
            return Err(Error::Config("eval.k must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.eval.tail_fraction) {
            return Err(Error::Config("eval.tail_fraction must lie in [0, 1)".into()));
        }
        if self.eval.subgaussian && self.model.kind != ModelKind::Mlp {
            return Err(Error::Config("the subgaussian diagnostic needs a trained MLP".into()));
        }
        if self.eval.bound && (!self.eval.subgaussian || self.eval.report_ks.is_empty()) {
            return Err(Error::Config(
                "eval.bound needs eval.subgaussian and a nonempty eval.report_ks".into(),
            ));
        }
        if self.model.kind == ModelKind::Mlp {
            if self.model.hidden.is_empty() || self.model.hidden.contains(&0) {
                return Err(Error::Config("model.hidden needs positive layer widths".into()));
            }
            self.model.train.validate().map_err(|e| Error::Config(format!("model.train: {e}")))?;
        }
        self.node2vec.validate().map_err(|e| Error::Config(format!("node2vec: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
seed = 7
[data]
graph = "edges.tsv"
attributes = "attrs.txt"
"#;

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.split.mode, SplitMode::Node);
        assert_eq!(c.model.hidden, vec![100, 100, 100]);
        assert_eq!(c.model.train.epochs, 200);
        assert_eq!(c.eval.k, 20);
        assert_eq!(c.folds, 1);
    }

    #[test]
    fn seed_is_mandatory_and_typos_rejected() {
        assert!(matches!(
            RunConfig::from_toml_str("[data]\ngraph = \"g\"\n"),
            Err(Error::Config(_))
        ));
        assert!(RunConfig::from_toml_str(&format!("{MINIMAL}\n[eval]\nkk = 3\n")).is_err());
    }

    #[test]
    fn toml_round_trip() {
        let c = RunConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(RunConfig::from_toml_str(&c.to_toml_string().unwrap()).unwrap(), c);
    }

    #[test]
    fn validation_names_missing_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let cfg_path = dir.path().join("run.toml");
        std::fs::write(&cfg_path, MINIMAL).unwrap();
        let c = RunConfig::from_toml_file(&cfg_path).unwrap();
        assert_eq!(c.data.graph.as_deref(), Some(dir.path().join("edges.tsv").as_path()));
        match c.validate() {
            Err(Error::MissingInput(p)) => assert!(p.ends_with("edges.tsv")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inconsistent_options_rejected() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("edges.tsv"), "a b\n").unwrap();
        std::fs::write(dir.path().join("attrs.txt"), "a 1\nb 2\n").unwrap();
        let mut c = RunConfig::from_toml_str(MINIMAL).unwrap();
        c.resolve_paths(dir.path());
        c.validate().unwrap();

        let mut bad = c.clone();
        bad.split.mode = SplitMode::Temporal;
        assert!(bad.validate().is_err());
        let mut bad = c.clone();
        bad.eval.bound = true;
        assert!(bad.validate().is_err());
        let mut bad = c.clone();
        bad.model.kind = ModelKind::Config;
        bad.eval.subgaussian = true;
        assert!(bad.validate().is_err());
        let mut bad = c;
        bad.data.attributes = None;
        assert!(bad.validate().is_err());
    }
}

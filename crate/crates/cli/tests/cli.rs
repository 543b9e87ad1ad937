use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lpkit::attrs::save_attributes;
use lpkit::graph::save_graph;
use lpkit::synth::{attribute_graph, barabasi_albert, AttributeGraphParams};

fn lpkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpkit"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Fixture {
    _dir: tempfile::TempDir,
    root: PathBuf,
    graph: PathBuf,
    attrs: PathBuf,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let ag = attribute_graph(
        &AttributeGraphParams {
            num_nodes: 200,
            mean_degree: 8.0,
            ..AttributeGraphParams::default()
        },
        5,
    )
    .unwrap();
    let graph = root.join("edges.tsv");
    let attrs = root.join("attrs.txt");
    save_graph(&ag.graph, &graph).unwrap();
    save_attributes(&ag.attributes, &ag.graph, &attrs).unwrap();
    Fixture {
        _dir: dir,
        root,
        graph,
        attrs,
    }
}

#[test]
fn node_split_records_lost_edges() {
    let f = fixture();
    let out = f.root.join("split");
    let o = lpkit(&["split", "--mode", "node", "--ratios", "80,10,10", "--seed", "7", "--graph", s(&f.graph), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["mode"], "node");
    assert!(manifest["lost_edges"].as_u64().unwrap() > 0);
    assert!(manifest["source_sha256"].is_string());
}

#[test]
fn invalid_ratios_name_the_flag() {
    let f = fixture();
    let o = lpkit(&["split", "--mode", "edge", "--ratios", "80,10", "--seed", "1", "--graph", s(&f.graph), "--out", s(&f.root.join("x"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--ratios"), "{}", stderr(&o));
}

#[test]
fn missing_input_exits_2_naming_path() {
    let f = fixture();
    let missing = f.root.join("nope.txt");
    let o = lpkit(&["attrs", "score", "--graph", s(&f.graph), "--pretrained", s(&missing), "--k", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.txt"), "{}", stderr(&o));
}

#[test]
fn unknown_model_is_usage_error() {
    let f = fixture();
    let o = lpkit(&["baseline", "--model", "oracle", "--split", s(&f.root), "--out", "x.tsv"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn temporal_split_from_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let snaps = dir.path().join("snaps");
    std::fs::create_dir_all(&snaps).unwrap();
    std::fs::write(snaps.join("1.edges"), "a b\nb c\nc a\nc d\n").unwrap();
    std::fs::write(snaps.join("2.edges"), "a b\nb c\nc a\nc d\ne a\ne b\nf c\n").unwrap();
    let out = dir.path().join("split");
    let o = lpkit(&["split", "--mode", "temporal", "--snapshots", s(&snaps), "--index", "0", "--seed", "1", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("test_pos.tsv").exists());
    let o = lpkit(&["split", "--mode", "temporal", "--graph", s(&snaps.join("1.edges")), "--seed", "1", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn baseline_then_eval() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("ba.tsv");
    save_graph(&barabasi_albert(300, 4, 2).unwrap(), &graph).unwrap();
    let split = dir.path().join("split");
    assert!(lpkit(&["split", "--mode", "edge", "--seed", "3", "--graph", s(&graph), "--out", s(&split)]).status.success());
    for (model, extra) in [("config", None), ("duplex", Some("3"))] {
        let scores = dir.path().join(format!("{model}.tsv"));
        let mut args = vec!["baseline", "--model", model, "--split", s(&split), "--out", s(&scores)];
        if let Some(seed) = extra {
            args.extend(["--neg-seed", seed]);
        }
        let o = lpkit(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        let bins = dir.path().join(format!("{model}_bins.csv"));
        let o = lpkit(&["eval", "--split", s(&split), "--scores", s(&scores), "--k", "20", "--degree-bins", "4", "--bins-out", s(&bins)]);
        assert!(o.status.success(), "{}", stderr(&o));
        let m: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(m["auroc"].as_f64().unwrap() > 0.5);
        assert!(std::fs::read_to_string(&bins).unwrap().lines().count() > 1);
    }
}

#[test]
fn train_eval_and_diagnose() {
    let f = fixture();
    let split = f.root.join("split");
    assert!(lpkit(&["split", "--mode", "node", "--seed", "2", "--graph", s(&f.graph), "--out", s(&split)]).status.success());
    let run = f.root.join("train");
    let o = lpkit(&[
        "train", "--split", s(&split), "--attributes", s(&f.attrs), "--hidden", "16", "--epochs", "20",
        "--lr", "0.01", "--seed", "4", "--out", s(&run),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for file in ["model.bin", "trace.csv", "scores.tsv"] {
        assert!(run.join(file).exists(), "{file}");
    }
    let trace = run.join("trace.csv");
    let o = lpkit(&[
        "eval", "--split", s(&split), "--scores", s(&run.join("scores.tsv")), "--k", "5",
        "--trace", s(&trace), "--diagnose", "subgaussian",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["A", "sigma", "dominance"] {
        assert!(m["subgaussian"][key].is_number(), "{key}");
    }
    let o = lpkit(&["diagnose", "bound", "--trace", s(&trace), "--ami", "0.2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let b: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let sigma = b["sigma"].as_f64().unwrap();
    assert!((b["bound"].as_f64().unwrap() - (2.0 * sigma * sigma * 0.2).sqrt()).abs() < 1e-12);
}

#[test]
fn attrs_score_reports_each_k() {
    let f = fixture();
    let out = f.root.join("report.json");
    let o = lpkit(&[
        "attrs", "score", "--graph", s(&f.graph), "--pretrained", s(&f.attrs), "--k", "3,5", "--seed", "1",
        "--dim", "8", "--walks-per-node", "2", "--walk-length", "10", "--window", "3", "--sigma", "0.001",
        "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let reports = r.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for variant in ["pretrained", "shuffled", "random", "node2vec"] {
        assert!(reports[0]["db"][variant].is_number(), "{variant}");
    }
    assert!(reports[1]["ami"].is_number() && reports[1]["bound"].is_number());
}

#[test]
fn embed_writes_one_row_per_node() {
    let f = fixture();
    let out = f.root.join("emb.txt");
    let o = lpkit(&["embed", "--graph", s(&f.graph), "--dim", "4", "--walks-per-node", "1", "--walk-length", "5", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let first = text.lines().next().unwrap();
    assert_eq!(first.split_whitespace().count(), 5);
}

#[test]
fn run_and_rerun_from_manifest() {
    let f = fixture();
    let config = f.root.join("run.toml");
    std::fs::write(
        &config,
        r#"
seed = 11
[data]
graph = "edges.tsv"
attributes = "attrs.txt"
[model]
hidden = [8]
[model.train]
epochs = 10
learning_rate = 0.01
[node2vec]
dim = 8
walks_per_node = 2
walk_length = 10
window = 3
[eval]
k = 5
report_ks = [3]
"#,
    )
    .unwrap();
    let out = f.root.join("run");
    let o = lpkit(&["run", "--config", s(&config), "--out", s(&out), "--diagnose", "subgaussian", "--bound"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("metrics.json")).unwrap()).unwrap();
    assert!(m["folds"][0]["subgaussian"]["sigma"].is_number());
    assert!(m["folds"][0]["attribute_reports"][0]["bound"].is_number());

    let again = f.root.join("again");
    let o = lpkit(&["rerun", "--manifest", s(&out), "--out", s(&again)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(out.join("metrics.json")).unwrap(),
        std::fs::read(again.join("metrics.json")).unwrap()
    );
}

#[test]
fn run_rejects_inconsistent_config() {
    let f = fixture();
    let config = f.root.join("bad.toml");
    std::fs::write(&config, "seed = 1\n[data]\ngraph = \"edges.tsv\"\n[model]\nkind = \"config\"\n[eval]\nsubgaussian = true\n").unwrap();
    let o = lpkit(&["run", "--config", s(&config), "--out", s(&f.root.join("r"))]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = lpkit(&["run", "--config", s(&f.root.join("absent.toml"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.toml"));
}

//! Cross-module invariants checked through the public API.

use std::collections::HashSet;

use proptest::prelude::*;

use lpkit::attrs::AttributeMatrix;
use lpkit::graph::{load_graph, save_graph, EdgeListFormat, Graph};
use lpkit::quality::{adjusted_mutual_information, davies_bouldin, kmeans};
use lpkit::split::{random_node_split, read_split_dir, write_split_dir, Ratios};
use lpkit::pipeline::{make_split, Dataset, SplitConfig};
use lpkit::split::SplitMode;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    (6usize..40, proptest::collection::vec((0usize..40, 0usize..40), 10..120)).prop_map(|(n, pairs)| {
        let edges = pairs
            .into_iter()
            .map(|(a, b)| (a % n, b % n))
            .filter(|(a, b)| a != b);
        Graph::from_edges(n, edges).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ami_is_symmetric_and_at_most_one(
        u in proptest::collection::vec(0usize..4, 2..40),
        seed in any::<u64>(),
    ) {
        let v: Vec<usize> = u.iter().enumerate().map(|(i, &x)| (x + (seed as usize >> (i % 8))) % 3).collect();
        let a = adjusted_mutual_information(&u, &v).unwrap();
        let b = adjusted_mutual_information(&v, &u).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!(a <= 1.0 + 1e-12);
    }

    #[test]
    fn kmeans_history_never_rises(
        data in proptest::collection::vec(-10.0f64..10.0, 40..120),
        k in 2usize..5,
        seed in any::<u64>(),
    ) {
        let rows = data.len() / 2;
        let m = AttributeMatrix::new(rows, 2, data[..rows * 2].to_vec()).unwrap();
        let c = kmeans(&m, k, seed, 100, 0.0).unwrap();
        prop_assert!(c.labels.iter().all(|&l| l < k));
        prop_assert!(c.inertia_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-12));
        if c.cluster_sizes().iter().filter(|&&s| s > 0).count() >= 2 {
            if let Ok(db) = davies_bouldin(&m, &c) {
                prop_assert!(db >= 0.0);
            }
        }
    }

    #[test]
    fn inductive_evaluation_edges_stay_in_their_groups(g in graph_strategy(), seed in any::<u64>()) {
        let s = random_node_split(&g, Ratios::new(0.5, 0.25, 0.25).unwrap(), seed).unwrap();
        let train: HashSet<usize> = s.train_nodes.iter().copied().collect();
        let test: HashSet<usize> = s.test_nodes.iter().copied().collect();
        prop_assert!(s.train_graph.edges().iter().all(|(a, b)| train.contains(a) && train.contains(b)));
        if let Ok(e) = s.edge_split(&g, seed) {
            prop_assert!(e.test_neg.iter().all(|&(a, b)| test.contains(&a) && test.contains(&b) && !g.has_edge(a, b)));
            prop_assert!(e.test_pos.iter().all(|&(a, b)| test.contains(&a) && test.contains(&b)));
        }
    }
}

#[test]
fn split_directory_survives_a_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let g = lpkit::synth::barabasi_albert(120, 3, 9).unwrap();
    let path = dir.path().join("g.tsv");
    save_graph(&g, &path).unwrap();
    let loaded = load_graph(&path, &EdgeListFormat::default()).unwrap().graph;
    assert_eq!(loaded.num_edges(), g.num_edges());
    let dataset = Dataset {
        graph: loaded,
        sequence: None,
        attributes: None,
    };
    for mode in [SplitMode::Edge, SplitMode::Node] {
        let config = SplitConfig {
            mode,
            ..SplitConfig::default()
        };
        let split = make_split(&dataset, &config, 5).unwrap();
        let out = dir.path().join(format!("{mode:?}"));
        write_split_dir(&out, &split).unwrap();
        let back = read_split_dir(&out).unwrap();
        assert_eq!(back.edges, split.edges);
        assert_eq!(back.manifest, split.manifest);
        assert_eq!(back.test_nodes, split.test_nodes);
    }
}

//! Per-node topological features: degree, triangles, local clustering and
//! betweenness centrality.

use std::collections::VecDeque;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::Serialize;

use super::{Graph, NodeId};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TopoFeatures {
    pub degree: usize,
    pub clustering_coeff: f64,
    pub triangle_count: usize,
    pub betweenness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetweennessMode {
    /// Accumulate over every source.
    Exact,
    /// Accumulate over a seeded sample of sources and rescale by
    /// `n / sampled`. Approximate; meant for graphs beyond ~1e5 nodes.
    Sampled { fraction: f64, seed: u64 },
}

pub fn topo_features(graph: &Graph, mode: BetweennessMode) -> Vec<TopoFeatures> {
    let triangles = triangle_counts(graph);
    let bc = betweenness(graph, mode);
    (0..graph.num_nodes())
        .map(|v| {
            let degree = graph.degree(v);
            let clustering_coeff = if degree >= 2 {
                2.0 * triangles[v] as f64 / (degree * (degree - 1)) as f64
            } else {
                0.0
            };
            TopoFeatures {
                degree,
                clustering_coeff,
                triangle_count: triangles[v],
                betweenness: bc[v],
            }
        })
        .collect()
}

/// Triangles through each node. Each triangle `a < b < c` is found once from
/// its lowest edge by merging the sorted neighbor lists above `b`.
pub fn triangle_counts(graph: &Graph) -> Vec<usize> {
    let mut counts = vec![0usize; graph.num_nodes()];
    for &(a, b) in graph.edges() {
        let na = graph.neighbors(a);
        let nb = graph.neighbors(b);
        let (mut i, mut j) = (
            na.partition_point(|&x| x <= b),
            nb.partition_point(|&x| x <= b),
        );
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    counts[a] += 1;
                    counts[b] += 1;
                    counts[na[i]] += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    counts
}

const SOURCE_CHUNK: usize = 64;

/// Unnormalized betweenness (each unordered pair counted once).
///
/// Sources are processed in fixed-size chunks and the partial sums are added
/// in chunk order, so the result does not depend on the thread count.
pub fn betweenness(graph: &Graph, mode: BetweennessMode) -> Vec<f64> {
    let n = graph.num_nodes();
    if n == 0 {
        return Vec::new();
    }
    let (sources, scale): (Vec<NodeId>, f64) = match mode {
        BetweennessMode::Exact => ((0..n).collect(), 1.0),
        BetweennessMode::Sampled { fraction, seed } => {
            let count = ((n as f64 * fraction.clamp(0.0, 1.0)).round() as usize).clamp(1, n);
            let mut picked = sample(&mut rng::seeded(seed), n, count).into_vec();
            picked.sort_unstable();
            (picked, n as f64 / count as f64)
        }
    };

    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![0.0; n];
            let mut state = BrandesState::new(n);
            for &s in chunk {
                state.accumulate(graph, s, &mut acc);
            }
            acc
        })
        .collect();

    let mut total = vec![0.0; n];
    for part in partials {
        for (t, p) in total.iter_mut().zip(part) {
            *t += p;
        }
    }
    // Undirected: every pair was reached from both endpoints.
    for t in &mut total {
        *t *= 0.5 * scale;
    }
    total
}

struct BrandesState {
    stack: Vec<NodeId>,
    queue: VecDeque<NodeId>,
    preds: Vec<Vec<NodeId>>,
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
}

impl BrandesState {
    fn new(n: usize) -> Self {
        Self {
            stack: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
            preds: vec![Vec::new(); n],
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
        }
    }

    fn accumulate(&mut self, graph: &Graph, s: NodeId, acc: &mut [f64]) {
        for &v in &self.stack {
            self.preds[v].clear();
            self.sigma[v] = 0.0;
            self.dist[v] = -1;
            self.delta[v] = 0.0;
        }
        self.stack.clear();

        self.sigma[s] = 1.0;
        self.dist[s] = 0;
        self.queue.push_back(s);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for &w in graph.neighbors(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }

        for i in (0..self.stack.len()).rev() {
            let w = self.stack[i];
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for k in 0..self.preds[w].len() {
                let v = self.preds[w][k];
                self.delta[v] += self.sigma[v] * coeff;
            }
            if w != s {
                acc[w] += self.delta[w];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn features(n: usize, edges: &[(usize, usize)]) -> Vec<TopoFeatures> {
        topo_features(
            &Graph::from_edges(n, edges.iter().copied()).unwrap(),
            BetweennessMode::Exact,
        )
    }

    #[test]
    fn triangle_graph() {
        for f in features(3, &[(0, 1), (1, 2), (0, 2)]) {
            assert_eq!(f.degree, 2);
            assert_eq!(f.triangle_count, 1);
            assert_eq!(f.clustering_coeff, 1.0);
            assert_eq!(f.betweenness, 0.0);
        }
    }

    #[test]
    fn path_middle_node() {
        let f = features(3, &[(0, 1), (1, 2)]);
        assert_eq!(f[1].degree, 2);
        assert_eq!(f[1].triangle_count, 0);
        assert_eq!(f[1].clustering_coeff, 0.0);
        assert_eq!(f[1].betweenness, 1.0);
        assert_eq!(f[0].betweenness, 0.0);
    }

    #[test]
    fn isolated_node() {
        let f = features(2, &[]);
        assert_eq!(
            f[0],
            TopoFeatures {
                degree: 0,
                clustering_coeff: 0.0,
                triangle_count: 0,
                betweenness: 0.0
            }
        );
    }

    #[test]
    fn empty_graph() {
        let g = Graph::from_edges(0, vec![]).unwrap();
        assert!(topo_features(&g, BetweennessMode::Exact).is_empty());
    }

    #[test]
    fn sampled_with_full_fraction_matches_exact() {
        let g = Graph::from_edges(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (1, 5), (5, 3)]).unwrap();
        let exact = betweenness(&g, BetweennessMode::Exact);
        let sampled = betweenness(&g, BetweennessMode::Sampled { fraction: 1.0, seed: 3 });
        for (a, b) in exact.iter().zip(&sampled) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn brute_triangles(g: &Graph) -> usize {
        let n = g.num_nodes();
        let mut t = 0;
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c) {
                        t += 1;
                    }
                }
            }
        }
        t
    }

    /// BFS distances and shortest-path counts from one source.
    fn bfs_counts(g: &Graph, s: usize) -> (Vec<i64>, Vec<f64>) {
        let n = g.num_nodes();
        let mut dist = vec![-1i64; n];
        let mut count = vec![0.0; n];
        dist[s] = 0;
        count[s] = 1.0;
        let mut frontier = vec![s];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in g.neighbors(v) {
                    if dist[w] < 0 {
                        dist[w] = dist[v] + 1;
                        next.push(w);
                    }
                }
            }
            for &w in &next {
                count[w] = g
                    .neighbors(w)
                    .iter()
                    .filter(|&&u| dist[u] == dist[w] - 1)
                    .map(|&u| count[u])
                    .sum();
            }
            frontier = next;
        }
        (dist, count)
    }

    /// Pair-dependency definition: sum over s<t of sigma_st(v)/sigma_st.
    fn brute_betweenness(g: &Graph) -> Vec<f64> {
        let n = g.num_nodes();
        let tables: Vec<_> = (0..n).map(|s| bfs_counts(g, s)).collect();
        let mut bc = vec![0.0; n];
        for s in 0..n {
            for t in s + 1..n {
                let (ds, cs) = &tables[s];
                let (dt, ct) = &tables[t];
                if ds[t] < 0 {
                    continue;
                }
                for v in 0..n {
                    if v == s || v == t || ds[v] < 0 || dt[v] < 0 {
                        continue;
                    }
                    if ds[v] + dt[v] == ds[t] {
                        bc[v] += cs[v] * ct[v] / cs[t];
                    }
                }
            }
        }
        bc
    }

    fn random_graph() -> impl Strategy<Value = Graph> {
        (2usize..30, 0.05f64..0.5, any::<u64>()).prop_map(|(n, p, seed)| {
            use rand::Rng;
            let mut r = rng::seeded(seed);
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if r.random::<f64>() < p {
                        edges.push((a, b));
                    }
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    }

    proptest! {
        #[test]
        fn triangles_match_enumeration(g in random_graph()) {
            let per_node = triangle_counts(&g);
            prop_assert_eq!(per_node.iter().sum::<usize>(), 3 * brute_triangles(&g));
            for f in topo_features(&g, BetweennessMode::Exact) {
                if f.degree >= 2 {
                    let expect = 2.0 * f.triangle_count as f64 / (f.degree * (f.degree - 1)) as f64;
                    prop_assert_eq!(f.clustering_coeff, expect);
                    prop_assert!((0.0..=1.0).contains(&f.clustering_coeff));
                }
            }
        }

        #[test]
        fn betweenness_matches_pair_enumeration(g in random_graph()) {
            let fast = betweenness(&g, BetweennessMode::Exact);
            let slow = brute_betweenness(&g);
            for (a, b) in fast.iter().zip(&slow) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{} vs {}", a, b);
            }
        }
    }
}

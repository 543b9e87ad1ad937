//! Seeded synthetic graphs for tests, demos and desk-scale benchmarks.

use rand::seq::IndexedRandom;
use rand::Rng as _;
use rand_distr::{Distribution, Gamma, Normal};

use crate::attrs::AttributeMatrix;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::rng;

/// Preferential attachment: a clique on `m + 1` seed nodes, then each new
/// node links to `m` distinct earlier nodes picked with probability
/// proportional to degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m == 0 || n <= m {
        return Err(Error::invalid(format!("need n > m > 0 (n = {n}, m = {m})")));
    }
    let mut r = rng::seeded(seed);
    let mut edges: Vec<Edge> = Vec::with_capacity(n * m);
    // every endpoint occurrence, so a uniform pick is degree-proportional
    let mut ends: Vec<usize> = Vec::with_capacity(2 * n * m);
    for a in 0..=m {
        for b in a + 1..=m {
            edges.push((a, b));
            ends.extend([a, b]);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for v in m + 1..n {
        targets.clear();
        while targets.len() < m {
            let t = *ends.choose(&mut r).expect("seed clique has edges");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    Graph::from_edges(n, edges)
}

/// `count` disjoint cliques of `size` nodes; node `v` is in clique `v / size`.
pub fn planted_cliques(count: usize, size: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for c in 0..count {
        let base = c * size;
        for a in 0..size {
            for b in a + 1..size {
                edges.push((base + a, base + b));
            }
        }
    }
    Graph::from_edges(count * size, edges)
}

/// Two `size`-cliques joined by one bridge edge between nodes
/// `size - 1` and `size`.
pub fn barbell(size: usize) -> Result<Graph> {
    let g = planted_cliques(2, size)?;
    let mut edges = g.edges().to_vec();
    edges.push((size - 1, size));
    Graph::from_edges(2 * size, edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttributeGraphParams {
    pub num_nodes: usize,
    /// Latent topics; node mixtures over them drive every edge.
    pub topics: usize,
    /// Dirichlet concentration of the topic mixtures; small is near one-hot.
    pub concentration: f64,
    /// Target mean degree; sets the scale of the dot-product probabilities.
    pub mean_degree: f64,
    /// Extra attribute dimensions holding well-separated clusters that are
    /// unrelated to the edges.
    pub nuisance_dims: usize,
    pub nuisance_clusters: usize,
    pub nuisance_spread: f64,
}

impl Default for AttributeGraphParams {
    fn default() -> Self {
        Self {
            num_nodes: 2000,
            topics: 8,
            concentration: 0.1,
            mean_degree: 20.0,
            nuisance_dims: 4,
            nuisance_clusters: 5,
            nuisance_spread: 10.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AttributeGraph {
    pub graph: Graph,
    /// Topic mixtures followed by the nuisance columns.
    pub attributes: AttributeMatrix,
    /// Dominant topic of each node.
    pub topic: Vec<usize>,
    /// Nuisance cluster of each node.
    pub nuisance: Vec<usize>,
}

/// Random dot-product graph: each node draws topic mixture `x_v` from a
/// symmetric Dirichlet, and `a-b` is an edge with probability
/// `min(1, c <x_a, x_b>)`, `c` chosen to hit the target mean degree.
pub fn attribute_graph(params: &AttributeGraphParams, seed: u64) -> Result<AttributeGraph> {
    let n = params.num_nodes;
    if n < 2 || params.topics == 0 || !(params.concentration > 0.0) || !(params.mean_degree > 0.0) {
        return Err(Error::invalid("attribute graph needs n >= 2, topics > 0 and positive rates"));
    }
    if params.nuisance_dims > 0 && params.nuisance_clusters == 0 {
        return Err(Error::invalid("nuisance dims need at least one cluster"));
    }
    let mut r = rng::seeded(rng::derive(seed, &[0]));
    let gamma = Gamma::new(params.concentration, 1.0).map_err(|e| Error::invalid(e.to_string()))?;
    let t = params.topics;
    let mut mix = vec![0.0; n * t];
    let mut topic = vec![0; n];
    for v in 0..n {
        let row = &mut mix[v * t..(v + 1) * t];
        loop {
            row.iter_mut().for_each(|x| *x = gamma.sample(&mut r));
            let s: f64 = row.iter().sum();
            if s > 0.0 {
                row.iter_mut().for_each(|x| *x /= s);
                break;
            }
        }
        topic[v] = (0..t).max_by(|&a, &b| row[a].total_cmp(&row[b])).unwrap();
    }

    let dot = |a: usize, b: usize| -> f64 {
        (0..t).map(|k| mix[a * t + k] * mix[b * t + k]).sum()
    };
    let mut total_dot = 0.0;
    for a in 0..n {
        for b in a + 1..n {
            total_dot += dot(a, b);
        }
    }
    let scale = params.mean_degree * n as f64 / (2.0 * total_dot);
    let mut er = rng::seeded(rng::derive(seed, &[1]));
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if er.random::<f64>() < (scale * dot(a, b)).min(1.0) {
                edges.push((a, b));
            }
        }
    }

    let d = t + params.nuisance_dims;
    let mut nr = rng::seeded(rng::derive(seed, &[2]));
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let centres: Vec<Vec<f64>> = (0..params.nuisance_clusters)
        .map(|_| {
            (0..params.nuisance_dims)
                .map(|_| params.nuisance_spread * unit.sample(&mut nr))
                .collect()
        })
        .collect();
    let mut data = Vec::with_capacity(n * d);
    let mut nuisance = vec![0; n];
    for v in 0..n {
        data.extend_from_slice(&mix[v * t..(v + 1) * t]);
        if params.nuisance_dims > 0 {
            let c = nr.random_range(0..params.nuisance_clusters);
            nuisance[v] = c;
            data.extend(centres[c].iter().map(|m| m + unit.sample(&mut nr)));
        }
    }
    Ok(AttributeGraph {
        graph: Graph::from_edges(n, edges)?,
        attributes: AttributeMatrix::new(n, d, data)?,
        topic,
        nuisance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preferential_attachment_counts() {
        let g = barabasi_albert(200, 3, 1).unwrap();
        assert_eq!(g.num_edges(), 6 + (200 - 4) * 3);
        assert!((4..200).all(|v| g.degree(v) >= 3));
        let max = g.degrees().into_iter().max().unwrap();
        assert!(max > 20, "no hub formed: {max}");
        assert_eq!(g.edges(), barabasi_albert(200, 3, 1).unwrap().edges());
    }

    #[test]
    fn cliques_and_barbell() {
        assert_eq!(planted_cliques(2, 4).unwrap().num_edges(), 12);
        let b = barbell(5).unwrap();
        assert_eq!(b.num_edges(), 21);
        assert!(b.has_edge(4, 5));
    }

    #[test]
    fn attribute_graph_shape() {
        let params = AttributeGraphParams {
            num_nodes: 300,
            mean_degree: 10.0,
            ..AttributeGraphParams::default()
        };
        let ag = attribute_graph(&params, 3).unwrap();
        assert_eq!(ag.attributes.dim(), 12);
        let mean = 2.0 * ag.graph.num_edges() as f64 / 300.0;
        assert!((mean - 10.0).abs() < 2.0, "{mean}");
        // edges concentrate within dominant topics
        let same = ag.graph.edges().iter().filter(|&&(a, b)| ag.topic[a] == ag.topic[b]).count();
        assert!(same as f64 > 0.5 * ag.graph.num_edges() as f64);
    }
}

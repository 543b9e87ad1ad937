use rand::Rng as _;
use rayon::prelude::*;

use crate::attrs::AttributeMatrix;
use crate::error::{Error, Result};
use crate::rng;

pub const DEFAULT_MAX_ITER: usize = 300;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_RESTARTS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub k: usize,
    pub labels: Vec<usize>,
    /// `k x dim`; rows of empty clusters keep their last position.
    pub centroids: AttributeMatrix,
    pub inertia: f64,
    /// Inertia after every Lloyd update, in order.
    pub inertia_history: Vec<f64>,
}

impl Clustering {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm from a seeded k-means++ start. Stops once no centroid
/// moves by more than `tol` (Euclidean) or after `max_iter` updates.
pub fn kmeans(
    points: &AttributeMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    tol: f64,
) -> Result<Clustering> {
    let n = points.num_rows();
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if k > n {
        return Err(Error::invalid(format!("k = {k} exceeds the {n} points")));
    }
    if !(tol >= 0.0) {
        return Err(Error::invalid("tolerance must be nonnegative"));
    }
    // AttributeMatrix guarantees finite entries.
    let mut centroids = plus_plus_init(points, k, seed);
    let mut labels = assign(points, &centroids);
    let mut history = Vec::new();
    let mut iter = 0;
    loop {
        iter += 1;
        let next = update(points, &mut labels, k, &centroids);
        let inertia = inertia_of(points, &labels, &next);
        if let Some(&prev) = history.last() {
            debug_assert!(inertia <= prev * (1.0 + 1e-12) + 1e-12, "{inertia} > {prev}");
        }
        history.push(inertia);
        let shift = (0..k)
            .map(|c| sq_dist(centroids.row(c), next.row(c)))
            .fold(0.0, f64::max)
            .sqrt();
        centroids = next;
        if shift <= tol || iter >= max_iter.max(1) {
            break;
        }
        labels = assign(points, &centroids);
    }
    Ok(Clustering {
        k,
        labels,
        centroids,
        inertia: *history.last().unwrap(),
        inertia_history: history,
    })
}

/// Best of `restarts` runs by final inertia, run `i` seeded with
/// `derive(seed, [i])`. Ties keep the earlier run.
pub fn kmeans_restarts(
    points: &AttributeMatrix,
    k: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
    tol: f64,
) -> Result<Clustering> {
    if restarts == 0 {
        return Err(Error::invalid("need at least one k-means run"));
    }
    let runs: Vec<Clustering> = (0..restarts as u64)
        .into_par_iter()
        .map(|i| kmeans(points, k, rng::derive(seed, &[i]), max_iter, tol))
        .collect::<Result<_>>()?;
    Ok(runs
        .into_iter()
        .reduce(|best, c| if c.inertia < best.inertia { c } else { best })
        .expect("at least one run"))
}

fn plus_plus_init(points: &AttributeMatrix, k: usize, seed: u64) -> AttributeMatrix {
    let n = points.num_rows();
    let mut r = rng::seeded(seed);
    let mut chosen = Vec::with_capacity(k);
    let mut taken = vec![false; n];
    let first = r.random_range(0..n);
    chosen.push(first);
    taken[first] = true;
    let mut d2: Vec<f64> = points.rows().map(|p| sq_dist(p, points.row(first))).collect();
    while chosen.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = r.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if target < w {
                        break;
                    }
                    target -= w;
                }
            }
            pick.expect("positive total weight")
        } else {
            // every point coincides with a centre: take any unused one
            let free: Vec<usize> = (0..n).filter(|&i| !taken[i]).collect();
            free[r.random_range(0..free.len())]
        };
        chosen.push(next);
        taken[next] = true;
        for (i, p) in points.rows().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, points.row(next)));
        }
    }
    points.select_rows(&chosen)
}

/// Nearest centroid per point, ties to the lower index.
fn assign(points: &AttributeMatrix, centroids: &AttributeMatrix) -> Vec<usize> {
    (0..points.num_rows())
        .into_par_iter()
        .map(|i| {
            let p = points.row(i);
            let mut best = (f64::INFINITY, 0);
            for (c, row) in centroids.rows().enumerate() {
                let d = sq_dist(p, row);
                if d < best.0 {
                    best = (d, c);
                }
            }
            best.1
        })
        .collect()
}

fn means(points: &AttributeMatrix, labels: &[usize], k: usize, fallback: &AttributeMatrix) -> AttributeMatrix {
    let dim = points.dim();
    let mut sums = AttributeMatrix::zeros(k, dim);
    let mut counts = vec![0usize; k];
    for (p, &l) in points.rows().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums.row_mut(l).iter_mut().zip(p) {
            *s += v;
        }
    }
    for c in 0..k {
        if counts[c] == 0 {
            sums.row_mut(c).copy_from_slice(fallback.row(c));
        } else {
            let inv = counts[c] as f64;
            sums.row_mut(c).iter_mut().for_each(|s| *s /= inv);
        }
    }
    sums
}

/// Centroid update. An empty cluster takes over the point farthest from
/// its own centroid, drawn from clusters that can spare a member.
fn update(
    points: &AttributeMatrix,
    labels: &mut [usize],
    k: usize,
    previous: &AttributeMatrix,
) -> AttributeMatrix {
    let mut centroids = means(points, labels, k, previous);
    loop {
        let mut sizes = vec![0usize; k];
        for &l in labels.iter() {
            sizes[l] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return centroids;
        };
        let far = (0..points.num_rows())
            .filter(|&i| sizes[labels[i]] > 1)
            .map(|i| (sq_dist(points.row(i), centroids.row(labels[i])), i))
            .filter(|&(d, _)| d > 0.0)
            .fold(None, |best: Option<(f64, usize)>, cur| match best {
                Some(b) if b.0 >= cur.0 => Some(b),
                _ => Some(cur),
            });
        let Some((_, i)) = far else {
            return centroids;
        };
        labels[i] = empty;
        centroids = means(points, labels, k, &centroids);
    }
}

fn inertia_of(points: &AttributeMatrix, labels: &[usize], centroids: &AttributeMatrix) -> f64 {
    points
        .rows()
        .zip(labels)
        .map(|(p, &l)| sq_dist(p, centroids.row(l)))
        .sum()
}

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which mean of the two entropies normalizes adjusted mutual information.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AmiNormalization {
    #[default]
    Arithmetic,
    Min,
    Max,
    Geometric,
}

/// Hypergeometric weights below this are dropped from `E[MI]`.
const WEIGHT_FLOOR: f64 = 1e-16;

/// Contingency table with row sums `a`, column sums `b`.
struct Table {
    n: usize,
    cells: HashMap<(usize, usize), usize>,
    a: Vec<usize>,
    b: Vec<usize>,
}

fn relabel<T: Eq + std::hash::Hash + Copy>(labels: &[T]) -> Vec<usize> {
    let mut ids = HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(*l).or_insert(next)
        })
        .collect()
}

fn table(u: &[usize], v: &[usize]) -> Result<Table> {
    if u.len() != v.len() {
        return Err(Error::invalid(format!(
            "label lists differ in length ({} vs {})",
            u.len(),
            v.len()
        )));
    }
    if u.is_empty() {
        return Err(Error::Empty("no labels".into()));
    }
    let (u, v) = (relabel(u), relabel(v));
    let rows = u.iter().max().unwrap() + 1;
    let cols = v.iter().max().unwrap() + 1;
    let mut t = Table {
        n: u.len(),
        cells: HashMap::new(),
        a: vec![0; rows],
        b: vec![0; cols],
    };
    for (&i, &j) in u.iter().zip(&v) {
        *t.cells.entry((i, j)).or_insert(0) += 1;
        t.a[i] += 1;
        t.b[j] += 1;
    }
    Ok(t)
}

fn entropy_of(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

fn mi_of(t: &Table) -> f64 {
    let n = t.n as f64;
    let mut cells: Vec<_> = t.cells.iter().collect();
    cells.sort_unstable();
    cells
        .into_iter()
        .map(|(&(i, j), &c)| {
            let c = c as f64;
            c / n * (n * c / (t.a[i] as f64 * t.b[j] as f64)).ln()
        })
        .sum::<f64>()
        .max(0.0)
}

/// Entropy of a labeling in nats.
pub fn entropy(labels: &[usize]) -> Result<f64> {
    let t = table(labels, labels)?;
    Ok(entropy_of(&t.a, t.n))
}

/// Mutual information between two labelings in nats.
pub fn mutual_information(u: &[usize], v: &[usize]) -> Result<f64> {
    Ok(mi_of(&table(u, v)?))
}

fn expected_mi_of(t: &Table) -> f64 {
    let n = t.n;
    let mut lf = Vec::with_capacity(n + 1);
    lf.push(0.0f64);
    for k in 1..=n {
        lf.push(lf[k - 1] + (k as f64).ln());
    }
    let nf = n as f64;
    let mut total = 0.0;
    for &a in &t.a {
        for &b in &t.b {
            let start = (a + b).saturating_sub(n).max(1);
            let fixed = lf[a] + lf[b] + lf[n - a] + lf[n - b] - lf[n];
            for nij in start..=a.min(b) {
                let log_w = fixed - lf[nij] - lf[a - nij] - lf[b - nij] - lf[n + nij - a - b];
                let w = log_w.exp();
                if w < WEIGHT_FLOOR {
                    continue;
                }
                let x = nij as f64;
                total += w * x / nf * (nf * x / (a as f64 * b as f64)).ln();
            }
        }
    }
    total
}

/// `E[MI]` under random permutation of one labeling with both sets of
/// cluster sizes held fixed.
pub fn expected_mutual_information(u: &[usize], v: &[usize]) -> Result<f64> {
    Ok(expected_mi_of(&table(u, v)?))
}

pub fn adjusted_mutual_information(u: &[usize], v: &[usize]) -> Result<f64> {
    adjusted_mutual_information_with(u, v, AmiNormalization::Arithmetic)
}

/// Chance-corrected mutual information, `(MI - E[MI]) / (norm - E[MI])`.
/// Partitions equal up to relabeling score exactly 1.
pub fn adjusted_mutual_information_with(
    u: &[usize],
    v: &[usize],
    norm: AmiNormalization,
) -> Result<f64> {
    let t = table(u, v)?;
    if relabel(u) == relabel(v) {
        return Ok(1.0);
    }
    let mi = mi_of(&t);
    let emi = expected_mi_of(&t);
    let (hu, hv) = (entropy_of(&t.a, t.n), entropy_of(&t.b, t.n));
    let normalizer = match norm {
        AmiNormalization::Arithmetic => 0.5 * (hu + hv),
        AmiNormalization::Min => hu.min(hv),
        AmiNormalization::Max => hu.max(hv),
        AmiNormalization::Geometric => (hu * hv).sqrt(),
    };
    let denom = normalizer - emi;
    let eps = f64::EPSILON * normalizer.max(1.0);
    if denom.abs() <= eps {
        return Ok(if (mi - emi).abs() <= eps { 1.0 } else { 0.0 });
    }
    Ok((mi - emi) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::seq::SliceRandom;
    use rand::Rng;

    /// Average MI over every permutation of `v`, by Heap's algorithm.
    fn permutation_average(u: &[usize], v: &[usize]) -> f64 {
        let mut v = v.to_vec();
        let n = v.len();
        let mut c = vec![0; n];
        let mut total = mutual_information(u, &v).unwrap();
        let mut count = 1.0;
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    v.swap(0, i);
                } else {
                    v.swap(c[i], i);
                }
                total += mutual_information(u, &v).unwrap();
                count += 1.0;
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        total / count
    }

    #[test]
    fn expected_mi_matches_exhaustive_average() {
        let mut r = rng::seeded(1);
        for _ in 0..30 {
            let n = r.random_range(1..=7);
            let u: Vec<usize> = (0..n).map(|_| r.random_range(0..3)).collect();
            let v: Vec<usize> = (0..n).map(|_| r.random_range(0..4)).collect();
            let e = expected_mutual_information(&u, &v).unwrap();
            assert!((e - permutation_average(&u, &v)).abs() < 1e-9, "{u:?} {v:?}");
        }
    }

    #[test]
    fn mi_matches_contingency_formula() {
        // u = [0,0,1,1], v = [0,1,1,1]: n00=1, n01=1, n11=2
        let mi = mutual_information(&[0, 0, 1, 1], &[0, 1, 1, 1]).unwrap();
        let want = 0.25 * (4.0f64 * 1.0 / (2.0 * 1.0)).ln()
            + 0.25 * (4.0f64 * 1.0 / (2.0 * 3.0)).ln()
            + 0.5 * (4.0f64 * 2.0 / (2.0 * 3.0)).ln();
        assert!((mi - want).abs() < 1e-12);
    }

    #[test]
    fn relabeled_copy_scores_one() {
        let u = vec![0, 0, 1, 2, 2, 2];
        let v = vec![7, 7, 3, 9, 9, 9];
        for norm in [
            AmiNormalization::Arithmetic,
            AmiNormalization::Min,
            AmiNormalization::Max,
            AmiNormalization::Geometric,
        ] {
            assert_eq!(adjusted_mutual_information_with(&u, &v, norm).unwrap(), 1.0);
        }
        assert_eq!(adjusted_mutual_information(&[4, 4], &[1, 1]).unwrap(), 1.0);
    }

    #[test]
    fn trivial_against_nontrivial_is_zero() {
        assert_eq!(adjusted_mutual_information(&[0, 0, 0, 0], &[0, 1, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_and_centred() {
        let mut r = rng::seeded(5);
        let mut sum = 0.0;
        for _ in 0..20 {
            let u: Vec<usize> = (0..1000).map(|_| r.random_range(0..5)).collect();
            let mut v = u.clone();
            v.shuffle(&mut r);
            let a = adjusted_mutual_information(&u, &v).unwrap();
            let b = adjusted_mutual_information(&v, &u).unwrap();
            assert!((a - b).abs() < 1e-12);
            sum += a;
        }
        assert!((sum / 20.0).abs() < 0.02);
    }

    #[test]
    fn input_errors() {
        assert!(adjusted_mutual_information(&[], &[]).is_err());
        assert!(adjusted_mutual_information(&[0, 1], &[0]).is_err());
    }
}

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Scores of positive (true) and negative (sampled) candidate edges.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredEdges {
    pub pos_scores: Vec<f64>,
    pub neg_scores: Vec<f64>,
}

impl ScoredEdges {
    pub fn new(pos_scores: Vec<f64>, neg_scores: Vec<f64>) -> Result<Self> {
        if let Some(v) = pos_scores.iter().chain(&neg_scores).find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite score {v}")));
        }
        Ok(Self {
            pos_scores,
            neg_scores,
        })
    }

    fn require_both(&self) -> Result<()> {
        if self.pos_scores.is_empty() {
            return Err(Error::Empty("no positive scores".into()));
        }
        if self.neg_scores.is_empty() {
            return Err(Error::Empty("no negative scores".into()));
        }
        Ok(())
    }
}

/// Fraction of positives scoring strictly above the `k`-th highest negative.
/// Ties with that negative count as misses.
pub fn hits_at_k(scored: &ScoredEdges, k: usize) -> Result<f64> {
    scored.require_both()?;
    if k == 0 || k > scored.neg_scores.len() {
        return Err(Error::invalid(format!(
            "K = {k} must be between 1 and the number of negatives ({})",
            scored.neg_scores.len()
        )));
    }
    let mut neg = scored.neg_scores.clone();
    neg.sort_unstable_by(|a, b| b.total_cmp(a));
    let threshold = neg[k - 1];
    let hits = scored.pos_scores.iter().filter(|&&s| s > threshold).count();
    Ok(hits as f64 / scored.pos_scores.len() as f64)
}

/// Probability that a random positive outranks a random negative, ties
/// counting one half.
pub fn auroc(scored: &ScoredEdges) -> Result<f64> {
    scored.require_both()?;
    let mut neg = scored.neg_scores.clone();
    neg.sort_unstable_by(f64::total_cmp);
    // Twice the Mann-Whitney U statistic, kept integral.
    let mut twice_u: u128 = 0;
    for &p in &scored.pos_scores {
        let below = neg.partition_point(|&x| x < p);
        let not_above = neg.partition_point(|&x| x <= p);
        twice_u += 2 * below as u128 + (not_above - below) as u128;
    }
    let pairs = scored.pos_scores.len() as f64 * neg.len() as f64;
    Ok(twice_u as f64 / (2.0 * pairs))
}

/// Average precision: walking down the ranking one tie block at a time, the
/// precision at each block weighted by the recall it adds. No interpolation.
pub fn auprc(scored: &ScoredEdges) -> Result<f64> {
    scored.require_both()?;
    let mut all: Vec<(f64, bool)> = scored
        .pos_scores
        .iter()
        .map(|&s| (s, true))
        .chain(scored.neg_scores.iter().map(|&s| (s, false)))
        .collect();
    all.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));

    let total_pos = scored.pos_scores.len() as f64;
    let (mut tp, mut seen) = (0usize, 0usize);
    let mut ap = 0.0;
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        let mut block_pos = 0usize;
        while j < all.len() && all[j].0 == all[i].0 {
            block_pos += all[j].1 as usize;
            j += 1;
        }
        tp += block_pos;
        seen += j - i;
        if block_pos > 0 {
            ap += (tp as f64 / seen as f64) * (block_pos as f64 / total_pos);
        }
        i = j;
    }
    Ok(ap)
}

/// JSON shape `{"<metric>": value, ..., "n_pos": .., "n_neg": .., "K": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    #[serde(flatten)]
    pub metrics: BTreeMap<String, f64>,
    pub n_pos: usize,
    pub n_neg: usize,
    #[serde(rename = "K")]
    pub k: usize,
}

impl MetricReport {
    /// Hits@K, AUROC and AUPRC. Hits@K is omitted when there are fewer than
    /// `k` negatives.
    pub fn compute(scored: &ScoredEdges, k: usize) -> Result<Self> {
        let mut metrics = BTreeMap::new();
        if k >= 1 && k <= scored.neg_scores.len() {
            metrics.insert(format!("hits@{k}"), hits_at_k(scored, k)?);
        }
        metrics.insert("auroc".into(), auroc(scored)?);
        metrics.insert("auprc".into(), auprc(scored)?);
        Ok(Self {
            metrics,
            n_pos: scored.pos_scores.len(),
            n_neg: scored.neg_scores.len(),
            k,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(pos: &[f64], neg: &[f64]) -> ScoredEdges {
        ScoredEdges::new(pos.to_vec(), neg.to_vec()).unwrap()
    }

    #[test]
    fn hits_threshold_example() {
        assert_eq!(hits_at_k(&s(&[0.9, 0.4], &[0.8, 0.5, 0.3]), 2).unwrap(), 0.5);
    }

    #[test]
    fn hits_ties_lose() {
        assert_eq!(hits_at_k(&s(&[0.5, 0.6], &[0.5, 0.1]), 1).unwrap(), 0.5);
    }

    #[test]
    fn hits_k_bounds() {
        let x = s(&[1.0], &[0.0, 0.5]);
        assert!(hits_at_k(&x, 3).is_err());
        assert!(hits_at_k(&x, 0).is_err());
    }

    #[test]
    fn separated_scores_are_perfect() {
        let x = s(&[5.0, 6.0, 7.0], &[1.0, 2.0, 3.0]);
        for k in 1..=3 {
            assert_eq!(hits_at_k(&x, k).unwrap(), 1.0);
        }
        assert_eq!(auroc(&x).unwrap(), 1.0);
        assert_eq!(auprc(&x).unwrap(), 1.0);
    }

    #[test]
    fn auroc_example() {
        assert_eq!(auroc(&s(&[0.8, 0.4], &[0.6, 0.2])).unwrap(), 0.75);
        assert_eq!(auroc(&s(&[0.3; 4], &[0.3; 3])).unwrap(), 0.5);
    }

    #[test]
    fn auprc_single_positive_first() {
        assert_eq!(auprc(&s(&[0.9], &[0.8, 0.7])).unwrap(), 1.0);
        // ranking +,-,+ : (1/1)(1/2) + (2/3)(1/2)
        let v = auprc(&s(&[0.9, 0.1], &[0.5])).unwrap();
        assert!((v - (0.5 + 1.0 / 3.0)).abs() < 1e-15);
        // one tie block holding everything: precision = base rate
        let t = auprc(&s(&[0.5, 0.5], &[0.5, 0.5, 0.5])).unwrap();
        assert!((t - 0.4).abs() < 1e-15);
    }

    #[test]
    fn empty_inputs_rejected() {
        assert!(auroc(&s(&[], &[0.1])).is_err());
        assert!(auprc(&s(&[0.1], &[])).is_err());
        assert!(ScoredEdges::new(vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = MetricReport::compute(&s(&[0.9, 0.4], &[0.8, 0.5, 0.3]), 2).unwrap();
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["hits@2"], 0.5);
        assert_eq!(json["n_pos"], 2);
        assert_eq!(json["K"], 2);
    }

    proptest! {
        #[test]
        fn hits_monotone_in_k(
            pos in prop::collection::vec(0u8..20, 1..40),
            neg in prop::collection::vec(0u8..20, 1..40),
        ) {
            let x = s(
                &pos.iter().map(|&v| v as f64).collect::<Vec<_>>(),
                &neg.iter().map(|&v| v as f64).collect::<Vec<_>>(),
            );
            let mut prev = 0.0;
            for k in 1..=neg.len() {
                let h = hits_at_k(&x, k).unwrap();
                prop_assert!(h >= prev);
                prev = h;
            }
        }
    }
}

//! Fit of the training-loss curve to a Gaussian tail `A exp(-sigma x^2)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::predictor::TrainTrace;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubgaussianFit {
    #[serde(rename = "A")]
    pub a: f64,
    pub sigma: f64,
    /// Share of tail epochs whose loss sits at or below the fitted curve.
    pub dominance: f64,
}

pub fn fit_subgaussian(trace: &TrainTrace, tail_start_fraction: f64) -> Result<SubgaussianFit> {
    fit_subgaussian_losses(&trace.losses, tail_start_fraction)
}

/// Least squares of `ln L_x = ln A - sigma x^2` over every epoch
/// `x = 1..=T`. A rising curve gives `sigma = 0` and `A` the geometric mean
/// of the losses.
pub fn fit_subgaussian_losses(losses: &[f64], tail_start_fraction: f64) -> Result<SubgaussianFit> {
    if losses.len() < 8 {
        return Err(Error::invalid(format!(
            "need at least 8 epochs to fit, got {}",
            losses.len()
        )));
    }
    if !(0.0..1.0).contains(&tail_start_fraction) {
        return Err(Error::invalid("tail start fraction must lie in [0, 1)"));
    }
    if let Some(&bad) = losses.iter().find(|&&l| !(l > 0.0) || !l.is_finite()) {
        return Err(Error::invalid(format!("losses must be positive and finite, got {bad}")));
    }

    let n = losses.len() as f64;
    let xs: Vec<f64> = (1..=losses.len()).map(|x| (x * x) as f64).collect();
    let ys: Vec<f64> = losses.iter().map(|l| l.ln()).collect();
    // Center on the first sample so a flat curve has exactly zero deviations.
    let y0 = ys[0];
    let y_mean = y0 + ys.iter().map(|y| y - y0).sum::<f64>() / n;
    let x_mean = xs.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxy += (x - x_mean) * (y - y_mean);
        sxx += (x - x_mean) * (x - x_mean);
    }
    let slope = sxy / sxx;
    let (sigma, ln_a) = if slope < 0.0 {
        (-slope, y_mean - slope * x_mean)
    } else {
        (0.0, y_mean)
    };
    let a = ln_a.exp();

    let start = tail_start_fraction * n;
    let tail: Vec<usize> = (1..=losses.len()).filter(|&x| x as f64 > start).collect();
    let below = tail
        .iter()
        .filter(|&&x| losses[x - 1] <= a * (-sigma * (x * x) as f64).exp() * (1.0 + 1e-6))
        .count();
    Ok(SubgaussianFit {
        a,
        sigma,
        dominance: below as f64 / tail.len() as f64,
    })
}

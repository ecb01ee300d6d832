//! Bootstrap prediction interval for the relative-error P95, plus the
//! coverage check on held-out errors.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quantile_sorted;
use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Relative-error bound with its bootstrap confidence interval. The
/// coverage fields are populated once the bound has been checked against a
/// held-out test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionInterval {
    /// Relative-error bound as a fraction: true life lies within
    /// [pred * (1 - epsilon), pred * (1 + epsilon)] at the target coverage.
    pub epsilon: f64,
    /// Bootstrap mean of the 95th percentile of calibration errors, in %.
    pub p95_mean: f64,
    /// 95% confidence interval of that percentile (2.5th to 97.5th
    /// percentile of the bootstrap distribution), in %.
    pub ci95: (f64, f64),
    /// Fraction of test errors within the bound, once measured.
    pub coverage: Option<f64>,
    /// Bootstrap CI95 of the coverage, once measured.
    pub coverage_ci95: Option<(f64, f64)>,
}

fn resample_percentile(errors: &[f64], p: f64, seed: u64, resample: u64) -> f64 {
    let mut rng = stream_rng(seed, resample);
    let mut draw: Vec<f64> = (0..errors.len())
        .map(|_| errors[rng.random_range(0..errors.len())])
        .collect();
    draw.sort_by(|a, b| a.partial_cmp(b).unwrap());
    quantile_sorted(&draw, p)
}

/// Bootstrap the 95th percentile of the calibration errors (in %).
///
/// Draws `resamples` bootstrap samples (with replacement, same size as the
/// input), takes the P95 of each, and reports the mean and the (2.5%,
/// 97.5%) band of that bootstrap distribution. Resamples run in parallel on
/// per-index substreams, so the result is independent of thread scheduling.
pub fn bootstrap_p95_interval(
    calibration_errors: &[f64],
    resamples: usize,
    seed: u64,
) -> Result<PredictionInterval> {
    if calibration_errors.is_empty() {
        return Err(Error::invalid("cannot bootstrap an empty calibration set"));
    }
    if resamples < 1_000 {
        return Err(Error::invalid(format!(
            "need at least 1000 bootstrap resamples, got {resamples}"
        )));
    }
    let mut p95s: Vec<f64> = (0..resamples as u64)
        .into_par_iter()
        .map(|r| resample_percentile(calibration_errors, 0.95, seed, r))
        .collect();
    let p95_mean = p95s.iter().sum::<f64>() / p95s.len() as f64;
    p95s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ci95 = (quantile_sorted(&p95s, 0.025), quantile_sorted(&p95s, 0.975));
    Ok(PredictionInterval {
        epsilon: p95_mean / 100.0,
        p95_mean,
        ci95,
        coverage: None,
        coverage_ci95: None,
    })
}

/// Fraction of test errors within the bound 100 * epsilon, with a bootstrap
/// CI95 over the test errors.
pub fn coverage_check(
    test_errors: &[f64],
    epsilon: f64,
    resamples: usize,
    seed: u64,
) -> Result<(f64, (f64, f64))> {
    if test_errors.is_empty() {
        return Err(Error::invalid("cannot measure coverage on an empty test set"));
    }
    let bound = 100.0 * epsilon;
    let covered = |errs: &[f64]| errs.iter().filter(|&&e| e <= bound).count() as f64 / errs.len() as f64;
    let coverage = covered(test_errors);

    let mut rates: Vec<f64> = (0..resamples as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, r);
            let draw: Vec<f64> = (0..test_errors.len())
                .map(|_| test_errors[rng.random_range(0..test_errors.len())])
                .collect();
            covered(&draw)
        })
        .collect();
    rates.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let ci = (quantile_sorted(&rates, 0.025), quantile_sorted(&rates, 0.975));
    Ok((coverage, ci))
}

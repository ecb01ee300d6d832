//! Statistical certification layer: error metrics, rank correlation,
//! two-sample hypothesis tests, bootstrap prediction intervals, the
//! train/val/test split and the proximity split audit.

mod bootstrap;
mod proximity;
mod rank;
mod split;
mod twosample;

pub use bootstrap::{bootstrap_p95_interval, coverage_check, PredictionInterval};
pub use proximity::{proximity_audit, ProximityReport};
pub use rank::spearman;
pub use split::{split_assign, Split, SplitAssignment};
pub use twosample::{ad_2sample, chi2_2sample, ks_2sample};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute percentage error: |pred - truth| / |truth| * 100.
pub fn relative_error(pred: f64, truth: f64) -> Result<f64> {
    if truth == 0.0 {
        return Err(Error::invalid("relative error undefined for truth = 0"));
    }
    Ok((pred - truth).abs() / truth.abs() * 100.0)
}

/// Quantile with linear interpolation at rank p * (n - 1), on sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = p.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (rank - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

fn sorted_copy(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Summary statistics of a set of relative errors (in %).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub mean: f64,
    /// Sample standard deviation (n - 1); 0 for a single observation.
    pub std: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

/// Mean, sample std, linear-interpolation quartiles and extrema.
pub fn error_summary(errors: &[f64]) -> Result<ErrorSummary> {
    if errors.is_empty() {
        return Err(Error::invalid("cannot summarize an empty error list"));
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let std = if errors.len() > 1 {
        (errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let sorted = sorted_copy(errors);
    Ok(ErrorSummary {
        mean,
        std,
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q3: quantile_sorted(&sorted, 0.75),
        min: sorted[0],
        max: sorted[sorted.len() - 1],
    })
}

/// Mean relative error per group key.
pub fn grouped_mre<K: Ord + Clone>(records: &[(K, f64)]) -> BTreeMap<K, f64> {
    let mut sums: BTreeMap<K, (f64, usize)> = BTreeMap::new();
    for (key, err) in records {
        let entry = sums.entry(key.clone()).or_insert((0.0, 0));
        entry.0 += err;
        entry.1 += 1;
    }
    sums.into_iter()
        .map(|(k, (sum, count))| (k, sum / count as f64))
        .collect()
}

/// Tukey fence: threshold Q3 + 1.5 IQR; returns the threshold and the
/// indices of errors strictly above it.
pub fn tukey_fence(errors: &[f64]) -> Result<(f64, Vec<usize>)> {
    if errors.is_empty() {
        return Err(Error::invalid("cannot compute Tukey fences on empty input"));
    }
    let sorted = sorted_copy(errors);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);
    let threshold = q3 + 1.5 * (q3 - q1);
    let outliers = errors
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > threshold)
        .map(|(i, _)| i)
        .collect();
    Ok((threshold, outliers))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_error_examples() {
        assert_eq!(relative_error(110.0, 100.0).unwrap(), 10.0);
        assert_eq!(relative_error(100.0, 100.0).unwrap(), 0.0);
        assert_eq!(relative_error(90.0, 100.0).unwrap(), 10.0);
        assert!(relative_error(1.0, 0.0).is_err());
    }

    #[test]
    fn summary_quartiles_are_linear_interpolation() {
        let s = error_summary(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.q1, 2.0);
        assert_eq!(s.median, 3.0);
        assert_eq!(s.q3, 4.0);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 5.0);
        assert_eq!(s.mean, 3.0);

        let single = error_summary(&[7.0]).unwrap();
        assert_eq!(single.std, 0.0);
        assert_eq!(single.q1, 7.0);
        assert_eq!(single.max, 7.0);

        assert_eq!(error_summary(&[0.0, 10.0]).unwrap().mean, 5.0);
        assert!(error_summary(&[]).is_err());
    }

    #[test]
    fn summary_ordering_invariant() {
        let data = [13.1, 0.2, 5.5, 9.9, 2.4, 40.0, 7.7];
        let s = error_summary(&data).unwrap();
        assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
    }

    #[test]
    fn grouped_mre_averages_each_key_independently() {
        let records = vec![("a", 2.0), ("b", 10.0), ("a", 4.0), ("b", 20.0)];
        let g = grouped_mre(&records);
        assert_eq!(g["a"], 3.0);
        assert_eq!(g["b"], 15.0);

        let one_group = grouped_mre(&[("x", 1.0), ("x", 2.0), ("x", 3.0)]);
        assert_eq!(one_group["x"], 2.0);
    }

    #[test]
    fn tukey_threshold_from_quartile_pair() {
        // with Q1 = 2.47 and Q3 = 8.40 the fence sits at 17.295 (~17.3)
        let q1 = 2.47f64;
        let q3 = 8.40f64;
        let threshold = q3 + 1.5 * (q3 - q1);
        assert!((threshold - 17.295).abs() < 1e-12);
        assert_eq!(format!("{threshold:.1}"), "17.3");
    }

    #[test]
    fn tukey_flags_strictly_above() {
        let (threshold, outliers) = tukey_fence(&[1.0, 2.0, 3.0, 100.0]).unwrap();
        // q1 = 1.75, q3 = 27.25, iqr = 25.5 -> fence 65.5
        assert!((threshold - 65.5).abs() < 1e-12);
        assert_eq!(outliers, vec![3]);

        let (threshold, outliers) = tukey_fence(&[4.0, 4.0, 4.0]).unwrap();
        assert_eq!(threshold, 4.0);
        assert!(outliers.is_empty());
    }

    #[test]
    fn quantile_edge_cases() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 8.0);
        assert_eq!(quantile_sorted(&xs, 0.5), 3.0);
        assert_eq!(quantile_sorted(&[5.0], 0.73), 5.0);
    }
}

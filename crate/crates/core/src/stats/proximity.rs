//! Proximity audit of the train/test split.
//!
//! The reference distribution is each training point's Euclidean distance
//! to its nearest training neighbor. A test point whose nearest-train
//! distance falls below the low quantile of that distribution is flagged as
//! a potential p-hacking point (statistically too close to training data);
//! one beyond the high quantile is flagged as isolated (poor
//! generalization expected). Features are assumed pre-scaled with the
//! train-fit MinMax scaler.

use serde::{Deserialize, Serialize};

use super::quantile_sorted;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProximityReport {
    /// Test-point indices statistically too close to the training set.
    pub p_hacking_indices: Vec<usize>,
    /// Test-point indices statistically too far from the training set.
    pub isolated_indices: Vec<usize>,
    /// Nearest-train distance of every test point.
    pub nearest_train_distance: Vec<f64>,
    /// Low quantile of the training nearest-neighbor distances.
    pub threshold_close: f64,
    /// High quantile of the training nearest-neighbor distances.
    pub threshold_far: f64,
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Flag test points that sit too close to or too far from the training
/// set. `alpha_close` controls the low threshold (default 0.01); the high
/// threshold is the (1 - alpha_far) quantile (default 0.99).
pub fn proximity_audit(
    train: &[Vec<f64>],
    test: &[Vec<f64>],
    alpha_close: f64,
    alpha_far: f64,
) -> Result<ProximityReport> {
    if train.len() < 2 {
        return Err(Error::invalid("proximity audit needs at least 2 training points"));
    }
    let width = train[0].len();
    for row in train.iter().chain(test.iter()) {
        if row.len() != width {
            return Err(Error::shape("inconsistent feature width in proximity audit"));
        }
    }
    if !(0.0..=0.5).contains(&alpha_close) || !(0.0..=0.5).contains(&alpha_far) {
        return Err(Error::invalid("alpha_close and alpha_far must be in [0, 0.5]"));
    }

    // reference: nearest-neighbor distance within the training set
    let mut reference: Vec<f64> = Vec::with_capacity(train.len());
    for (i, a) in train.iter().enumerate() {
        let mut best = f64::INFINITY;
        for (j, b) in train.iter().enumerate() {
            if i != j {
                best = best.min(euclidean(a, b));
            }
        }
        reference.push(best);
    }
    reference.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let threshold_close = quantile_sorted(&reference, alpha_close);
    let threshold_far = quantile_sorted(&reference, 1.0 - alpha_far);

    let mut p_hacking_indices = Vec::new();
    let mut isolated_indices = Vec::new();
    let mut nearest = Vec::with_capacity(test.len());
    for (idx, point) in test.iter().enumerate() {
        let mut best = f64::INFINITY;
        for t in train {
            best = best.min(euclidean(point, t));
        }
        nearest.push(best);
        if best < threshold_close {
            p_hacking_indices.push(idx);
        } else if best > threshold_far {
            isolated_indices.push(idx);
        }
    }
    Ok(ProximityReport {
        p_hacking_indices,
        isolated_indices,
        nearest_train_distance: nearest,
        threshold_close,
        threshold_far,
    })
}

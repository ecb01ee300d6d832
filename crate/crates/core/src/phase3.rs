//! Life computation: linear damage accumulation, failure at total damage 1.

use serde::{Deserialize, Serialize};

use crate::domain::SampleKey;
use crate::error::{Error, Result};

/// Final output of the pipeline for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifePrediction {
    pub key: SampleKey,
    pub n_flights: f64,
    pub d_gag: f64,
    pub d_gm: f64,
    pub life_n: f64,
}

/// Total damage after n flights: d_bar * n.
pub fn accumulate_damage(d_bar: f64, n_flights: f64) -> Result<f64> {
    if !(d_bar > 0.0) {
        return Err(Error::invalid(format!("per-flight damage must be > 0, got {d_bar}")));
    }
    if !(n_flights >= 1.0) {
        return Err(Error::invalid(format!("n_flights must be >= 1, got {n_flights}")));
    }
    Ok(d_bar * n_flights)
}

/// Flights to failure: life = n / (d_gag + d_gm).
pub fn miner_life(n_flights: f64, d_gag: f64, d_gm: f64) -> Result<f64> {
    let total = d_gag + d_gm;
    if !(total > 0.0) {
        return Err(Error::numeric(format!(
            "total damage must be > 0 to define a finite life, got {total}"
        )));
    }
    Ok(n_flights / total)
}

//! File formats and run configuration.
//!
//! Datasets are CSV with a header row, '.' decimal separator, UTF-8 and LF
//! line endings; floats carry 17 significant digits so parsing them back
//! reproduces the exact f64 bits. Models and reports are JSON.

pub mod dataset;
pub mod model;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::TrainConfig;
use crate::oracle::OracleConfig;
use crate::phase1::flight_train_config;
use crate::phase2::damage_train_config;
use crate::rng::derive_seed;

/// Format a float with 17 significant digits (exact f64 round trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::data(format!("cannot parse '{s}' as a float")))
}

fn default_split_seed() -> u64 {
    7
}

fn default_flight_train() -> TrainConfig {
    flight_train_config(100)
}

fn default_gag_train() -> TrainConfig {
    damage_train_config(200)
}

fn default_gm_train() -> TrainConfig {
    damage_train_config(300)
}

fn default_region() -> (f64, f64) {
    (1e3, 1e6)
}

fn default_resamples() -> usize {
    10_000
}

fn default_bootstrap_seed() -> u64 {
    500
}

fn default_alpha() -> f64 {
    0.01
}

/// Partial override of one training section; unset keys keep the
/// per-phase defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
struct TrainPatch {
    lr0: Option<f64>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    scheduler_gamma: Option<f64>,
    scheduler_step: Option<usize>,
    seed: Option<u64>,
}

impl TrainPatch {
    fn apply(&self, mut base: TrainConfig) -> TrainConfig {
        if let Some(v) = self.lr0 {
            base.lr0 = v;
        }
        if let Some(v) = self.epochs {
            base.epochs = v;
        }
        if let Some(v) = self.batch_size {
            base.batch_size = v;
        }
        if let Some(v) = self.scheduler_gamma {
            base.scheduler_gamma = v;
        }
        if let Some(v) = self.scheduler_step {
            base.scheduler_step = v;
        }
        if let Some(v) = self.seed {
            base.seed = v;
        }
        base
    }
}

/// On-disk shape of the config file: the training sections are patches
/// over the per-phase defaults.
#[derive(Deserialize)]
#[serde(default)]
struct RunConfigFile {
    oracle: OracleConfig,
    split_seed: u64,
    flight_train: TrainPatch,
    gag_train: TrainPatch,
    gm_train: TrainPatch,
    region_of_interest: (f64, f64),
    bootstrap_resamples: usize,
    bootstrap_seed: u64,
    proximity_alpha_close: f64,
    proximity_alpha_far: f64,
}

impl Default for RunConfigFile {
    fn default() -> Self {
        RunConfigFile {
            oracle: OracleConfig::default(),
            split_seed: default_split_seed(),
            flight_train: TrainPatch::default(),
            gag_train: TrainPatch::default(),
            gm_train: TrainPatch::default(),
            region_of_interest: default_region(),
            bootstrap_resamples: default_resamples(),
            bootstrap_seed: default_bootstrap_seed(),
            proximity_alpha_close: default_alpha(),
            proximity_alpha_far: default_alpha(),
        }
    }
}

impl From<RunConfigFile> for RunConfig {
    fn from(file: RunConfigFile) -> Self {
        RunConfig {
            oracle: file.oracle,
            split_seed: file.split_seed,
            flight_train: file.flight_train.apply(default_flight_train()),
            gag_train: file.gag_train.apply(default_gag_train()),
            gm_train: file.gm_train.apply(default_gm_train()),
            region_of_interest: file.region_of_interest,
            bootstrap_resamples: file.bootstrap_resamples,
            bootstrap_seed: file.bootstrap_seed,
            proximity_alpha_close: file.proximity_alpha_close,
            proximity_alpha_far: file.proximity_alpha_far,
        }
    }
}

/// Top-level run configuration. Every field has a default, so an empty (or
/// absent) config file is valid; individual keys override selectively.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RunConfigFile")]
pub struct RunConfig {
    pub oracle: OracleConfig,
    pub split_seed: u64,
    pub flight_train: TrainConfig,
    pub gag_train: TrainConfig,
    pub gm_train: TrainConfig,
    /// Fatigue-life band (flights) where accuracy is safety-relevant.
    pub region_of_interest: (f64, f64),
    pub bootstrap_resamples: usize,
    pub bootstrap_seed: u64,
    pub proximity_alpha_close: f64,
    pub proximity_alpha_far: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            oracle: OracleConfig::default(),
            split_seed: default_split_seed(),
            flight_train: default_flight_train(),
            gag_train: default_gag_train(),
            gm_train: default_gm_train(),
            region_of_interest: default_region(),
            bootstrap_resamples: default_resamples(),
            bootstrap_seed: default_bootstrap_seed(),
            proximity_alpha_close: default_alpha(),
            proximity_alpha_far: default_alpha(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Re-derive every component seed from one master seed.
    pub fn with_global_seed(mut self, seed: u64) -> Self {
        self.oracle.seed = seed;
        self.split_seed = derive_seed(seed, 1);
        self.flight_train.seed = derive_seed(seed, 2);
        self.gag_train.seed = derive_seed(seed, 3);
        self.gm_train.seed = derive_seed(seed, 4);
        self.bootstrap_seed = derive_seed(seed, 5);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.oracle.validate()?;
        self.flight_train.validate()?;
        self.gag_train.validate()?;
        self.gm_train.validate()?;
        if !(self.region_of_interest.0 > 0.0
            && self.region_of_interest.1 > self.region_of_interest.0)
        {
            return Err(Error::Config(format!(
                "region_of_interest must be an increasing positive pair, got {:?}",
                self.region_of_interest
            )));
        }
        if self.bootstrap_resamples < 1_000 {
            return Err(Error::Config("bootstrap_resamples must be >= 1000".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_toml_is_all_defaults() {
        let config = RunConfig::from_toml_str("").unwrap();
        assert_eq!(config, RunConfig::default());
        config.validate().unwrap();
        assert_eq!(config.oracle.n_pse, 38);
        assert_eq!(config.flight_train.epochs, 1000);
        assert_eq!(config.flight_train.batch_size, 256);
        assert_eq!(config.gag_train.epochs, 5000);
        assert_eq!(config.gag_train.batch_size, 128);
        assert_eq!(config.region_of_interest, (1e3, 1e6));
    }

    #[test]
    fn keys_override_selectively() {
        let config = RunConfig::from_toml_str(
            "[oracle]\nseed = 99\nn_missions = 5\n\n[flight_train]\nepochs = 10\n",
        )
        .unwrap();
        assert_eq!(config.oracle.seed, 99);
        assert_eq!(config.oracle.n_missions, 5);
        assert_eq!(config.oracle.n_pse, 38); // untouched default
        assert_eq!(config.flight_train.epochs, 10);
        assert_eq!(config.flight_train.batch_size, 256);
    }

    #[test]
    fn malformed_toml_is_a_config_error() {
        let err = RunConfig::from_toml_str("oracle = {").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn global_seed_rederives_component_seeds() {
        let a = RunConfig::default().with_global_seed(42);
        let b = RunConfig::default().with_global_seed(42);
        assert_eq!(a, b);
        assert_eq!(a.oracle.seed, 42);
        let c = RunConfig::default().with_global_seed(43);
        assert_ne!(a.split_seed, c.split_seed);
        assert_ne!(a.flight_train.seed, a.gag_train.seed);
    }

    #[test]
    fn f64_formatting_round_trips_exactly() {
        for &x in &[0.1, -3.7e-12, 12345.6789, 1.0 / 3.0, 2.56e7, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(parse_f64(&s).unwrap().to_bits(), x.to_bits(), "{s}");
        }
    }
}

//! Per-flight damage prediction from time-averaged stresses.
//!
//! Phase-I stress predictions are averaged over the mission (time-weighted)
//! and fed, together with kt, the phase durations and the flight count, to
//! two MLPs: one for the ground-air-ground damage, one for gust/maneuver
//! damage. Targets are log10-transformed before MinMax scaling; model
//! output is mapped back through the inverse chain, so predictions are
//! strictly positive.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::domain::{time_weighted_average, MinMaxScaler, Mission, Phase, StressVector};
use crate::error::{Error, Result};
use crate::nn::{self, Activation, ForwardMode, LearningCurves, Loss, Mlp, MlpSpec, TrainConfig};

/// Inputs of the ground-air-ground damage model, 9 numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GagFeatures {
    pub kt: f64,
    /// Time-weighted averages over flight segments:
    /// (one_g, d_vman, d_vgust, d_turn).
    pub s_flight_bar: [f64; 4],
    /// Time-weighted average one_g over ground segments.
    pub s_ground_bar: f64,
    pub t_flight: f64,
    pub t_ground: f64,
    pub n_flights: f64,
}

impl GagFeatures {
    pub const NAMES: [&'static str; 9] = [
        "kt",
        "one_g_flight_bar",
        "d_vman_bar",
        "d_vgust_bar",
        "d_turn_bar",
        "one_g_ground_bar",
        "t_flight",
        "t_ground",
        "n_flights",
    ];

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.kt,
            self.s_flight_bar[0],
            self.s_flight_bar[1],
            self.s_flight_bar[2],
            self.s_flight_bar[3],
            self.s_ground_bar,
            self.t_flight,
            self.t_ground,
            self.n_flights,
        ]
    }
}

/// Inputs of the gust/maneuver damage model, 7 numbers (no ground terms).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GmFeatures {
    pub kt: f64,
    pub s_flight_bar: [f64; 4],
    pub t_flight: f64,
    pub n_flights: f64,
}

impl GmFeatures {
    pub const NAMES: [&'static str; 7] = [
        "kt",
        "one_g_flight_bar",
        "d_vman_bar",
        "d_vgust_bar",
        "d_turn_bar",
        "t_flight",
        "n_flights",
    ];

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.kt,
            self.s_flight_bar[0],
            self.s_flight_bar[1],
            self.s_flight_bar[2],
            self.s_flight_bar[3],
            self.t_flight,
            self.n_flights,
        ]
    }
}

/// Time-weighted averaging of per-segment stresses into damage-model
/// features. `stresses` must hold one prediction per mission segment, in
/// segment order.
pub fn build_damage_features(
    mission: &Mission,
    stresses: &[StressVector],
    kt: f64,
) -> Result<(GagFeatures, GmFeatures)> {
    if stresses.len() != mission.segments.len() {
        return Err(Error::invalid(format!(
            "mission {} has {} segments but {} stress predictions were supplied",
            mission.id,
            mission.segments.len(),
            stresses.len()
        )));
    }
    let mut flight_t = Vec::new();
    let mut flight_s: [Vec<f64>; 4] = Default::default();
    let mut ground_t = Vec::new();
    let mut ground_one_g = Vec::new();
    for (seg, s) in mission.segments.iter().zip(stresses) {
        match seg.phase() {
            Phase::Flight => {
                flight_t.push(seg.params.time);
                for (k, v) in s.to_array().into_iter().enumerate() {
                    flight_s[k].push(v);
                }
            }
            Phase::Ground => {
                ground_t.push(seg.params.time);
                ground_one_g.push(s.one_g);
            }
        }
    }
    let mut s_flight_bar = [0.0; 4];
    for k in 0..4 {
        s_flight_bar[k] = time_weighted_average(&flight_s[k], &flight_t)?;
    }
    let s_ground_bar = time_weighted_average(&ground_one_g, &ground_t)?;
    let t_flight: f64 = flight_t.iter().sum();
    let t_ground: f64 = ground_t.iter().sum();
    let n_flights = mission.n_flights as f64;

    Ok((
        GagFeatures {
            kt,
            s_flight_bar,
            s_ground_bar,
            t_flight,
            t_ground,
            n_flights,
        },
        GmFeatures {
            kt,
            s_flight_bar,
            t_flight,
            n_flights,
        },
    ))
}

/// Which damage source a model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DamageKind {
    Gag,
    Gm,
}

/// One damage MLP with its scalers. Targets are log10-transformed, then
/// MinMax-scaled; `predict` applies the inverse chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DamageModel {
    pub kind: DamageKind,
    pub mlp: Mlp,
    pub input_scaler: MinMaxScaler,
    /// Scaler over log10(per-flight damage).
    pub output_scaler: MinMaxScaler,
}

/// One training sample for the damage models: features plus the true
/// per-flight damages.
#[derive(Debug, Clone, PartialEq)]
pub struct DamageSample {
    pub gag: GagFeatures,
    pub gm: GmFeatures,
    /// Per-flight ground-air-ground damage, > 0.
    pub d_gag_bar: f64,
    /// Per-flight gust/maneuver damage, > 0.
    pub d_gm_bar: f64,
}

/// Cited training setup for both damage MLPs (64/64, MAE, Adam, lr 8e-3
/// with 0.975/30 decay, 5000 epochs, batches of 128).
pub fn damage_train_config(seed: u64) -> TrainConfig {
    TrainConfig {
        lr0: 8e-3,
        epochs: 5000,
        batch_size: 128,
        scheduler_gamma: 0.975,
        scheduler_step: 30,
        seed,
        loss: Loss::Mae,
    }
}

fn damage_spec(kind: DamageKind, input_dim: usize) -> MlpSpec {
    // GAG: tanh, no dropout; G&M: ReLU with a whiff of dropout
    match kind {
        DamageKind::Gag => MlpSpec {
            input_dim,
            hidden: vec![64, 64],
            output_dim: 1,
            activation: Activation::Tanh,
            dropout_rate: 0.0,
        },
        DamageKind::Gm => MlpSpec {
            input_dim,
            hidden: vec![64, 64],
            output_dim: 1,
            activation: Activation::Relu,
            dropout_rate: 0.001,
        },
    }
}

fn to_matrix(rows: Vec<Vec<f64>>) -> Array2<f64> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut m = Array2::zeros((rows.len(), ncols));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            m[[i, j]] = v;
        }
    }
    m
}

fn log_target(d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::invalid(format!(
            "damage targets must be > 0 for the log transform, got {d}"
        )));
    }
    Ok(d.log10())
}

fn fit_one(
    kind: DamageKind,
    train: &[(Vec<f64>, f64)],
    val: &[(Vec<f64>, f64)],
    config: &TrainConfig,
) -> Result<(DamageModel, LearningCurves)> {
    if train.is_empty() {
        return Err(Error::invalid("no damage samples to fit"));
    }
    let raw_x: Vec<Vec<f64>> = train.iter().map(|(x, _)| x.clone()).collect();
    let raw_y: Result<Vec<Vec<f64>>> = train.iter().map(|&(_, d)| Ok(vec![log_target(d)?])).collect();
    let raw_y = raw_y?;
    let input_scaler = MinMaxScaler::fit(&raw_x)?;
    let output_scaler = MinMaxScaler::fit(&raw_y)?;

    let scale = |rows: &[(Vec<f64>, f64)]| -> Result<(Array2<f64>, Array2<f64>)> {
        let mut xs = Vec::with_capacity(rows.len());
        let mut ys = Vec::with_capacity(rows.len());
        for (x, d) in rows {
            xs.push(input_scaler.transform(x)?);
            ys.push(output_scaler.transform(&[log_target(*d)?])?);
        }
        Ok((to_matrix(xs), to_matrix(ys)))
    };
    let (train_x, train_y) = scale(train)?;
    let (val_x, val_y) = scale(val)?;

    let input_dim = train_x.ncols();
    let mlp = Mlp::init(damage_spec(kind, input_dim), config.seed)?;
    let (mlp, curves) = nn::train(mlp, (&train_x, &train_y), (&val_x, &val_y), config)?;
    Ok((
        DamageModel {
            kind,
            mlp,
            input_scaler,
            output_scaler,
        },
        curves,
    ))
}

/// Fit both damage models on the same sample set.
pub fn fit_damage_models(
    train: &[DamageSample],
    val: &[DamageSample],
    gag_config: &TrainConfig,
    gm_config: &TrainConfig,
) -> Result<((DamageModel, LearningCurves), (DamageModel, LearningCurves))> {
    let gag_train: Vec<(Vec<f64>, f64)> =
        train.iter().map(|s| (s.gag.to_vec(), s.d_gag_bar)).collect();
    let gag_val: Vec<(Vec<f64>, f64)> = val.iter().map(|s| (s.gag.to_vec(), s.d_gag_bar)).collect();
    let gm_train: Vec<(Vec<f64>, f64)> = train.iter().map(|s| (s.gm.to_vec(), s.d_gm_bar)).collect();
    let gm_val: Vec<(Vec<f64>, f64)> = val.iter().map(|s| (s.gm.to_vec(), s.d_gm_bar)).collect();

    let gag = fit_one(DamageKind::Gag, &gag_train, &gag_val, gag_config)?;
    let gm = fit_one(DamageKind::Gm, &gm_train, &gm_val, gm_config)?;
    Ok((gag, gm))
}

impl DamageModel {
    /// Predict a per-flight damage from a raw feature vector.
    pub fn predict(&self, features: &[f64]) -> Result<f64> {
        let x = to_matrix(vec![self.input_scaler.transform(features)?]);
        let out = self.mlp.forward(&x, ForwardMode::Eval)?;
        let log10_d = self.output_scaler.inverse(&[out[[0, 0]]])?[0];
        Ok(10f64.powf(log10_d))
    }
}

/// Predict both per-flight damages for one sample.
pub fn predict_per_flight_damage(
    gag_model: &DamageModel,
    gm_model: &DamageModel,
    gag_features: &GagFeatures,
    gm_features: &GmFeatures,
) -> Result<(f64, f64)> {
    Ok((
        gag_model.predict(&gag_features.to_vec())?,
        gm_model.predict(&gm_features.to_vec())?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{FlightParams, Segment, SegmentClass};

    fn segment(class: SegmentClass, time: f64) -> Segment {
        let mut params = FlightParams::from_array([0.0; 12]);
        params.time = time;
        Segment { class, params }
    }

    fn stress(one_g: f64, d: f64) -> StressVector {
        StressVector {
            one_g,
            d_vman: d,
            d_vgust: d / 2.0,
            d_turn: d / 4.0,
        }
    }

    #[test]
    fn single_flight_segment_average_is_identity() {
        let mission = Mission {
            id: "T".into(),
            segments: vec![
                segment(SegmentClass::Taxi, 600.0),
                segment(SegmentClass::Cruise, 3_000.0),
            ],
            n_flights: 1_000,
        };
        let stresses = vec![stress(10.0, 0.0), stress(80.0, 40.0)];
        let (gag, gm) = build_damage_features(&mission, &stresses, 2.0).unwrap();
        assert_eq!(gag.s_flight_bar, [80.0, 40.0, 20.0, 10.0]);
        assert_eq!(gag.s_ground_bar, 10.0);
        assert_eq!(gag.t_flight, 3_000.0);
        assert_eq!(gag.t_ground, 600.0);
        assert_eq!(gag.n_flights, 1_000.0);
        assert_eq!(gm.to_vec(), vec![2.0, 80.0, 40.0, 20.0, 10.0, 3_000.0, 1_000.0]);
    }

    #[test]
    fn equal_durations_average_to_plain_mean() {
        let mission = Mission {
            id: "T".into(),
            segments: vec![
                segment(SegmentClass::Taxi, 600.0),
                segment(SegmentClass::Climb, 1_000.0),
                segment(SegmentClass::Descent, 1_000.0),
            ],
            n_flights: 900,
        };
        let stresses = vec![stress(12.0, 0.0), stress(60.0, 30.0), stress(40.0, 10.0)];
        let (gag, _) = build_damage_features(&mission, &stresses, 1.5).unwrap();
        assert_eq!(gag.s_flight_bar[0], 50.0);
        assert_eq!(gag.s_flight_bar[1], 20.0);
    }

    #[test]
    fn hand_computed_weighted_average() {
        let mission = Mission {
            id: "T".into(),
            segments: vec![
                segment(SegmentClass::Taxi, 600.0),
                segment(SegmentClass::Climb, 100.0),
                segment(SegmentClass::Cruise, 300.0),
            ],
            n_flights: 10,
        };
        let stresses = vec![stress(10.0, 0.0), stress(10.0, 4.0), stress(20.0, 8.0)];
        let (gag, _) = build_damage_features(&mission, &stresses, 2.0).unwrap();
        // (10*100 + 20*300) / 400 = 17.5
        assert!((gag.s_flight_bar[0] - 17.5).abs() < 1e-12);

        // missing a prediction is an error
        assert!(build_damage_features(&mission, &stresses[..2], 2.0).is_err());
    }

    fn synthetic_damage_samples(n: usize) -> Vec<DamageSample> {
        // smooth positive function of the features, wide dynamic range
        (0..n)
            .map(|i| {
                let f = i as f64 / n as f64;
                let kt = 1.5 + 1.5 * f;
                let s = [50.0 + 40.0 * f, 20.0 + 10.0 * f, 15.0, 8.0];
                let gag = GagFeatures {
                    kt,
                    s_flight_bar: s,
                    s_ground_bar: 10.0 + 5.0 * f,
                    t_flight: 4_000.0 + 2_000.0 * f,
                    t_ground: 900.0,
                    n_flights: 1_000.0 + 9_000.0 * f,
                };
                let gm = GmFeatures {
                    kt,
                    s_flight_bar: s,
                    t_flight: gag.t_flight,
                    n_flights: gag.n_flights,
                };
                let d_gag_bar = 1e-8 * (kt * s[0] / 50.0).powi(4);
                let d_gm_bar = 3e-9 * (kt * s[1] / 20.0).powi(4);
                DamageSample {
                    gag,
                    gm,
                    d_gag_bar,
                    d_gm_bar,
                }
            })
            .collect()
    }

    #[test]
    fn damage_models_learn_reproducibly_and_invert_the_transform() {
        let samples = synthetic_damage_samples(120);
        // interleaved split keeps validation inside the training range
        let (train, val): (Vec<_>, Vec<_>) = samples
            .into_iter()
            .enumerate()
            .partition(|(i, _)| i % 5 != 2);
        let train: Vec<DamageSample> = train.into_iter().map(|(_, s)| s).collect();
        let val: Vec<DamageSample> = val.into_iter().map(|(_, s)| s).collect();
        let (train, val) = (train.as_slice(), val.as_slice());
        let config = TrainConfig {
            epochs: 400,
            ..damage_train_config(3)
        };
        let ((gag, gag_curves), (gm, _)) =
            fit_damage_models(train, val, &config, &config).unwrap();
        let ((gag2, gag_curves2), _) = fit_damage_models(train, val, &config, &config).unwrap();
        assert_eq!(gag, gag2);
        assert_eq!(gag_curves, gag_curves2);

        // output positivity for arbitrary inputs
        let probe = val[0].gag.to_vec();
        assert!(gag.predict(&probe).unwrap() > 0.0);
        let probe_gm = val[0].gm.to_vec();
        assert!(gm.predict(&probe_gm).unwrap() > 0.0);

        // median relative error on held-out data
        let mut errs: Vec<f64> = val
            .iter()
            .map(|s| {
                let p = gag.predict(&s.gag.to_vec()).unwrap();
                (p - s.d_gag_bar).abs() / s.d_gag_bar
            })
            .collect();
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = errs[errs.len() / 2];
        assert!(median < 0.10, "median relative error {median}");
    }

    #[test]
    fn inverse_transform_round_trips_training_targets() {
        // the scaler chain itself (log10 -> minmax -> inverse -> 10^x) must
        // reproduce targets without the MLP in the loop
        let targets = [1e-9f64, 3e-7, 2e-5, 1e-4];
        let logs: Vec<Vec<f64>> = targets.iter().map(|d| vec![d.log10()]).collect();
        let scaler = MinMaxScaler::fit(&logs).unwrap();
        for &d in &targets {
            let fwd = scaler.transform(&[d.log10()]).unwrap();
            let back = 10f64.powf(scaler.inverse(&fwd).unwrap()[0]);
            assert!((back - d).abs() / d < 1e-9);
        }
    }

    #[test]
    fn nonpositive_targets_are_rejected() {
        let mut samples = synthetic_damage_samples(10);
        samples[3].d_gag_bar = 0.0;
        let config = TrainConfig {
            epochs: 1,
            ..damage_train_config(0)
        };
        let (train, val) = samples.split_at(8);
        assert!(fit_damage_models(train, val, &config, &config).is_err());
    }
}

//! Stress prediction per PSE and mission segment.
//!
//! Ground segments are static-load dominated: for each PSE a quadratic
//! polynomial in fuel weight fits the equilibrium stress essentially
//! exactly. Flight segments see aerodynamic loading, so a single shared MLP
//! maps [PSE bits, flaps, altitude, TAS, mass, FW, thrust] to the full
//! four-component stress vector.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::domain::{binary_encode_pse, FlightParams, MinMaxScaler, StressVector, PSE_BITS};
use crate::error::{Error, Result};
use crate::nn::{self, Activation, ForwardMode, LearningCurves, Loss, Mlp, MlpSpec, TrainConfig};

/// Flight-model input width: 6 PSE bits + 6 selected flight parameters.
pub const FLIGHT_INPUT_DIM: usize = PSE_BITS + 6;

/// One labeled flight-segment sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FlightSample {
    pub pse: u8,
    pub params: FlightParams,
    pub stress: StressVector,
}

/// One labeled ground-segment sample: (pse, fuel weight, equilibrium stress).
pub type GroundSample = (u8, f64, f64);

/// Per-PSE quadratic fit one_g = b0 + b1*fw + b2*fw^2.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GroundPolyModel {
    /// PSE -> (b0, b1, b2). Sparse: only PSEs seen in training are present.
    pub coeffs: BTreeMap<u8, [f64; 3]>,
}

/// Solve a small linear system by Gaussian elimination with partial
/// pivoting. Only used for the 3x3 normal equations.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::numeric("rank-deficient normal equations"));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Ok(x)
}

/// Ordinary least squares of one_g on [1, fw, fw^2], one fit per PSE.
///
/// The design is mean-centered and scaled before forming the normal
/// equations (fw is O(10^3) kg, fw^2 O(10^7), which would otherwise wreck
/// the conditioning) and the coefficients are mapped back to raw fw. Each
/// PSE needs at least 3 distinct fuel weights.
pub fn fit_ground_model(samples: &[GroundSample]) -> Result<GroundPolyModel> {
    if samples.is_empty() {
        return Err(Error::invalid("no ground samples to fit"));
    }
    let mut by_pse: BTreeMap<u8, Vec<(f64, f64)>> = BTreeMap::new();
    for &(pse, fw, one_g) in samples {
        by_pse.entry(pse).or_default().push((fw, one_g));
    }

    let mut coeffs = BTreeMap::new();
    for (pse, rows) in by_pse {
        let mut distinct: Vec<f64> = rows.iter().map(|r| r.0).collect();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        if distinct.len() < 3 {
            return Err(Error::numeric(format!(
                "PSE {pse} has only {} distinct fuel weights; need >= 3 for a quadratic fit",
                distinct.len()
            )));
        }

        let n = rows.len() as f64;
        let mean = rows.iter().map(|r| r.0).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r.0 - mean).powi(2)).sum::<f64>() / n;
        let scale = var.sqrt().max(1e-12);

        // normal equations in z = (fw - mean) / scale
        let mut ata = vec![vec![0.0; 3]; 3];
        let mut aty = vec![0.0; 3];
        for &(fw, y) in &rows {
            let z = (fw - mean) / scale;
            let phi = [1.0, z, z * z];
            for i in 0..3 {
                for j in 0..3 {
                    ata[i][j] += phi[i] * phi[j];
                }
                aty[i] += phi[i] * y;
            }
        }
        let g = solve_linear(ata, aty)
            .map_err(|_| Error::numeric(format!("rank-deficient ground fit for PSE {pse}")))?;

        // map back: p(z) with z = (x - m)/s  ->  b0 + b1 x + b2 x^2
        let (m, s) = (mean, scale);
        let b2 = g[2] / (s * s);
        let b1 = g[1] / s - 2.0 * g[2] * m / (s * s);
        let b0 = g[0] - g[1] * m / s + g[2] * m * m / (s * s);
        coeffs.insert(pse, [b0, b1, b2]);
    }
    Ok(GroundPolyModel { coeffs })
}

impl GroundPolyModel {
    /// Predicted ground equilibrium stress; the stress increments of ground
    /// segments are zero by definition.
    pub fn predict(&self, pse: u8, fw: f64) -> Result<f64> {
        let c = self
            .coeffs
            .get(&pse)
            .ok_or_else(|| Error::invalid(format!("PSE {pse} was not in the ground training data")))?;
        Ok(c[0] + c[1] * fw + c[2] * fw * fw)
    }

    pub fn predict_stress(&self, pse: u8, fw: f64) -> Result<StressVector> {
        Ok(StressVector {
            one_g: self.predict(pse, fw)?,
            d_vman: 0.0,
            d_vgust: 0.0,
            d_turn: 0.0,
        })
    }
}

/// The shared flight-segment MLP with its train-fit input/output scalers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlightStressModel {
    pub mlp: Mlp,
    pub input_scaler: MinMaxScaler,
    pub output_scaler: MinMaxScaler,
}

/// Cited training setup for the flight stress MLP (50/50 ReLU, MAE, Adam,
/// lr 8e-3 with 0.975/30 step decay, 1000 epochs, batches of 256).
pub fn flight_train_config(seed: u64) -> TrainConfig {
    TrainConfig {
        lr0: 8e-3,
        epochs: 1000,
        batch_size: 256,
        scheduler_gamma: 0.975,
        scheduler_step: 30,
        seed,
        loss: Loss::Mae,
    }
}

fn flight_spec() -> MlpSpec {
    MlpSpec {
        input_dim: FLIGHT_INPUT_DIM,
        hidden: vec![50, 50],
        output_dim: 4,
        activation: Activation::Relu,
        dropout_rate: 0.0,
    }
}

/// Fixed feature order: PSE bits, then flaps, altitude, TAS, mass, FW,
/// thrust.
pub fn flight_features(pse: u8, params: &FlightParams) -> Result<Vec<f64>> {
    let bits = binary_encode_pse(pse)?;
    let mut row = Vec::with_capacity(FLIGHT_INPUT_DIM);
    row.extend(bits.iter().map(|&b| b as f64));
    row.extend([
        params.flaps,
        params.altitude,
        params.tas,
        params.mass,
        params.fw,
        params.thrust,
    ]);
    Ok(row)
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

fn scaled_dataset(
    samples: &[FlightSample],
    input_scaler: &MinMaxScaler,
    output_scaler: &MinMaxScaler,
) -> Result<(Array2<f64>, Array2<f64>)> {
    let mut x = Vec::with_capacity(samples.len());
    let mut y = Vec::with_capacity(samples.len());
    for s in samples {
        x.push(input_scaler.transform(&flight_features(s.pse, &s.params)?)?);
        y.push(output_scaler.transform(&s.stress.to_array())?);
    }
    Ok((to_matrix(x), to_matrix(y)))
}

/// Train the shared flight stress MLP. Scalers are fit on the training
/// split only and reused for validation (and later test) data.
pub fn fit_flight_model(
    train: &[FlightSample],
    val: &[FlightSample],
    config: &TrainConfig,
) -> Result<(FlightStressModel, LearningCurves)> {
    if train.is_empty() {
        return Err(Error::invalid("no flight samples to fit"));
    }
    let raw_x: Result<Vec<Vec<f64>>> = train
        .iter()
        .map(|s| flight_features(s.pse, &s.params))
        .collect();
    let raw_y: Vec<Vec<f64>> = train.iter().map(|s| s.stress.to_array().to_vec()).collect();
    let input_scaler = MinMaxScaler::fit(&raw_x?)?;
    let output_scaler = MinMaxScaler::fit(&raw_y)?;

    let (train_x, train_y) = scaled_dataset(train, &input_scaler, &output_scaler)?;
    let (val_x, val_y) = scaled_dataset(val, &input_scaler, &output_scaler)?;

    let mlp = Mlp::init(flight_spec(), config.seed)?;
    let (mlp, curves) = nn::train(mlp, (&train_x, &train_y), (&val_x, &val_y), config)?;
    Ok((
        FlightStressModel {
            mlp,
            input_scaler,
            output_scaler,
        },
        curves,
    ))
}

impl FlightStressModel {
    /// Predict the stress vector of one flight segment, in MPa.
    pub fn predict(&self, pse: u8, params: &FlightParams) -> Result<StressVector> {
        let features = self.input_scaler.transform(&flight_features(pse, params)?)?;
        let x = to_matrix(vec![features]);
        let out = self.mlp.forward(&x, ForwardMode::Eval)?;
        let scaled: Vec<f64> = out.row(0).to_vec();
        let raw = self.output_scaler.inverse(&scaled)?;
        Ok(StressVector::from_array([raw[0], raw[1], raw[2], raw[3]]))
    }
}

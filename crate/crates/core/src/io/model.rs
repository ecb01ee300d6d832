//! Trained-pipeline persistence: model.json and curves.csv.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::fmt_f64;
use crate::error::{Error, Result};
use crate::nn::{LearningCurves, TrainConfig};
use crate::phase1::{FlightStressModel, GroundPolyModel};
use crate::phase2::DamageModel;
use crate::stats::SplitAssignment;

pub const MODEL_FILE: &str = "model.json";
pub const CURVES_FILE: &str = "curves.csv";

/// Everything needed to reproduce predictions: the split, the four fitted
/// models and the training configs they were fitted with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineModel {
    pub split: SplitAssignment,
    pub ground: GroundPolyModel,
    pub flight: FlightStressModel,
    pub gag: DamageModel,
    pub gm: DamageModel,
    pub flight_train: TrainConfig,
    pub gag_train: TrainConfig,
    pub gm_train: TrainConfig,
}

impl PipelineModel {
    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::data(format!("cannot read model {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Learning curves of the three MLPs, long format: one row per
/// (model, epoch).
pub fn write_curves(
    path: &Path,
    flight: &LearningCurves,
    gag: &LearningCurves,
    gm: &LearningCurves,
) -> Result<()> {
    let mut out = String::from("model,epoch,train_loss,val_loss\n");
    for (name, curves) in [("flight", flight), ("gag", gag), ("gm", gm)] {
        for (epoch, (t, v)) in curves.train.iter().zip(&curves.val).enumerate() {
            out.push_str(&format!("{name},{epoch},{},{}\n", fmt_f64(*t), fmt_f64(*v)));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::MinMaxScaler;
    use crate::nn::{Activation, Loss, Mlp, MlpSpec};
    use crate::phase2::DamageKind;
    use crate::stats::split_assign;

    fn tiny_model() -> PipelineModel {
        let spec = |i, o, act| MlpSpec {
            input_dim: i,
            hidden: vec![4],
            output_dim: o,
            activation: act,
            dropout_rate: 0.0,
        };
        let scaler = |w: usize| MinMaxScaler {
            mins: vec![0.0; w],
            maxs: vec![1.0; w],
        };
        let train = TrainConfig {
            lr0: 8e-3,
            epochs: 1,
            batch_size: 8,
            scheduler_gamma: 0.975,
            scheduler_step: 30,
            seed: 0,
            loss: Loss::Mae,
        };
        let mut ground = GroundPolyModel::default();
        ground.coeffs.insert(1, [1.0, 2.0, 3.0]);
        PipelineModel {
            split: split_assign(&[1, 2], &["A".into(), "B".into(), "C".into()], 0).unwrap(),
            ground,
            flight: FlightStressModel {
                mlp: Mlp::init(spec(12, 4, Activation::Relu), 1).unwrap(),
                input_scaler: scaler(12),
                output_scaler: scaler(4),
            },
            gag: DamageModel {
                kind: DamageKind::Gag,
                mlp: Mlp::init(spec(9, 1, Activation::Tanh), 2).unwrap(),
                input_scaler: scaler(9),
                output_scaler: scaler(1),
            },
            gm: DamageModel {
                kind: DamageKind::Gm,
                mlp: Mlp::init(spec(7, 1, Activation::Relu), 3).unwrap(),
                input_scaler: scaler(7),
                output_scaler: scaler(1),
            },
            flight_train: train.clone(),
            gag_train: train.clone(),
            gm_train: train,
        }
    }

    #[test]
    fn model_json_round_trips_bit_exactly() {
        let model = tiny_model();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(MODEL_FILE);
        model.save(&path).unwrap();
        let loaded = PipelineModel::load(&path).unwrap();
        assert_eq!(model, loaded);

        // a second save of the loaded model is byte-identical
        let path2 = dir.path().join("model2.json");
        loaded.save(&path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn curves_file_has_one_row_per_model_and_epoch() {
        let curves = LearningCurves {
            train: vec![1.0, 0.5, 0.25],
            val: vec![1.1, 0.6, 0.3],
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(CURVES_FILE);
        write_curves(&path, &curves, &curves, &curves).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 3 * 3);
        assert_eq!(lines[0], "model,epoch,train_loss,val_loss");
        assert!(lines[1].starts_with("flight,0,"));
        assert!(lines[9].starts_with("gm,2,"));
    }
}

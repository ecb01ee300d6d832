//! Mini-batch training loop with Adam updates.

use ndarray::{Array1, Array2, Axis};
use rand::seq::SliceRandom;

use super::{mae_loss, mae_loss_grad, lr_at_epoch, ForwardMode, LearningCurves, Mlp, TrainConfig};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const EPSILON: f64 = 1e-8;

/// Adam optimizer state, one (m, v) pair per parameter tensor.
struct Adam {
    weight_m: Vec<Array2<f64>>,
    weight_v: Vec<Array2<f64>>,
    bias_m: Vec<Array1<f64>>,
    bias_v: Vec<Array1<f64>>,
    t: i32,
}

impl Adam {
    fn new(mlp: &Mlp) -> Self {
        Adam {
            weight_m: mlp.weights().iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            weight_v: mlp.weights().iter().map(|w| Array2::zeros(w.raw_dim())).collect(),
            bias_m: mlp.biases().iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
            bias_v: mlp.biases().iter().map(|b| Array1::zeros(b.raw_dim())).collect(),
            t: 0,
        }
    }

    fn step(
        &mut self,
        mlp: &mut Mlp,
        weight_grads: &[Array2<f64>],
        bias_grads: &[Array1<f64>],
        lr: f64,
    ) {
        self.t += 1;
        let bc1 = 1.0 - BETA1.powi(self.t);
        let bc2 = 1.0 - BETA2.powi(self.t);
        let (weights, biases) = mlp.params_mut();
        for l in 0..weights.len() {
            update_tensor(
                weights[l].as_slice_mut().unwrap(),
                weight_grads[l].as_slice().unwrap(),
                self.weight_m[l].as_slice_mut().unwrap(),
                self.weight_v[l].as_slice_mut().unwrap(),
                lr,
                bc1,
                bc2,
            );
            update_tensor(
                biases[l].as_slice_mut().unwrap(),
                bias_grads[l].as_slice().unwrap(),
                self.bias_m[l].as_slice_mut().unwrap(),
                self.bias_v[l].as_slice_mut().unwrap(),
                lr,
                bc1,
                bc2,
            );
        }
    }
}

fn update_tensor(
    param: &mut [f64],
    grad: &[f64],
    m: &mut [f64],
    v: &mut [f64],
    lr: f64,
    bias_correction1: f64,
    bias_correction2: f64,
) {
    for i in 0..param.len() {
        m[i] = BETA1 * m[i] + (1.0 - BETA1) * grad[i];
        v[i] = BETA2 * v[i] + (1.0 - BETA2) * grad[i] * grad[i];
        let m_hat = m[i] / bias_correction1;
        let v_hat = v[i] / bias_correction2;
        param[i] -= lr * m_hat / (v_hat.sqrt() + EPSILON);
    }
}

/// Train `mlp` on `(train_x, train_y)`, recording train and validation MAE
/// once per epoch (validation loss is NaN when the validation set is empty).
///
/// Each epoch visits a fresh permutation of the training samples in
/// mini-batches of `config.batch_size`; the trailing short batch is kept.
/// Shuffling is deterministic per (seed, epoch) and dropout masks per
/// (seed, epoch, batch). The final-epoch weights are returned; no early
/// stopping is applied, the curves are there to audit over/underfitting.
pub fn train(
    mlp: Mlp,
    train_xy: (&Array2<f64>, &Array2<f64>),
    val_xy: (&Array2<f64>, &Array2<f64>),
    config: &TrainConfig,
) -> Result<(Mlp, LearningCurves)> {
    config.validate()?;
    let (train_x, train_y) = train_xy;
    let (val_x, val_y) = val_xy;
    let n = train_x.nrows();
    if n == 0 {
        return Err(Error::invalid("training set is empty"));
    }
    if train_y.nrows() != n {
        return Err(Error::shape(format!(
            "training targets have {} rows, inputs {}",
            train_y.nrows(),
            n
        )));
    }
    if val_x.nrows() != val_y.nrows() {
        return Err(Error::shape("validation inputs/targets row mismatch"));
    }

    let mut mlp = mlp;
    let mut adam = Adam::new(&mlp);
    let mut curves = LearningCurves::default();

    for epoch in 0..config.epochs {
        let lr = lr_at_epoch(config, epoch);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut stream_rng(config.seed, 2 * epoch as u64));
        let batch_seed_base = derive_seed(config.seed, 2 * epoch as u64 + 1);

        for (batch_idx, chunk) in order.chunks(config.batch_size).enumerate() {
            let xb = train_x.select(Axis(0), chunk);
            let yb = train_y.select(Axis(0), chunk);
            let mode = ForwardMode::Train {
                dropout_seed: derive_seed(batch_seed_base, batch_idx as u64),
            };
            let cache = mlp.forward_cached(&xb, mode)?;
            let out_grad = mae_loss_grad(&cache.output, &yb);
            let (wg, bg) = mlp.backward(&cache, &out_grad);
            adam.step(&mut mlp, &wg, &bg, lr);
        }

        let train_pred = mlp.forward(train_x, ForwardMode::Eval)?;
        curves.train.push(mae_loss(&train_pred, train_y)?);
        if val_x.nrows() > 0 {
            let val_pred = mlp.forward(val_x, ForwardMode::Eval)?;
            curves.val.push(mae_loss(&val_pred, val_y)?);
        } else {
            curves.val.push(f64::NAN);
        }
    }

    Ok((mlp, curves))
}

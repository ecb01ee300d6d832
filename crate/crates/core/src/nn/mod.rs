//! Minimal feed-forward network engine.
//!
//! Dense layers with ReLU or tanh hidden activations and a linear output
//! layer, trained with mean-absolute-error loss, Adam updates and a step
//! learning-rate schedule. Everything is f64 and deterministic: weight
//! initialization, mini-batch shuffling and dropout masks all derive from
//! the configured seed, so a fixed (spec, config, data, seed) tuple yields
//! bitwise-identical trained weights on every run.

mod gradcheck;
mod train;

pub use gradcheck::gradient_check;
pub use train::train;

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream_rng;

/// Hidden-layer activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(&self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative in terms of the pre-activation z.
    fn derivative(&self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
        }
    }
}

/// Training loss. Only MAE is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Loss {
    Mae,
}

/// Network architecture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
    pub activation: Activation,
    /// Dropout rate on hidden activations, in [0, 1). 0 disables dropout.
    pub dropout_rate: f64,
}

impl MlpSpec {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 {
            return Err(Error::invalid("input_dim and output_dim must be >= 1"));
        }
        if self.hidden.is_empty() || self.hidden.iter().any(|&h| h == 0) {
            return Err(Error::invalid("hidden layers must be nonempty with widths >= 1"));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::invalid(format!(
                "dropout_rate must be in [0, 1), got {}",
                self.dropout_rate
            )));
        }
        Ok(())
    }

    /// (fan_in, fan_out) per layer, input to output.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 1);
        let mut fan_in = self.input_dim;
        for &h in &self.hidden {
            dims.push((fan_in, h));
            fan_in = h;
        }
        dims.push((fan_in, self.output_dim));
        dims
    }
}

/// Optimization settings for [`train`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Initial learning rate.
    pub lr0: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Multiplicative decay factor of the step scheduler.
    pub scheduler_gamma: f64,
    /// Number of epochs between decays.
    pub scheduler_step: usize,
    pub seed: u64,
    pub loss: Loss,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr0 > 0.0) {
            return Err(Error::invalid(format!("lr0 must be > 0, got {}", self.lr0)));
        }
        if !(self.scheduler_gamma > 0.0 && self.scheduler_gamma <= 1.0) {
            return Err(Error::invalid(format!(
                "scheduler_gamma must be in (0, 1], got {}",
                self.scheduler_gamma
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size must be >= 1"));
        }
        if self.scheduler_step == 0 {
            return Err(Error::invalid("scheduler_step must be >= 1"));
        }
        Ok(())
    }
}

/// Learning rate at a given epoch: lr0 * gamma^floor(epoch / step).
pub fn lr_at_epoch(config: &TrainConfig, epoch: usize) -> f64 {
    config.lr0 * config.scheduler_gamma.powi((epoch / config.scheduler_step) as i32)
}

/// Per-epoch training and validation loss.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LearningCurves {
    pub train: Vec<f64>,
    pub val: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct MlpRepr {
    spec: MlpSpec,
    /// Row-major weight matrices, one per layer: weights[l][i][j] connects
    /// input i of layer l to output j.
    weights: Vec<Vec<Vec<f64>>>,
    biases: Vec<Vec<f64>>,
}

/// A multilayer perceptron: affine layers with the spec's activation after
/// each hidden layer and a linear output layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MlpRepr", try_from = "MlpRepr")]
pub struct Mlp {
    spec: MlpSpec,
    /// weights[l] has shape (fan_in, fan_out); forward is x.dot(w) + b.
    weights: Vec<Array2<f64>>,
    biases: Vec<Array1<f64>>,
}

impl From<Mlp> for MlpRepr {
    fn from(mlp: Mlp) -> Self {
        MlpRepr {
            spec: mlp.spec,
            weights: mlp
                .weights
                .iter()
                .map(|w| w.rows().into_iter().map(|r| r.to_vec()).collect())
                .collect(),
            biases: mlp.biases.iter().map(|b| b.to_vec()).collect(),
        }
    }
}

impl TryFrom<MlpRepr> for Mlp {
    type Error = Error;

    fn try_from(repr: MlpRepr) -> Result<Self> {
        repr.spec.validate()?;
        let dims = repr.spec.layer_dims();
        if repr.weights.len() != dims.len() || repr.biases.len() != dims.len() {
            return Err(Error::shape("layer count does not match spec"));
        }
        let mut weights = Vec::with_capacity(dims.len());
        let mut biases = Vec::with_capacity(dims.len());
        for (l, &(fan_in, fan_out)) in dims.iter().enumerate() {
            let w = &repr.weights[l];
            if w.len() != fan_in || w.iter().any(|row| row.len() != fan_out) {
                return Err(Error::shape(format!("layer {l} weight matrix is not {fan_in}x{fan_out}")));
            }
            let flat: Vec<f64> = w.iter().flatten().copied().collect();
            weights.push(
                Array2::from_shape_vec((fan_in, fan_out), flat)
                    .map_err(|e| Error::shape(e.to_string()))?,
            );
            if repr.biases[l].len() != fan_out {
                return Err(Error::shape(format!("layer {l} bias length is not {fan_out}")));
            }
            biases.push(Array1::from_vec(repr.biases[l].clone()));
        }
        Ok(Mlp {
            spec: repr.spec,
            weights,
            biases,
        })
    }
}

/// Controls dropout during a forward pass.
#[derive(Debug, Clone, Copy)]
pub enum ForwardMode {
    /// No dropout; deterministic.
    Eval,
    /// Inverted-scaling dropout on hidden activations, mask drawn from the
    /// given seed. A no-op when the spec's dropout rate is 0.
    Train { dropout_seed: u64 },
}

/// Intermediate state of a cached forward pass, consumed by backprop.
pub(crate) struct ForwardCache {
    /// Input seen by each layer (post activation/dropout of the previous one).
    pub layer_inputs: Vec<Array2<f64>>,
    /// Pre-activations of each hidden layer.
    pub pre_activations: Vec<Array2<f64>>,
    /// Dropout masks per hidden layer, scale 1/(1-p) already applied.
    pub masks: Vec<Option<Array2<f64>>>,
    pub output: Array2<f64>,
}

impl Mlp {
    /// Glorot-uniform initialization: weights ~ U(-L, L) with
    /// L = sqrt(6 / (fan_in + fan_out)), biases zero.
    pub fn init(spec: MlpSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for (l, (fan_in, fan_out)) in spec.layer_dims().into_iter().enumerate() {
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            let mut rng = stream_rng(seed, l as u64);
            let w = Array2::from_shape_fn((fan_in, fan_out), |_| rng.random_range(-limit..limit));
            weights.push(w);
            biases.push(Array1::zeros(fan_out));
        }
        Ok(Mlp { spec, weights, biases })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn weights(&self) -> &[Array2<f64>] {
        &self.weights
    }

    pub fn biases(&self) -> &[Array1<f64>] {
        &self.biases
    }

    pub(crate) fn params_mut(&mut self) -> (&mut Vec<Array2<f64>>, &mut Vec<Array1<f64>>) {
        (&mut self.weights, &mut self.biases)
    }

    pub fn num_params(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum::<usize>()
            + self.biases.iter().map(|b| b.len()).sum::<usize>()
    }

    fn check_batch(&self, batch: &Array2<f64>) -> Result<()> {
        if batch.ncols() != self.spec.input_dim {
            return Err(Error::shape(format!(
                "batch width {} does not match input_dim {}",
                batch.ncols(),
                self.spec.input_dim
            )));
        }
        Ok(())
    }

    /// Forward pass on a batch (rows are samples).
    pub fn forward(&self, batch: &Array2<f64>, mode: ForwardMode) -> Result<Array2<f64>> {
        Ok(self.forward_cached(batch, mode)?.output)
    }

    pub(crate) fn forward_cached(&self, batch: &Array2<f64>, mode: ForwardMode) -> Result<ForwardCache> {
        self.check_batch(batch)?;
        let n_layers = self.weights.len();
        let n_hidden = n_layers - 1;
        let mut dropout_rng = match mode {
            ForwardMode::Train { dropout_seed } if self.spec.dropout_rate > 0.0 => {
                Some(stream_rng(dropout_seed, 0))
            }
            _ => None,
        };

        let mut layer_inputs = Vec::with_capacity(n_layers);
        let mut pre_activations = Vec::with_capacity(n_hidden);
        let mut masks = Vec::with_capacity(n_hidden);
        let mut x = batch.to_owned();

        for l in 0..n_hidden {
            let z = x.dot(&self.weights[l]) + &self.biases[l];
            let mut a = z.mapv(|v| self.spec.activation.apply(v));
            let mask = dropout_rng.as_mut().map(|rng| {
                let p = self.spec.dropout_rate;
                let keep_scale = 1.0 / (1.0 - p);
                Array2::from_shape_fn(a.raw_dim(), |_| {
                    if rng.random::<f64>() < p {
                        0.0
                    } else {
                        keep_scale
                    }
                })
            });
            if let Some(m) = &mask {
                a = &a * m;
            }
            layer_inputs.push(x);
            pre_activations.push(z);
            masks.push(mask);
            x = a;
        }

        let output = x.dot(&self.weights[n_hidden]) + &self.biases[n_hidden];
        layer_inputs.push(x);
        Ok(ForwardCache {
            layer_inputs,
            pre_activations,
            masks,
            output,
        })
    }

    /// Gradients of a scalar loss w.r.t. all weights and biases, given the
    /// cached forward pass and dL/d(output).
    pub(crate) fn backward(
        &self,
        cache: &ForwardCache,
        output_grad: &Array2<f64>,
    ) -> (Vec<Array2<f64>>, Vec<Array1<f64>>) {
        let n_layers = self.weights.len();
        let mut weight_grads = vec![Array2::zeros((0, 0)); n_layers];
        let mut bias_grads = vec![Array1::zeros(0); n_layers];

        let mut delta = output_grad.clone();
        for l in (0..n_layers).rev() {
            // dot() may hand back an F-order array depending on operand
            // shapes; normalize so downstream slice access is valid
            weight_grads[l] = cache.layer_inputs[l]
                .t()
                .dot(&delta)
                .as_standard_layout()
                .to_owned();
            bias_grads[l] = delta.sum_axis(Axis(0));
            if l > 0 {
                let mut upstream = delta.dot(&self.weights[l].t());
                if let Some(mask) = &cache.masks[l - 1] {
                    upstream = upstream * mask;
                }
                let dact = cache.pre_activations[l - 1].mapv(|z| self.spec.activation.derivative(z));
                delta = upstream * &dact;
            }
        }
        (weight_grads, bias_grads)
    }
}

/// Mean absolute error over all entries of the batch.
pub fn mae_loss(pred: &Array2<f64>, target: &Array2<f64>) -> Result<f64> {
    if pred.dim() != target.dim() {
        return Err(Error::shape(format!(
            "prediction shape {:?} does not match target shape {:?}",
            pred.dim(),
            target.dim()
        )));
    }
    let n = pred.len();
    if n == 0 {
        return Err(Error::invalid("mae_loss on empty arrays"));
    }
    let sum: f64 = pred
        .iter()
        .zip(target.iter())
        .map(|(&p, &t)| (p - t).abs())
        .sum();
    Ok(sum / n as f64)
}

/// dL/d(pred) of [`mae_loss`]: sign(pred - target) / n, with the subgradient
/// at 0 taken as 0.
pub(crate) fn mae_loss_grad(pred: &Array2<f64>, target: &Array2<f64>) -> Array2<f64> {
    let n = pred.len() as f64;
    let mut grad = pred - target;
    grad.mapv_inplace(|d| {
        if d > 0.0 {
            1.0 / n
        } else if d < 0.0 {
            -1.0 / n
        } else {
            0.0
        }
    });
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn spec(input: usize, hidden: Vec<usize>, output: usize, act: Activation) -> MlpSpec {
        MlpSpec {
            input_dim: input,
            hidden,
            output_dim: output,
            activation: act,
            dropout_rate: 0.0,
        }
    }

    #[test]
    fn xavier_limit_matches_fan_sum() {
        // fan_in 6, fan_out 50 -> L = sqrt(6/56)
        let expected = (6.0f64 / 56.0).sqrt();
        assert!((expected - 0.3273).abs() < 5e-5);
        let mlp = Mlp::init(spec(6, vec![50], 1, Activation::Relu), 0).unwrap();
        let max = mlp.weights()[0].iter().fold(0.0f64, |m, &w| m.max(w.abs()));
        assert!(max <= expected);
        // with 300 draws the max should be close to the bound
        assert!(max > 0.9 * expected);
    }

    #[test]
    fn init_is_deterministic_and_biases_zero() {
        let s = spec(4, vec![8, 8], 2, Activation::Tanh);
        let a = Mlp::init(s.clone(), 123).unwrap();
        let b = Mlp::init(s, 123).unwrap();
        assert_eq!(a, b);
        assert!(a.biases().iter().all(|b| b.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn zero_weights_give_zero_output() {
        let mut mlp = Mlp::init(spec(3, vec![4], 2, Activation::Relu), 0).unwrap();
        for w in mlp.weights.iter_mut() {
            w.fill(0.0);
        }
        let out = mlp
            .forward(&array![[1.0, -2.0, 3.0], [0.5, 0.0, 1.0]], ForwardMode::Eval)
            .unwrap();
        assert!(out.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn relu_identity_net_passes_nonnegative_input() {
        let mut mlp = Mlp::init(spec(2, vec![2], 2, Activation::Relu), 0).unwrap();
        mlp.weights[0] = array![[1.0, 0.0], [0.0, 1.0]];
        mlp.weights[1] = array![[1.0, 0.0], [0.0, 1.0]];
        let x = array![[0.5, 2.0], [0.0, 3.0]];
        let out = mlp.forward(&x, ForwardMode::Eval).unwrap();
        assert_eq!(out, x);
    }

    #[test]
    fn dropout_zero_makes_train_equal_eval() {
        let mlp = Mlp::init(spec(3, vec![5], 2, Activation::Tanh), 7).unwrap();
        let x = array![[0.1, -0.2, 0.3]];
        let eval = mlp.forward(&x, ForwardMode::Eval).unwrap();
        let train = mlp.forward(&x, ForwardMode::Train { dropout_seed: 99 }).unwrap();
        assert_eq!(eval, train);
    }

    #[test]
    fn dropout_mask_is_deterministic_per_seed() {
        let mut s = spec(3, vec![16], 1, Activation::Tanh);
        s.dropout_rate = 0.5;
        let mlp = Mlp::init(s, 7).unwrap();
        let x = array![[0.4, -0.2, 0.9]];
        let a = mlp.forward(&x, ForwardMode::Train { dropout_seed: 1 }).unwrap();
        let b = mlp.forward(&x, ForwardMode::Train { dropout_seed: 1 }).unwrap();
        let c = mlp.forward(&x, ForwardMode::Train { dropout_seed: 2 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn dropout_inverted_scaling_preserves_expectation() {
        // E[mask * a] = a when the mask is Bernoulli(1-p) scaled by 1/(1-p)
        let mut s = spec(1, vec![1], 1, Activation::Relu);
        s.dropout_rate = 0.3;
        let mut mlp = Mlp::init(s, 0).unwrap();
        mlp.weights[0] = array![[1.0]];
        mlp.weights[1] = array![[1.0]];
        let x = array![[1.0]];
        let n = 100_000;
        let mean = (0..n)
            .map(|i| {
                mlp.forward(&x, ForwardMode::Train { dropout_seed: i as u64 }).unwrap()[[0, 0]]
            })
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1.0).abs() < 0.01, "sample mean {mean} drifted from 1.0");
    }

    #[test]
    fn mae_loss_examples() {
        let pred = array![[1.0, 2.0]];
        let target = array![[2.0, 4.0]];
        assert_eq!(mae_loss(&pred, &target).unwrap(), 1.5);
        assert_eq!(mae_loss(&target, &target).unwrap(), 0.0);
        assert_eq!(
            mae_loss(&pred, &target).unwrap(),
            mae_loss(&target, &pred).unwrap()
        );
        assert!(mae_loss(&pred, &array![[1.0]]).is_err());
    }

    #[test]
    fn lr_schedule() {
        let config = TrainConfig {
            lr0: 8e-3,
            epochs: 100,
            batch_size: 32,
            scheduler_gamma: 0.975,
            scheduler_step: 30,
            seed: 0,
            loss: Loss::Mae,
        };
        assert_eq!(lr_at_epoch(&config, 0), 8e-3);
        assert_eq!(lr_at_epoch(&config, 29), 8e-3);
        let at60 = lr_at_epoch(&config, 60);
        assert!((at60 - 8e-3 * 0.975 * 0.975).abs() < 1e-18);
        assert!((at60 - 7.605e-3).abs() < 1e-6);

        let constant = TrainConfig {
            scheduler_gamma: 1.0,
            ..config
        };
        assert_eq!(lr_at_epoch(&constant, 500), 8e-3);
    }

    #[test]
    fn serde_round_trip_is_exact() {
        let mlp = Mlp::init(spec(3, vec![4, 5], 2, Activation::Tanh), 42).unwrap();
        let json = serde_json::to_string(&mlp).unwrap();
        let back: Mlp = serde_json::from_str(&json).unwrap();
        assert_eq!(mlp, back);
    }
}

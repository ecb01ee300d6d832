//! Finite-difference verification of the backprop gradients.

use ndarray::Array2;

use super::{mae_loss, mae_loss_grad, ForwardMode, Mlp};
use crate::error::{Error, Result};

/// Compare backprop gradients of the MAE loss against central finite
/// differences, parameter by parameter, and return the worst relative
/// deviation max |g_bp - g_fd| / max(1e-12, |g_bp| + |g_fd|).
///
/// Runs in eval mode (no dropout). Tanh networks stay below ~1e-6 with the
/// default step; ReLU is fine away from activation kinks where the loss is
/// not differentiable.
///
/// Prefer an odd batch size: with an even one the MAE residual signs can
/// balance exactly, the true subgradient of an output bias is then 0, and
/// the central difference picks up nothing but rounding noise, which
/// reports as a spurious O(1) deviation.
pub fn gradient_check(mlp: &Mlp, x: &Array2<f64>, y: &Array2<f64>, eps: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::invalid(format!("eps must be > 0, got {eps}")));
    }
    let cache = mlp.forward_cached(x, ForwardMode::Eval)?;
    let out_grad = mae_loss_grad(&cache.output, y);
    let (weight_grads, bias_grads) = mlp.backward(&cache, &out_grad);

    let mut worst: f64 = 0.0;
    let n_layers = mlp.weights().len();
    for l in 0..n_layers {
        for idx in 0..mlp.weights()[l].len() {
            let g_bp = weight_grads[l].as_slice().unwrap()[idx];
            let g_fd = fd_gradient(mlp, x, y, eps, |m, delta| {
                let (w, _) = m.params_mut();
                w[l].as_slice_mut().unwrap()[idx] += delta;
            })?;
            worst = worst.max(relative_deviation(g_bp, g_fd));
        }
        for idx in 0..mlp.biases()[l].len() {
            let g_bp = bias_grads[l][idx];
            let g_fd = fd_gradient(mlp, x, y, eps, |m, delta| {
                let (_, b) = m.params_mut();
                b[l][idx] += delta;
            })?;
            worst = worst.max(relative_deviation(g_bp, g_fd));
        }
    }
    Ok(worst)
}

fn relative_deviation(g_bp: f64, g_fd: f64) -> f64 {
    (g_bp - g_fd).abs() / f64::max(1e-12, g_bp.abs() + g_fd.abs())
}

fn fd_gradient(
    mlp: &Mlp,
    x: &Array2<f64>,
    y: &Array2<f64>,
    eps: f64,
    perturb: impl Fn(&mut Mlp, f64),
) -> Result<f64> {
    let mut plus = mlp.clone();
    perturb(&mut plus, eps);
    let loss_plus = mae_loss(&plus.forward(x, ForwardMode::Eval)?, y)?;

    let mut minus = mlp.clone();
    perturb(&mut minus, -eps);
    let loss_minus = mae_loss(&minus.forward(x, ForwardMode::Eval)?, y)?;

    Ok((loss_plus - loss_minus) / (2.0 * eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, Mlp, MlpSpec};
    use crate::rng::stream_rng;
    use rand::Rng;

    fn random_batch(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
        let mut rng = stream_rng(seed, 0);
        Array2::from_shape_fn((rows, cols), |_| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn tanh_net_matches_finite_differences() {
        let spec = MlpSpec {
            input_dim: 5,
            hidden: vec![8, 6],
            output_dim: 3,
            activation: Activation::Tanh,
            dropout_rate: 0.0,
        };
        let mlp = Mlp::init(spec, 21).unwrap();
        let x = random_batch(9, 5, 1);
        let y = random_batch(9, 3, 2);
        let dev = gradient_check(&mlp, &x, &y, 1e-6).unwrap();
        assert!(dev < 1e-4, "max relative deviation {dev}");
    }

    #[test]
    fn linear_regime_is_tight() {
        // ReLU with strictly positive pre-activations and residuals that
        // never change sign: the loss is exactly linear in every parameter
        // near the evaluation point, so central differences are exact up to
        // rounding
        let spec = MlpSpec {
            input_dim: 3,
            hidden: vec![4],
            output_dim: 2,
            activation: Activation::Relu,
            dropout_rate: 0.0,
        };
        let mut mlp = Mlp::init(spec, 5).unwrap();
        let (w, _) = mlp.params_mut();
        for m in w.iter_mut() {
            m.fill(0.5);
        }
        let x = random_batch(7, 3, 3).mapv(|v| 1.0 + v.abs());
        let y = random_batch(7, 2, 4).mapv(|v| -5.0 + v);
        let dev = gradient_check(&mlp, &x, &y, 1e-6).unwrap();
        assert!(dev < 1e-6, "max relative deviation {dev}");
    }

    #[test]
    fn zero_weights_zero_input_is_finite() {
        let spec = MlpSpec {
            input_dim: 2,
            hidden: vec![3],
            output_dim: 1,
            activation: Activation::Tanh,
            dropout_rate: 0.0,
        };
        let mut mlp = Mlp::init(spec, 0).unwrap();
        let (w, _) = mlp.params_mut();
        for m in w.iter_mut() {
            m.fill(0.0);
        }
        let x = Array2::zeros((4, 2));
        let y = Array2::zeros((4, 1));
        let dev = gradient_check(&mlp, &x, &y, 1e-6).unwrap();
        assert!(dev.is_finite());
    }

    #[test]
    fn rejects_nonpositive_eps() {
        let spec = MlpSpec {
            input_dim: 2,
            hidden: vec![2],
            output_dim: 1,
            activation: Activation::Tanh,
            dropout_rate: 0.0,
        };
        let mlp = Mlp::init(spec, 0).unwrap();
        let x = Array2::zeros((1, 2));
        let y = Array2::zeros((1, 1));
        assert!(gradient_check(&mlp, &x, &y, 0.0).is_err());
    }
}

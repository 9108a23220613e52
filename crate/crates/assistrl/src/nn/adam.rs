//! Adam optimizer with bias-corrected moment estimates.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::nn::mlp::{Layer, MlpGrads, MlpParams};

pub const DEFAULT_LR: f64 = 0.00025;

/// First/second-moment accumulators matching an [`MlpParams`] shape.
#[derive(Debug, Clone)]
pub struct AdamState {
    m: MlpGrads,
    v: MlpGrads,
    pub step: u64,
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    pub fn new(params: &MlpParams) -> Self {
        Self::with_lr(params, DEFAULT_LR)
    }

    pub fn with_lr(params: &MlpParams, lr: f64) -> Self {
        let zeros = MlpGrads {
            layers: params
                .layers
                .iter()
                .map(|l| Layer {
                    weight: Array2::zeros(l.weight.dim()),
                    bias: Array1::zeros(l.bias.len()),
                })
                .collect(),
            log_spread: params.log_spread.as_ref().map(|s| Array1::zeros(s.len())),
        };
        AdamState {
            m: zeros.clone(),
            v: zeros,
            step: 0,
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// One Adam update, in place. Shapes of `params`, `grads`, and `state` must
/// all agree.
pub fn adam_step(params: &mut MlpParams, grads: &MlpGrads, state: &mut AdamState) -> Result<()> {
    if grads.layers.len() != params.layers.len()
        || grads.log_spread.is_some() != params.log_spread.is_some()
    {
        return Err(Error::contract("gradient shape does not match parameters"));
    }
    state.step += 1;
    let bias1 = 1.0 - state.beta1.powi(state.step as i32);
    let bias2 = 1.0 - state.beta2.powi(state.step as i32);
    let (b1, b2, lr, eps) = (state.beta1, state.beta2, state.lr, state.epsilon);

    let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
        *m = b1 * *m + (1.0 - b1) * g;
        *v = b2 * *v + (1.0 - b2) * g * g;
        let m_hat = *m / bias1;
        let v_hat = *v / bias2;
        *p -= lr * m_hat / (v_hat.sqrt() + eps);
    };

    for ((layer, grad), (m, v)) in params
        .layers
        .iter_mut()
        .zip(&grads.layers)
        .zip(state.m.layers.iter_mut().zip(state.v.layers.iter_mut()))
    {
        if layer.weight.dim() != grad.weight.dim() || layer.bias.len() != grad.bias.len() {
            return Err(Error::contract("gradient shape does not match parameters"));
        }
        for (((p, &g), m), v) in layer
            .weight
            .iter_mut()
            .zip(grad.weight.iter())
            .zip(m.weight.iter_mut())
            .zip(v.weight.iter_mut())
        {
            update(p, g, m, v);
        }
        for (((p, &g), m), v) in layer
            .bias
            .iter_mut()
            .zip(grad.bias.iter())
            .zip(m.bias.iter_mut())
            .zip(v.bias.iter_mut())
        {
            update(p, g, m, v);
        }
    }
    if let (Some(spread), Some(grad)) = (&mut params.log_spread, &grads.log_spread) {
        let (m, v) = (
            state.m.log_spread.as_mut().unwrap(),
            state.v.log_spread.as_mut().unwrap(),
        );
        for (((p, &g), m), v) in spread
            .iter_mut()
            .zip(grad.iter())
            .zip(m.iter_mut())
            .zip(v.iter_mut())
        {
            update(p, g, m, v);
        }
    }
    Ok(())
}

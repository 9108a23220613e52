//! Finite-difference validation of analytic gradients.

use crate::nn::mlp::{MlpGrads, MlpParams};

pub const DEFAULT_PERTURBATION: f64 = 1e-5;

/// Compares an analytic gradient against central finite differences of
/// `loss_fn`, coordinate by coordinate over the flattened parameters
/// (log-spread included), and returns the largest relative error.
///
/// The error for coordinate i is `|a_i - n_i| / max(|a_i|, |n_i|, floor)`
/// where `floor = 1e-4 * max(1, ||a||_inf)`; the floor keeps finite-difference
/// noise on near-zero coordinates from dominating the report.
pub fn grad_check<L, G>(params: &MlpParams, loss_fn: L, grad_fn: G, perturbation: f64) -> f64
where
    L: Fn(&MlpParams) -> f64,
    G: FnOnce(&MlpParams) -> MlpGrads,
{
    let analytic = grad_fn(params).flatten();
    let base = params.flatten();
    debug_assert_eq!(analytic.len(), base.len());

    let scale = analytic.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
    let floor = 1e-4 * scale.max(1.0);

    let mut worst = 0.0f64;
    let mut probe = params.clone();
    let mut coords = base.clone();
    for i in 0..base.len() {
        coords[i] = base[i] + perturbation;
        probe.assign_flat(&coords).expect("same shape");
        let plus = loss_fn(&probe);
        coords[i] = base[i] - perturbation;
        probe.assign_flat(&coords).expect("same shape");
        let minus = loss_fn(&probe);
        coords[i] = base[i];

        let numeric = (plus - minus) / (2.0 * perturbation);
        let a = analytic[i];
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(floor);
        worst = worst.max(rel);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::mlp::{Activation, Layer, MlpParams};
    use crate::rng::RngStream;
    use ndarray::{array, Array1, Array2, Axis};

    /// Quadratic loss on a linear single-layer net; central differences are
    /// exact on quadratics, so only rounding noise remains.
    #[test]
    fn quadratic_loss_on_linear_net() {
        let net = MlpParams {
            layers: vec![Layer {
                weight: array![[0.8, -1.2, 0.4]],
                bias: array![0.3],
            }],
            hidden_activation: Activation::Identity,
            output_activation: Activation::Identity,
            log_spread: None,
        };
        let x = array![[1.0, -0.5, 2.0]];
        let target = 1.7;
        let loss = |p: &MlpParams| {
            let (out, _) = p.forward_batch(x.view()).unwrap();
            let d = out[[0, 0]] - target;
            0.5 * d * d
        };
        let grad = |p: &MlpParams| {
            let (out, cache) = p.forward_batch(x.view()).unwrap();
            let d = out[[0, 0]] - target;
            p.backward_batch(&cache, array![[d]].view()).unwrap()
        };
        let err = grad_check(&net, loss, grad, 1e-3);
        assert!(err < 1e-8, "relative error {err}");
    }

    #[test]
    fn random_tanh_nets_pass_at_1e4() {
        for seed in 0..5u64 {
            let mut rng = RngStream::new(seed, 0);
            let net = MlpParams::init(
                &[3, 6, 5, 2],
                Activation::Tanh,
                Activation::Tanh,
                false,
                &mut rng,
            )
            .unwrap();
            let x = Array2::from_shape_vec((2, 3), rng.standard_normal_vec(6)).unwrap();
            let w = Array1::from(rng.standard_normal_vec(2));
            let loss = {
                let x = x.clone();
                let w = w.clone();
                move |p: &MlpParams| {
                    let (out, _) = p.forward_batch(x.view()).unwrap();
                    out.dot(&w).sum()
                }
            };
            let grad = |p: &MlpParams| {
                let (out, cache) = p.forward_batch(x.view()).unwrap();
                let dout = Array2::from_shape_fn(out.dim(), |(_, j)| w[j]);
                p.backward_batch(&cache, dout.view()).unwrap()
            };
            let err = grad_check(&net, loss, grad, DEFAULT_PERTURBATION);
            assert!(err < 1e-4, "seed {seed}: relative error {err}");
        }
    }

    #[test]
    fn unused_coordinates_report_zero_error() {
        // The log-spread head never enters the forward pass, so both the
        // analytic and numeric gradients vanish there.
        let mut rng = RngStream::new(9, 0);
        let net = MlpParams::init(
            &[2, 3, 2],
            Activation::Tanh,
            Activation::Identity,
            true,
            &mut rng,
        )
        .unwrap();
        let x = array![[0.4, -0.9]];
        let loss = |p: &MlpParams| {
            let (out, _) = p.forward_batch(x.view()).unwrap();
            out.sum_axis(Axis(1))[0]
        };
        let grad = |p: &MlpParams| {
            let (out, cache) = p.forward_batch(x.view()).unwrap();
            let dout = Array2::ones(out.dim());
            p.backward_batch(&cache, dout.view()).unwrap()
        };
        let err = grad_check(&net, loss, grad, DEFAULT_PERTURBATION);
        assert!(err < 1e-4, "relative error {err}");
    }
}

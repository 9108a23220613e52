//! Diagonal Gaussian policy over a tanh-squashed mean.
//!
//! The actor network emits a mean in `(-1, 1)` per action dimension; the
//! sample `u = mean + sigma * z` is unbounded, and its log-density is taken
//! on the raw Gaussian (no squash correction). For the environment, `u` is
//! clamped to `[-1, 1]` and mapped affinely onto the action box.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::nn::mlp::MlpParams;
use crate::rng::RngStream;

pub const LOG_TWO_PI: f64 = 1.837_877_066_409_345_4;

/// One policy draw: the raw Gaussian sample (kept for probability ratios),
/// the action actually sent to the environment, and the log-density of the
/// raw sample at collection time.
#[derive(Debug, Clone)]
pub struct PolicySample {
    pub raw: Vec<f64>,
    pub env_action: Vec<f64>,
    pub log_prob: f64,
}

/// Maps a clamped `[-1, 1]` coordinate onto `[lo, hi]`.
pub fn map_to_bounds(u: f64, lo: f64, hi: f64) -> f64 {
    lo + (u.clamp(-1.0, 1.0) + 1.0) * 0.5 * (hi - lo)
}

/// Log-density of `raw` under `N(mean, diag(exp(log_spread))^2)`.
pub fn log_prob(mean: ArrayView1<f64>, log_spread: ArrayView1<f64>, raw: &[f64]) -> f64 {
    debug_assert_eq!(mean.len(), raw.len());
    let mut lp = 0.0;
    for ((&m, &ls), &u) in mean.iter().zip(log_spread.iter()).zip(raw) {
        let inv_var = (-2.0 * ls).exp();
        let d = u - m;
        lp += -0.5 * LOG_TWO_PI - ls - 0.5 * d * d * inv_var;
    }
    lp
}

/// Row-wise [`log_prob`] for a batch of means and raw samples.
pub fn log_prob_batch(
    means: &Array2<f64>,
    log_spread: ArrayView1<f64>,
    raws: &Array2<f64>,
) -> Array1<f64> {
    debug_assert_eq!(means.dim(), raws.dim());
    let mut out = Array1::zeros(means.nrows());
    for (i, (mean_row, raw_row)) in means.rows().into_iter().zip(raws.rows()).enumerate() {
        let mut lp = 0.0;
        for ((&m, &ls), &u) in mean_row.iter().zip(log_spread.iter()).zip(raw_row.iter()) {
            let inv_var = (-2.0 * ls).exp();
            let d = u - m;
            lp += -0.5 * LOG_TWO_PI - ls - 0.5 * d * d * inv_var;
        }
        out[i] = lp;
    }
    out
}

/// Entropy of the diagonal Gaussian; independent of the mean.
pub fn entropy(log_spread: ArrayView1<f64>) -> f64 {
    log_spread
        .iter()
        .map(|ls| 0.5 * (LOG_TWO_PI + 1.0) + ls)
        .sum()
}

/// Samples an action for `state` from the actor's Gaussian head.
pub fn policy_sample(
    actor: &MlpParams,
    state: &[f64],
    bounds: &(Vec<f64>, Vec<f64>),
    rng: &mut RngStream,
) -> Result<PolicySample> {
    let log_spread = actor
        .log_spread
        .as_ref()
        .ok_or_else(|| Error::contract("actor network is missing its log-spread head"))?;
    let mean = actor.forward(ArrayView1::from(state))?;
    if mean.len() != log_spread.len() || mean.len() != bounds.0.len() {
        return Err(Error::DimensionMismatch {
            what: "actor output",
            expected: bounds.0.len(),
            got: mean.len(),
        });
    }
    let mut raw = Vec::with_capacity(mean.len());
    for (&m, &ls) in mean.iter().zip(log_spread.iter()) {
        raw.push(m + ls.exp() * rng.standard_normal());
    }
    let lp = log_prob(mean.view(), log_spread.view(), &raw);
    let env_action = raw
        .iter()
        .zip(bounds.0.iter().zip(&bounds.1))
        .map(|(&u, (&lo, &hi))| map_to_bounds(u, lo, hi))
        .collect();
    Ok(PolicySample {
        raw,
        env_action,
        log_prob: lp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::mlp::Activation;
    use ndarray::array;

    fn actor(spread: f64) -> MlpParams {
        let mut params = MlpParams::init(
            &[2, 4, 3],
            Activation::Relu,
            Activation::Tanh,
            true,
            &mut RngStream::new(1, 0),
        )
        .unwrap();
        params.log_spread.as_mut().unwrap().fill(spread);
        params
    }

    #[test]
    fn log_prob_at_mean_with_unit_spread() {
        let mean = array![0.2, -0.4, 0.9];
        let spread = array![0.0, 0.0, 0.0];
        let lp = log_prob(mean.view(), spread.view(), &[0.2, -0.4, 0.9]);
        let expected = -0.5 * 3.0 * LOG_TWO_PI;
        assert!((lp - expected).abs() < 1e-12);
    }

    #[test]
    fn tiny_spread_collapses_to_the_mean() {
        let params = actor(-40.0);
        let bounds = (vec![-1.0; 3], vec![1.0; 3]);
        let state = [0.3, -0.8];
        let mean = params.forward(ArrayView1::from(&state[..])).unwrap();
        let sample =
            policy_sample(&params, &state, &bounds, &mut RngStream::new(2, 0)).unwrap();
        for (s, m) in sample.raw.iter().zip(mean.iter()) {
            assert!((s - m).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_deterministic_per_stream() {
        let params = actor(0.0);
        let bounds = (vec![-1.0; 3], vec![1.0; 3]);
        let a = policy_sample(&params, &[0.1, 0.2], &bounds, &mut RngStream::new(3, 1)).unwrap();
        let b = policy_sample(&params, &[0.1, 0.2], &bounds, &mut RngStream::new(3, 1)).unwrap();
        assert_eq!(a.raw, b.raw);
        assert_eq!(a.env_action, b.env_action);
        assert_eq!(a.log_prob.to_bits(), b.log_prob.to_bits());
    }

    #[test]
    fn env_action_respects_bounds() {
        let params = actor(1.5);
        let bounds = (vec![0.0; 3], vec![12.0; 3]);
        let mut rng = RngStream::new(4, 0);
        for _ in 0..200 {
            let s = policy_sample(&params, &[0.0, 0.0], &bounds, &mut rng).unwrap();
            for a in s.env_action {
                assert!((0.0..=12.0).contains(&a));
            }
        }
    }

    #[test]
    fn bounds_mapping_is_affine() {
        assert_eq!(map_to_bounds(-1.0, 0.0, 12.0), 0.0);
        assert_eq!(map_to_bounds(1.0, 0.0, 12.0), 12.0);
        assert_eq!(map_to_bounds(0.0, 0.0, 12.0), 6.0);
        // Values outside [-1, 1] clamp first.
        assert_eq!(map_to_bounds(3.0, -1.0, 1.0), 1.0);
    }

    #[test]
    fn batch_log_prob_matches_single() {
        let means = array![[0.1, -0.2], [0.5, 0.5]];
        let spread = array![0.3, -0.6];
        let raws = array![[0.0, 0.0], [0.4, 0.9]];
        let batch = log_prob_batch(&means, spread.view(), &raws);
        for i in 0..2 {
            let single = log_prob(
                means.row(i),
                spread.view(),
                raws.row(i).as_slice().unwrap(),
            );
            assert!((batch[i] - single).abs() < 1e-14);
        }
    }
}

//! Dense network: batched forward pass and reverse-mode gradients.
//!
//! Everything is double precision and allocation-simple; the networks here
//! are small enough that clarity and reproducibility dominate.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: &mut Array2<f64>) {
        match self {
            Activation::Relu => z.mapv_inplace(|x| x.max(0.0)),
            Activation::Tanh => z.mapv_inplace(f64::tanh),
            Activation::Identity => {}
        }
    }

    /// Derivative expressed through the activation's own output.
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

/// One affine layer; `weight` has shape `(out, in)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Dense-network parameters. `log_spread` (per-dimension log standard
/// deviation of a Gaussian policy head) is present on actors only; it does
/// not participate in the forward pass but travels with the parameters so
/// one optimizer state covers everything.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layers: Vec<Layer>,
    pub hidden_activation: Activation,
    pub output_activation: Activation,
    pub log_spread: Option<Array1<f64>>,
}

/// Per-layer activations kept for the backward pass; `activations[0]` is the
/// input batch and `activations[L]` the output batch.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub activations: Vec<Array2<f64>>,
}

/// Gradients shaped exactly like [`MlpParams`].
#[derive(Debug, Clone)]
pub struct MlpGrads {
    pub layers: Vec<Layer>,
    pub log_spread: Option<Array1<f64>>,
}

impl MlpParams {
    /// Initializes weights uniformly in `[-b, b]` with `b = sqrt(6 / fan_in)`
    /// and biases at zero. `with_spread` attaches a zero log-spread vector
    /// sized by the output layer.
    pub fn init(
        sizes: &[usize],
        hidden_activation: Activation,
        output_activation: Activation,
        with_spread: bool,
        rng: &mut RngStream,
    ) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::invalid(
                "a network needs at least an input and an output size",
            ));
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::invalid("layer sizes must be positive"));
        }
        let mut layers = Vec::with_capacity(sizes.len() - 1);
        for window in sizes.windows(2) {
            let (fan_in, fan_out) = (window[0], window[1]);
            let bound = (6.0 / fan_in as f64).sqrt();
            let mut weight = Array2::zeros((fan_out, fan_in));
            for w in weight.iter_mut() {
                *w = rng.uniform(-bound, bound);
            }
            layers.push(Layer {
                weight,
                bias: Array1::zeros(fan_out),
            });
        }
        let log_spread = with_spread.then(|| Array1::zeros(*sizes.last().unwrap()));
        Ok(MlpParams {
            layers,
            hidden_activation,
            output_activation,
            log_spread,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weight.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().weight.nrows()
    }

    fn activation_for(&self, layer_index: usize) -> Activation {
        if layer_index + 1 == self.layers.len() {
            self.output_activation
        } else {
            self.hidden_activation
        }
    }

    /// Batched forward pass; rows of `x` are samples.
    pub fn forward_batch(&self, x: ArrayView2<f64>) -> Result<(Array2<f64>, ForwardCache)> {
        if x.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                what: "network input",
                expected: self.input_dim(),
                got: x.ncols(),
            });
        }
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(x.to_owned());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = activations[i].dot(&layer.weight.t());
            z += &layer.bias;
            self.activation_for(i).apply(&mut z);
            activations.push(z);
        }
        let output = activations.last().unwrap().clone();
        Ok((output, ForwardCache { activations }))
    }

    /// Single-sample convenience wrapper around [`Self::forward_batch`].
    pub fn forward(&self, x: ArrayView1<f64>) -> Result<Array1<f64>> {
        let batch = x.insert_axis(Axis(0));
        let (out, _) = self.forward_batch(batch)?;
        Ok(out.row(0).to_owned())
    }

    /// Reverse-mode gradients of a scalar loss whose gradient with respect to
    /// the network output batch is `dloss_doutput`. Gradients are summed over
    /// the batch; the caller folds any `1/m` factor into `dloss_doutput`.
    /// `log_spread` gradients (if the field exists) come back zero-filled —
    /// that head does not participate in the forward pass.
    pub fn backward_batch(
        &self,
        cache: &ForwardCache,
        dloss_doutput: ArrayView2<f64>,
    ) -> Result<MlpGrads> {
        let n_layers = self.layers.len();
        if cache.activations.len() != n_layers + 1 {
            return Err(Error::contract(
                "forward cache does not match this network",
            ));
        }
        let output = &cache.activations[n_layers];
        if dloss_doutput.dim() != output.dim() {
            return Err(Error::DimensionMismatch {
                what: "output gradient rows x cols",
                expected: output.len(),
                got: dloss_doutput.len(),
            });
        }

        let mut grads: Vec<Layer> = self
            .layers
            .iter()
            .map(|l| Layer {
                weight: Array2::zeros(l.weight.dim()),
                bias: Array1::zeros(l.bias.len()),
            })
            .collect();

        // delta = dL/dz for the current layer, starting from the output.
        let mut delta = dloss_doutput.to_owned();
        apply_activation_derivative(&mut delta, output, self.activation_for(n_layers - 1));

        for i in (0..n_layers).rev() {
            let input = &cache.activations[i];
            grads[i].weight = delta.t().dot(input);
            grads[i].bias = delta.sum_axis(Axis(0));
            if i > 0 {
                let mut prev = delta.dot(&self.layers[i].weight);
                apply_activation_derivative(&mut prev, &cache.activations[i], self.activation_for(i - 1));
                delta = prev;
            }
        }

        Ok(MlpGrads {
            layers: grads,
            log_spread: self.log_spread.as_ref().map(|s| Array1::zeros(s.len())),
        })
    }

    /// Flattened view of every parameter (weights, biases, log-spread), in a
    /// fixed order used by the gradient checker and the checkpoint format.
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for layer in &self.layers {
            flat.extend(layer.weight.iter());
            flat.extend(layer.bias.iter());
        }
        if let Some(spread) = &self.log_spread {
            flat.extend(spread.iter());
        }
        flat
    }

    /// Writes a flattened parameter vector back; inverse of [`Self::flatten`].
    pub fn assign_flat(&mut self, flat: &[f64]) -> Result<()> {
        let expected = self.flatten().len();
        if flat.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "flattened parameters",
                expected,
                got: flat.len(),
            });
        }
        let mut it = flat.iter();
        for layer in &mut self.layers {
            for w in layer.weight.iter_mut() {
                *w = *it.next().unwrap();
            }
            for b in layer.bias.iter_mut() {
                *b = *it.next().unwrap();
            }
        }
        if let Some(spread) = &mut self.log_spread {
            for s in spread.iter_mut() {
                *s = *it.next().unwrap();
            }
        }
        Ok(())
    }
}

fn apply_activation_derivative(delta: &mut Array2<f64>, output: &Array2<f64>, act: Activation) {
    if act == Activation::Identity {
        return;
    }
    ndarray::Zip::from(delta)
        .and(output)
        .for_each(|d, &y| *d *= act.derivative_from_output(y));
}

impl MlpGrads {
    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        for layer in &self.layers {
            flat.extend(layer.weight.iter());
            flat.extend(layer.bias.iter());
        }
        if let Some(spread) = &self.log_spread {
            flat.extend(spread.iter());
        }
        flat
    }

    pub fn global_norm(&self) -> f64 {
        let mut sum = 0.0;
        for layer in &self.layers {
            sum += layer.weight.iter().map(|w| w * w).sum::<f64>();
            sum += layer.bias.iter().map(|b| b * b).sum::<f64>();
        }
        if let Some(spread) = &self.log_spread {
            sum += spread.iter().map(|s| s * s).sum::<f64>();
        }
        sum.sqrt()
    }

    /// Rescales all gradients so the global L2 norm does not exceed `max`.
    pub fn clip_global_norm(&mut self, max: f64) {
        let norm = self.global_norm();
        if norm > max && norm > 0.0 {
            self.scale(max / norm);
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for layer in &mut self.layers {
            layer.weight.mapv_inplace(|w| w * factor);
            layer.bias.mapv_inplace(|b| b * factor);
        }
        if let Some(spread) = &mut self.log_spread {
            spread.mapv_inplace(|s| s * factor);
        }
    }
}

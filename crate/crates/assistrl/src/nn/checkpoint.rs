//! Parameter checkpoints: a JSON container of named arrays with shapes.
//!
//! Layout: `arrays` holds `layers.<i>.weight` (row-major, shape `[out, in]`),
//! `layers.<i>.bias` (shape `[out]`), and optionally `log_spread`. Activations
//! are stored by name. Round-trips are bit-exact.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::mlp::{Activation, Layer, MlpParams};

#[derive(Debug, Serialize, Deserialize)]
struct NamedArray {
    name: String,
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    hidden_activation: String,
    output_activation: String,
    arrays: Vec<NamedArray>,
}

fn activation_name(a: Activation) -> &'static str {
    match a {
        Activation::Relu => "relu",
        Activation::Tanh => "tanh",
        Activation::Identity => "identity",
    }
}

fn activation_from_name(name: &str) -> Result<Activation> {
    match name {
        "relu" => Ok(Activation::Relu),
        "tanh" => Ok(Activation::Tanh),
        "identity" => Ok(Activation::Identity),
        other => Err(Error::invalid(format!("unknown activation `{other}`"))),
    }
}

impl Checkpoint {
    pub fn from_params(params: &MlpParams) -> Self {
        let mut arrays = Vec::new();
        for (i, layer) in params.layers.iter().enumerate() {
            arrays.push(NamedArray {
                name: format!("layers.{i}.weight"),
                shape: vec![layer.weight.nrows(), layer.weight.ncols()],
                data: layer.weight.iter().copied().collect(),
            });
            arrays.push(NamedArray {
                name: format!("layers.{i}.bias"),
                shape: vec![layer.bias.len()],
                data: layer.bias.to_vec(),
            });
        }
        if let Some(spread) = &params.log_spread {
            arrays.push(NamedArray {
                name: "log_spread".to_string(),
                shape: vec![spread.len()],
                data: spread.to_vec(),
            });
        }
        Checkpoint {
            hidden_activation: activation_name(params.hidden_activation).to_string(),
            output_activation: activation_name(params.output_activation).to_string(),
            arrays,
        }
    }

    pub fn into_params(self) -> Result<MlpParams> {
        let hidden_activation = activation_from_name(&self.hidden_activation)?;
        let output_activation = activation_from_name(&self.output_activation)?;
        let mut layers = Vec::new();
        let mut log_spread = None;
        let mut weights: Vec<Option<Array2<f64>>> = Vec::new();
        let mut biases: Vec<Option<Array1<f64>>> = Vec::new();

        for array in self.arrays {
            if array.shape.iter().product::<usize>() != array.data.len() {
                return Err(Error::invalid(format!(
                    "array `{}` shape {:?} does not match {} elements",
                    array.name,
                    array.shape,
                    array.data.len()
                )));
            }
            if array.name == "log_spread" {
                log_spread = Some(Array1::from(array.data));
                continue;
            }
            let parts: Vec<&str> = array.name.split('.').collect();
            let (index, kind) = match parts.as_slice() {
                ["layers", idx, kind] => (
                    idx.parse::<usize>()
                        .map_err(|_| Error::invalid(format!("bad array name `{}`", array.name)))?,
                    *kind,
                ),
                _ => {
                    return Err(Error::invalid(format!(
                        "unrecognized array name `{}`",
                        array.name
                    )))
                }
            };
            if weights.len() <= index {
                weights.resize_with(index + 1, || None);
                biases.resize_with(index + 1, || None);
            }
            match kind {
                "weight" => {
                    if array.shape.len() != 2 {
                        return Err(Error::invalid("weight arrays must be 2-d"));
                    }
                    weights[index] = Some(
                        Array2::from_shape_vec((array.shape[0], array.shape[1]), array.data)
                            .map_err(|e| Error::invalid(e.to_string()))?,
                    );
                }
                "bias" => biases[index] = Some(Array1::from(array.data)),
                other => {
                    return Err(Error::invalid(format!("unknown array kind `{other}`")));
                }
            }
        }

        for (i, (w, b)) in weights.into_iter().zip(biases).enumerate() {
            let (weight, bias) = match (w, b) {
                (Some(w), Some(b)) => (w, b),
                _ => return Err(Error::invalid(format!("layer {i} is incomplete"))),
            };
            if weight.nrows() != bias.len() {
                return Err(Error::invalid(format!(
                    "layer {i}: weight rows {} != bias length {}",
                    weight.nrows(),
                    bias.len()
                )));
            }
            layers.push(Layer { weight, bias });
        }
        if layers.is_empty() {
            return Err(Error::invalid("checkpoint holds no layers"));
        }
        Ok(MlpParams {
            layers,
            hidden_activation,
            output_activation,
            log_spread,
        })
    }
}

pub fn save_params(params: &MlpParams, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(&Checkpoint::from_params(params))
        .map_err(|e| Error::invalid(e.to_string()))?;
    fs::write(path, json)?;
    Ok(())
}

pub fn load_params(path: &Path) -> Result<MlpParams> {
    let json = fs::read_to_string(path)?;
    let checkpoint: Checkpoint =
        serde_json::from_str(&json).map_err(|e| Error::invalid(e.to_string()))?;
    checkpoint.into_params()
}

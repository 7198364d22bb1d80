//! Framework-agnostic network representation: an ordered list of weight
//! matrices with the bias as the first row, plus a per-layer activation name.
//!
//! Layer `l + 1` connecting `h_l` inputs to `h_{l+1}` units stores a
//! `(1 + h_l) × h_{l+1}` matrix whose row 0 is the bias vector; column `j`
//! holds everything incident on unit `j`. Models trained elsewhere can be
//! exported to this layout and loaded from JSON.

use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::activation::ActivationKind;
use crate::error::{Error, Result};

/// One dense layer: activation plus its `(1 + fan_in) × units` weight matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer {
    pub activation: ActivationKind,
    weights: Array2<f64>,
}

impl Layer {
    pub fn new(activation: ActivationKind, weights: Array2<f64>) -> Result<Self> {
        if weights.nrows() < 2 || weights.ncols() == 0 {
            return Err(Error::InvalidNetwork(format!(
                "layer weight matrix must be at least 2x1 (bias row plus inputs), got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        Ok(Layer {
            activation,
            weights,
        })
    }

    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub(crate) fn weights_mut(&mut self) -> &mut Array2<f64> {
        &mut self.weights
    }

    /// Bias row (row 0).
    pub fn bias(&self) -> ArrayView1<'_, f64> {
        self.weights.row(0)
    }

    /// Weight rows without the bias: `fan_in × units`.
    pub fn kernel(&self) -> ArrayView2<'_, f64> {
        self.weights.slice(ndarray::s![1.., ..])
    }

    pub fn input_dim(&self) -> usize {
        self.weights.nrows() - 1
    }

    pub fn units(&self) -> usize {
        self.weights.ncols()
    }
}

/// A validated feed-forward network.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkSpec {
    layers: Vec<Layer>,
}

impl NetworkSpec {
    /// Validates the dimension chain and weight finiteness.
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidNetwork("network has no layers".into()));
        }
        for (i, layer) in layers.iter().enumerate() {
            if layer.weights.iter().any(|w| !w.is_finite()) {
                return Err(Error::NonFiniteWeight { layer: i + 1 });
            }
        }
        for (i, pair) in layers.windows(2).enumerate() {
            let outputs = pair[0].units();
            let next_inputs = pair[1].input_dim();
            if outputs != next_inputs {
                return Err(Error::LayerChainMismatch {
                    layer: i + 1,
                    outputs,
                    next_layer: i + 2,
                    next_inputs,
                });
            }
        }
        Ok(NetworkSpec { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer] {
        &mut self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().units()
    }

    /// Standard forward pass: per layer, add the bias row and apply the
    /// activation elementwise. `x` is one observation per row.
    pub fn forward(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.input_dim() {
            return Err(Error::DimensionMismatch {
                context: "forward input",
                expected: self.input_dim(),
                found: x.ncols(),
            });
        }
        let mut activations = x.to_owned();
        for layer in &self.layers {
            let mut z = activations.dot(&layer.kernel());
            z += &layer.bias().insert_axis(Axis(0));
            z.mapv_inplace(|v| layer.activation.apply(v));
            activations = z;
        }
        Ok(activations)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }
}

#[derive(Serialize, Deserialize)]
struct LayerRepr {
    activation: ActivationKind,
    weights: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct NetworkRepr {
    layers: Vec<LayerRepr>,
}

impl Serialize for NetworkSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        NetworkRepr {
            layers: self
                .layers
                .iter()
                .map(|layer| LayerRepr {
                    activation: layer.activation,
                    weights: layer.weights.rows().into_iter().map(|r| r.to_vec()).collect(),
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for NetworkSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = NetworkRepr::deserialize(deserializer)?;
        let mut layers = Vec::with_capacity(repr.layers.len());
        for (i, layer) in repr.layers.into_iter().enumerate() {
            let rows = layer.weights.len();
            let cols = layer.weights.first().map_or(0, Vec::len);
            if layer.weights.iter().any(|row| row.len() != cols) {
                return Err(D::Error::custom(format!(
                    "layer {}: ragged weight rows",
                    i + 1
                )));
            }
            let flat: Vec<f64> = layer.weights.into_iter().flatten().collect();
            let weights =
                Array2::from_shape_vec((rows, cols), flat).map_err(D::Error::custom)?;
            layers.push(Layer::new(layer.activation, weights).map_err(D::Error::custom)?);
        }
        NetworkSpec::new(layers).map_err(D::Error::custom)
    }
}

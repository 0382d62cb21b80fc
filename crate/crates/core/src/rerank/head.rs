//! Scoring heads applied to latent vectors.
//!
//! File format, single affine layer:
//! `{"weights": [[w..]], "bias": [b]}`
//! or a stack with ReLU between layers:
//! `{"layers": [{"weights": .., "bias": ..}, {"weights": .., "bias": ..}]}`.
//! Weights are `out × in`; the last layer must have one output.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineLayer {
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl AffineLayer {
    fn input_dim(&self) -> usize {
        self.weights.first().map(Vec::len).unwrap_or(0)
    }

    fn output_dim(&self) -> usize {
        self.weights.len()
    }

    fn apply(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            self.weights
                .iter()
                .zip(&self.bias)
                .map(|(w, b)| w.iter().zip(x).map(|(a, c)| a * c).sum::<f64>() + b),
        );
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HeadFile {
    Stack { layers: Vec<AffineLayer> },
    Single(AffineLayer),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MlpHead {
    layers: Vec<AffineLayer>,
}

impl MlpHead {
    pub fn new(layers: Vec<AffineLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidParameter("head has no layers".into()));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.weights.is_empty() || l.input_dim() == 0 {
                return Err(Error::InvalidParameter(format!("layer {i} has empty weights")));
            }
            if l.weights.iter().any(|r| r.len() != l.input_dim()) {
                return Err(Error::InvalidParameter(format!("layer {i} has ragged weights")));
            }
            if l.bias.len() != l.output_dim() {
                return Err(Error::InvalidParameter(format!(
                    "layer {i}: {} biases for {} outputs",
                    l.bias.len(),
                    l.output_dim()
                )));
            }
            if let Some(next) = layers.get(i + 1) {
                if next.input_dim() != l.output_dim() {
                    return Err(Error::InvalidParameter(format!(
                        "layer {} expects {} inputs, layer {i} produces {}",
                        i + 1,
                        next.input_dim(),
                        l.output_dim()
                    )));
                }
            }
        }
        if layers.last().map(AffineLayer::output_dim) != Some(1) {
            return Err(Error::InvalidParameter("last layer must have one output".into()));
        }
        Ok(Self { layers })
    }

    /// `score = w · x + b`.
    pub fn linear(weights: Vec<f64>, bias: f64) -> Result<Self> {
        Self::new(vec![AffineLayer {
            weights: vec![weights],
            bias: vec![bias],
        }])
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: HeadFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("head file: {e}")))?;
        match file {
            HeadFile::Stack { layers } => Self::new(layers),
            HeadFile::Single(layer) => Self::new(vec![layer]),
        }
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn layers(&self) -> &[AffineLayer] {
        &self.layers
    }

    /// Affine layers with ReLU in between (none after the last).
    pub fn score(&self, latent: &[f64]) -> f64 {
        let mut cur = latent.to_vec();
        let mut next = Vec::new();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            layer.apply(&cur, &mut next);
            if i < last {
                next.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            std::mem::swap(&mut cur, &mut next);
        }
        cur[0]
    }
}

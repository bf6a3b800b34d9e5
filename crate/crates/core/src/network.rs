//! Activation functions, affine-linear potentials, the k-layered network
//! spec, and a traced forward pass.
//!
//! A network is a chain of layers `l = 1..k`, each an affine potential
//! `z^l = W^l * (a^{l-1}; 1)` followed by a componentwise activation
//! `a^l = sigma(z^l)`. Weight matrices have shape `n_l x (n_{l-1} + 1)`
//! with the biases in the last column. The forward pass records every
//! potential and activation so the backward pass can consume them.

use crate::counters;
use crate::error::{Error, Result};
use crate::tensor::{Matrix, Vector};

/// Scalar activation applied at every layer of a network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ActivationKind {
    /// Standard logistic `1 / (1 + e^{-z})`.
    Logistic,
    /// Hyperbolic tangent.
    Tanh,
    /// Rectifier `max(0, z)`, with derivative fixed to 0 at the kink.
    ReLU,
    /// Leaky rectifier with one shared slope for value and derivative on
    /// `z <= 0`. Slope must lie in (0, 1).
    LeakyReLU { slope: f64 },
}

impl ActivationKind {
    /// Leaky rectifier with the conventional 0.01 slope.
    pub fn leaky_relu_default() -> Self {
        ActivationKind::LeakyReLU { slope: 0.01 }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if let ActivationKind::LeakyReLU { slope } = self {
            if !(*slope > 0.0 && *slope < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "leaky ReLU slope must be in (0, 1), got {slope}"
                )));
            }
        }
        Ok(())
    }

    /// sigma(z).
    pub fn value(&self, z: f64) -> f64 {
        match self {
            // Branch-stable logistic: never exponentiates a large positive
            // argument.
            ActivationKind::Logistic => {
                if z >= 0.0 {
                    1.0 / (1.0 + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (1.0 + e)
                }
            }
            ActivationKind::Tanh => z.tanh(),
            ActivationKind::ReLU => z.max(0.0),
            ActivationKind::LeakyReLU { slope } => {
                if z > 0.0 {
                    z
                } else {
                    slope * z
                }
            }
        }
    }

    /// sigma'(z). The rectifier derivative at z = 0 is 0 by convention;
    /// the leaky rectifier uses its slope there.
    pub fn derivative(&self, z: f64) -> f64 {
        match self {
            ActivationKind::Logistic => {
                let s = self.value(z);
                s * (1.0 - s)
            }
            ActivationKind::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            ActivationKind::ReLU => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::LeakyReLU { slope } => {
                if z > 0.0 {
                    1.0
                } else {
                    *slope
                }
            }
        }
    }

    /// Componentwise lift of `value`.
    pub fn componentwise(&self, z: &Vector) -> Vector {
        Vector::from_fn(z.dim(), |i| self.value(z[i]))
    }

    /// Componentwise lift of `derivative` (the vector of activation
    /// derivatives the backward recursion multiplies by).
    pub fn componentwise_derivative(&self, z: &Vector) -> Vector {
        Vector::from_fn(z.dim(), |i| self.derivative(z[i]))
    }
}

/// Layer widths `n_0..n_k` plus the activation used at every layer.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkSpec {
    dims: Vec<usize>,
    activation: ActivationKind,
}

impl NetworkSpec {
    pub fn new(dims: Vec<usize>, activation: ActivationKind) -> Result<Self> {
        if dims.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "a network needs at least an input and an output layer, got {} dims",
                dims.len()
            )));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidConfig(format!("layer width at index {pos} must be >= 1")));
        }
        activation.validate()?;
        Ok(Self { dims, activation })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    /// Number of layers k (the input layer is layer 0).
    pub fn layer_count(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    /// Rows of the layer-l weight matrix, l in 1..=k.
    pub fn layer_rows(&self, layer: usize) -> usize {
        self.dims[layer]
    }

    /// Columns of the layer-l weight matrix (previous width plus bias).
    pub fn layer_cols(&self, layer: usize) -> usize {
        self.dims[layer - 1] + 1
    }

    /// Total parameter count p = sum over layers of n_l * (n_{l-1} + 1).
    pub fn param_count(&self) -> usize {
        (1..=self.layer_count()).map(|l| self.layer_rows(l) * self.layer_cols(l)).sum()
    }

    /// Range of layer l's block inside a flattened weight/gradient vector.
    pub fn layer_param_range(&self, layer: usize) -> std::ops::Range<usize> {
        let start: usize = (1..layer).map(|l| self.layer_rows(l) * self.layer_cols(l)).sum();
        start..start + self.layer_rows(layer) * self.layer_cols(layer)
    }
}

/// A weight matrix tagged with its 1-based layer index.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    layer: usize,
    data: Matrix,
}

impl WeightMatrix {
    pub fn new(layer: usize, data: Matrix) -> Self {
        assert!(layer >= 1, "layer indices are 1-based");
        Self { layer, data }
    }

    pub fn layer(&self) -> usize {
        self.layer
    }

    pub fn matrix(&self) -> &Matrix {
        &self.data
    }

    /// The synaptic block with the bias column removed.
    pub fn without_bias_column(&self) -> Matrix {
        self.data.drop_last_column()
    }
}

/// Checks that a weight list conforms to `spec`, naming the offending layer.
pub fn check_weights(spec: &NetworkSpec, weights: &[WeightMatrix]) -> Result<()> {
    if weights.len() != spec.layer_count() {
        return Err(Error::DimMismatch(format!(
            "expected {} weight matrices, got {}",
            spec.layer_count(),
            weights.len()
        )));
    }
    for (pos, w) in weights.iter().enumerate() {
        let layer = pos + 1;
        if w.layer() != layer {
            return Err(Error::LayerShape {
                layer,
                detail: format!("weight matrix at position {pos} is tagged layer {}", w.layer()),
            });
        }
        let (rows, cols) = (w.matrix().rows(), w.matrix().cols());
        if rows != spec.layer_rows(layer) || cols != spec.layer_cols(layer) {
            return Err(Error::LayerShape {
                layer,
                detail: format!(
                    "weight matrix is {rows}x{cols}, spec requires {}x{}",
                    spec.layer_rows(layer),
                    spec.layer_cols(layer)
                ),
            });
        }
    }
    Ok(())
}

/// The affine potential `W * (a; 1)`.
pub fn potential(weight: &WeightMatrix, activation: &Vector) -> Result<Vector> {
    if activation.dim() != weight.matrix().cols() - 1 {
        return Err(Error::LayerShape {
            layer: weight.layer(),
            detail: format!(
                "potential input has dim {}, weight matrix is {}x{}",
                activation.dim(),
                weight.matrix().rows(),
                weight.matrix().cols()
            ),
        });
    }
    Ok(weight.matrix().mul_vector(&activation.augment()))
}

/// Record of one forward pass: the input, every potential `z^l` (l = 1..k)
/// and every activation `a^l` (l = 0..k, with `a^0` the input itself).
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    potentials: Vec<Vector>,
    activations: Vec<Vector>,
}

impl ForwardTrace {
    pub fn input(&self) -> &Vector {
        &self.activations[0]
    }

    /// Network output `a^k`.
    pub fn output(&self) -> &Vector {
        self.activations.last().unwrap()
    }

    /// Potential `z^l` for l in 1..=k.
    pub fn potential(&self, layer: usize) -> &Vector {
        assert!(layer >= 1 && layer <= self.layer_count(), "potential layer index {layer} out of range");
        &self.potentials[layer - 1]
    }

    /// Activation `a^l` for l in 0..=k.
    pub fn activation(&self, layer: usize) -> &Vector {
        assert!(layer <= self.layer_count(), "activation layer index {layer} out of range");
        &self.activations[layer]
    }

    pub fn layer_count(&self) -> usize {
        self.potentials.len()
    }
}

/// Runs the network on `x`, recording every potential and activation.
pub fn forward(spec: &NetworkSpec, weights: &[WeightMatrix], x: &Vector) -> Result<ForwardTrace> {
    check_weights(spec, weights)?;
    if x.dim() != spec.input_dim() {
        return Err(Error::DimMismatch(format!(
            "input has dim {}, spec requires {}",
            x.dim(),
            spec.input_dim()
        )));
    }
    counters::record_forward_pass();

    let mut potentials = Vec::with_capacity(spec.layer_count());
    let mut activations = Vec::with_capacity(spec.layer_count() + 1);
    activations.push(x.clone());
    for w in weights {
        let z = potential(w, activations.last().unwrap())?;
        let a = spec.activation().componentwise(&z);
        potentials.push(z);
        activations.push(a);
    }
    Ok(ForwardTrace { potentials, activations })
}

//! Backpropagation in matrix form.
//!
//! Given a recorded forward pass, the backward pass computes the error
//! vectors
//!
//! ```text
//! delta^k = grad c_y(a^k) o sigma'(z^k)
//! delta^l = ((W^{l+1} without bias column)^T * delta^{l+1}) o sigma'(z^l)
//! ```
//!
//! (`o` the entrywise product) and from them the per-layer partial
//! gradients `vec(delta^l * (a^{l-1}; 1)^T)`, with `a^0 = x`. Stacking the
//! per-layer blocks in layer order yields the full gradient of the
//! exemplar cost with respect to the flat weight vector.
//!
//! The top-layer error is computed directly as the cost gradient times the
//! activation derivative; spelling the initialization as an extra
//! `(1 0)`-weighted virtual layer would only introduce an ill-typed
//! 1 x 1-matrix-times-vector product under strict dimension checking.

use crate::cost::{cost_gradient, CostKind, TrainingSet, WeightVector};
use crate::counters;
use crate::error::{Error, Result};
use crate::network::{forward, ForwardTrace, NetworkSpec, WeightMatrix};
use crate::tensor::Vector;

/// Per-layer error vectors and vectorized partial gradients from one
/// backward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct BackpropTrace {
    deltas: Vec<Vector>,
    partial_gradients: Vec<Vector>,
}

impl BackpropTrace {
    /// Error vector `delta^l` for l in 1..=k.
    pub fn delta(&self, layer: usize) -> &Vector {
        assert!(layer >= 1 && layer <= self.deltas.len(), "delta layer index {layer} out of range");
        &self.deltas[layer - 1]
    }

    /// Vectorized partial gradient for layer l in 1..=k, dim
    /// `n_l * (n_{l-1} + 1)`.
    pub fn partial_gradient(&self, layer: usize) -> &Vector {
        assert!(
            layer >= 1 && layer <= self.partial_gradients.len(),
            "partial gradient layer index {layer} out of range"
        );
        &self.partial_gradients[layer - 1]
    }

    pub fn layer_count(&self) -> usize {
        self.deltas.len()
    }

    /// Concatenates the per-layer blocks into the full gradient vector.
    pub fn into_gradient_vector(self, spec: &NetworkSpec) -> GradientVector {
        let mut data = Vec::with_capacity(spec.param_count());
        for g in &self.partial_gradients {
            data.extend_from_slice(g.as_slice());
        }
        GradientVector { spec: spec.clone(), data: Vector::from_vec(data) }
    }
}

/// Gradient of an exemplar or additive cost in the flat weight-vector
/// layout (layer-ordered, column-major blocks).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector {
    spec: NetworkSpec,
    data: Vector,
}

impl GradientVector {
    pub fn new(spec: NetworkSpec, data: Vector) -> Result<Self> {
        if data.dim() != spec.param_count() {
            return Err(Error::DimMismatch(format!(
                "gradient vector has dim {}, spec requires p = {}",
                data.dim(),
                spec.param_count()
            )));
        }
        Ok(Self { spec, data })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn as_vector(&self) -> &Vector {
        &self.data
    }

    pub fn as_slice(&self) -> &[f64] {
        self.data.as_slice()
    }

    /// The layer-l block of the gradient.
    pub fn layer_block(&self, layer: usize) -> &[f64] {
        &self.data.as_slice()[self.spec.layer_param_range(layer)]
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }

    pub fn max_abs_diff(&self, other: &GradientVector) -> f64 {
        self.data.max_abs_diff(&other.data)
    }
}

fn check_backward_inputs(
    spec: &NetworkSpec,
    trace: &ForwardTrace,
    y: &Vector,
) -> Result<()> {
    if trace.layer_count() != spec.layer_count() {
        return Err(Error::DimMismatch(format!(
            "trace has {} layers, spec has {}",
            trace.layer_count(),
            spec.layer_count()
        )));
    }
    for l in 1..=spec.layer_count() {
        if trace.potential(l).dim() != spec.layer_rows(l) {
            return Err(Error::LayerShape {
                layer: l,
                detail: format!(
                    "trace potential has dim {}, spec requires {}",
                    trace.potential(l).dim(),
                    spec.layer_rows(l)
                ),
            });
        }
    }
    if y.dim() != spec.output_dim() {
        return Err(Error::DimMismatch(format!(
            "target has dim {}, spec output dim is {}",
            y.dim(),
            spec.output_dim()
        )));
    }
    Ok(())
}

/// Backward pass seeded by an arbitrary cost-gradient vector at the output.
///
/// `backward` seeds this with the actual cost gradient; tests use it to
/// verify that the recursion is linear in its seed.
pub(crate) fn backward_from_seed(
    spec: &NetworkSpec,
    weights: &[WeightMatrix],
    trace: &ForwardTrace,
    seed_gradient: &Vector,
) -> Result<BackpropTrace> {
    counters::record_backward_pass();
    let k = spec.layer_count();

    let mut deltas = vec![Vector::zeros(1); k];
    let mut partial_gradients = vec![Vector::zeros(1); k];

    let sigma_prime_k = spec.activation().componentwise_derivative(trace.potential(k));
    deltas[k - 1] = seed_gradient.hadamard(&sigma_prime_k);

    for l in (1..k).rev() {
        let propagated = weights[l].without_bias_column().transpose().mul_vector(&deltas[l]);
        let sigma_prime = spec.activation().componentwise_derivative(trace.potential(l));
        deltas[l - 1] = propagated.hadamard(&sigma_prime);
    }

    for l in 1..=k {
        let row = trace.activation(l - 1).augment();
        partial_gradients[l - 1] = deltas[l - 1].outer(&row).vectorize();
    }

    Ok(BackpropTrace { deltas, partial_gradients })
}

/// Backward pass over a recorded forward trace.
///
/// The trace must come from `forward` on the same spec and weights; the
/// pass reads but never mutates it.
pub fn backward(
    spec: &NetworkSpec,
    weights: &[WeightMatrix],
    kind: CostKind,
    trace: &ForwardTrace,
    y: &Vector,
) -> Result<BackpropTrace> {
    crate::network::check_weights(spec, weights)?;
    check_backward_inputs(spec, trace, y)?;
    let seed = cost_gradient(kind, y, trace.output())?;
    backward_from_seed(spec, weights, trace, &seed)
}

/// Full exemplar-cost gradient via one fused forward + backward pass.
pub fn full_gradient(
    spec: &NetworkSpec,
    weights: &[WeightMatrix],
    kind: CostKind,
    x: &Vector,
    y: &Vector,
) -> Result<GradientVector> {
    let trace = forward(spec, weights, x)?;
    let bp = backward(spec, weights, kind, &trace, y)?;
    Ok(bp.into_gradient_vector(spec))
}

/// Mean exemplar gradient over a training set, accumulated in exemplar
/// order (without the learning-rate factor).
pub fn batch_gradient(
    weight_vector: &WeightVector,
    kind: CostKind,
    set: &TrainingSet,
) -> Result<GradientVector> {
    set.conforms_to(weight_vector.spec())?;
    let spec = weight_vector.spec();
    let weights = weight_vector.unflatten();
    let mut total = vec![0.0; spec.param_count()];
    for (x, y) in set.iter() {
        let g = full_gradient(spec, &weights, kind, x, y)?;
        for (t, v) in total.iter_mut().zip(g.as_slice()) {
            *t += v;
        }
    }
    let n = set.len() as f64;
    GradientVector::new(spec.clone(), Vector::from_vec(total.into_iter().map(|t| t / n).collect()))
}

/// Mean gradient over an explicit subset of exemplar indices, in the given
/// index order.
pub fn subset_gradient(
    weight_vector: &WeightVector,
    kind: CostKind,
    set: &TrainingSet,
    indices: &[usize],
) -> Result<GradientVector> {
    if indices.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    set.conforms_to(weight_vector.spec())?;
    let spec = weight_vector.spec();
    let weights = weight_vector.unflatten();
    let mut total = vec![0.0; spec.param_count()];
    for &i in indices {
        let (x, y) = set.exemplar(i);
        let g = full_gradient(spec, &weights, kind, x, y)?;
        for (t, v) in total.iter_mut().zip(g.as_slice()) {
            *t += v;
        }
    }
    let n = indices.len() as f64;
    GradientVector::new(spec.clone(), Vector::from_vec(total.into_iter().map(|t| t / n).collect()))
}

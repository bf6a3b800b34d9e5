//! Independent gradient computations used only for verification.
//!
//! Three routes to the same partial gradients, none of which shares code
//! with the backward pass:
//!
//! - difference quotients of the exemplar cost, one weight coordinate at a
//!   time (`finite_difference_gradient`);
//! - an explicit product of per-stage Jacobian matrices
//!   (`chain_rule_gradient`), built from the closed-form Jacobians of the
//!   potential and activation maps;
//! - literal transcriptions of the three-layer closed-form gradient
//!   expressions (`base_case_closed_form`).
//!
//! Agreement of all three with the backward pass is the artifact's core
//! check; the comparisons live in the test suites.

use crate::cost::{cost_gradient, exemplar_cost, CostKind};
use crate::error::{Error, Result};
use crate::network::{forward, NetworkSpec, WeightMatrix};
use crate::tensor::{Matrix, Vector};

/// Difference-quotient flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffScheme {
    /// One-sided quotient `(c(w + eps) - c(w)) / eps`; costs `1 + p`
    /// evaluations of the exemplar cost.
    Forward,
    /// Symmetric quotient `(c(w + eps) - c(w - eps)) / (2 eps)`; the oracle
    /// of record, with error quadratic in the step.
    Central,
}

/// Step size and scheme for the difference-quotient gradient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiniteDiffConfig {
    epsilon: f64,
    scheme: DiffScheme,
}

impl FiniteDiffConfig {
    pub fn new(epsilon: f64, scheme: DiffScheme) -> Result<Self> {
        if !(1e-9..=1e-3).contains(&epsilon) {
            return Err(Error::InvalidConfig(format!(
                "finite-difference step must lie in [1e-9, 1e-3], got {epsilon}"
            )));
        }
        Ok(Self { epsilon, scheme })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn scheme(&self) -> DiffScheme {
        self.scheme
    }
}

impl Default for FiniteDiffConfig {
    fn default() -> Self {
        Self { epsilon: 1e-6, scheme: DiffScheme::Central }
    }
}

/// Difference-quotient approximation of the exemplar-cost gradient, in the
/// flat layer-ordered column-major layout.
pub fn finite_difference_gradient(
    spec: &NetworkSpec,
    weights: &[WeightMatrix],
    kind: CostKind,
    x: &Vector,
    y: &Vector,
    cfg: &FiniteDiffConfig,
) -> Result<crate::backprop::GradientVector> {
    crate::network::check_weights(spec, weights)?;
    let eps = cfg.epsilon;
    let base = match cfg.scheme {
        DiffScheme::Forward => Some(exemplar_cost(spec, weights, kind, x, y)?),
        DiffScheme::Central => None,
    };

    let mut entries = Vec::with_capacity(spec.param_count());
    for l in 1..=spec.layer_count() {
        let w = weights[l - 1].matrix();
        // Column-major coordinate order matches the flattened layout.
        for j in 0..w.cols() {
            for i in 0..w.rows() {
                let at = |value: f64| -> Result<f64> {
                    let mut perturbed = weights.to_vec();
                    perturbed[l - 1] = WeightMatrix::new(l, w.with_entry(i, j, value));
                    exemplar_cost(spec, &perturbed, kind, x, y)
                };
                let w_ij = w[(i, j)];
                let quotient = match cfg.scheme {
                    DiffScheme::Forward => (at(w_ij + eps)? - base.unwrap()) / eps,
                    DiffScheme::Central => (at(w_ij + eps)? - at(w_ij - eps)?) / (2.0 * eps),
                };
                entries.push(quotient);
            }
        }
    }
    crate::backprop::GradientVector::new(spec.clone(), Vector::from_vec(entries))
}

/// Jacobian of the potential map as a function of its weight matrix, at a
/// fixed input activation `a`: `(a^T 1) kron I_m`, shape `m x m(n + 1)`.
pub fn jacobian_potential_wrt_weights(a: &Vector, m: usize) -> Matrix {
    Matrix::row_from(&a.augment()).kron(&Matrix::identity(m))
}

/// Jacobian of the potential map as a function of its input activation, at
/// a fixed weight matrix: the weight matrix without its bias column.
pub fn jacobian_potential_wrt_activation(weight: &WeightMatrix) -> Matrix {
    weight.without_bias_column()
}

/// Jacobian of the componentwise activation map: `diag(sigma'(z))`.
pub fn jacobian_activation(kind: crate::network::ActivationKind, z: &Vector) -> Matrix {
    kind.componentwise_derivative(z).diag()
}

/// Partial gradient for one layer as an explicit transposed product of
/// Jacobian matrices:
///
/// ```text
/// (Dc_y(a^k) . DSigma(z^k) . W^k_bullet . ... . DSigma(z^l) . ((a^{l-1};1)^T kron I))^T
/// ```
pub fn chain_rule_gradient(
    spec: &NetworkSpec,
    weights: &[WeightMatrix],
    kind: CostKind,
    x: &Vector,
    y: &Vector,
    layer: usize,
) -> Result<Vector> {
    let k = spec.layer_count();
    if layer < 1 || layer > k {
        return Err(Error::InvalidConfig(format!("layer index {layer} out of range 1..={k}")));
    }
    let trace = forward(spec, weights, x)?;
    let activation = spec.activation();

    // Row Jacobian of the cost at the output.
    let mut acc = Matrix::row_from(&cost_gradient(kind, y, trace.output())?);

    // Walk down through the fixed-weight stages above the target layer.
    for m in ((layer + 1)..=k).rev() {
        acc = acc
            .matmul(&jacobian_activation(activation, trace.potential(m)))
            .matmul(&jacobian_potential_wrt_activation(&weights[m - 1]));
    }

    // Final stage: activation at the target layer, then the potential as a
    // function of its weight matrix.
    acc = acc.matmul(&jacobian_activation(activation, trace.potential(layer))).matmul(
        &jacobian_potential_wrt_weights(trace.activation(layer - 1), spec.layer_rows(layer)),
    );

    Ok(acc.transpose().column(0))
}

/// The three-layer closed-form partial gradients, transcribed term by term:
///
/// ```text
/// vec((grad_c o s3) . (a^2; 1)^T)
/// vec((((W^3_bullet)^T . (grad_c o s3)) o s2) . (a^1; 1)^T)
/// vec((((W^2_bullet)^T . (((W^3_bullet)^T . (grad_c o s3)) o s2)) o s1) . (x; 1)^T)
/// ```
///
/// with `s_l` the vector of activation derivatives at `z^l`. Only defined
/// for networks with exactly three layers.
pub fn base_case_closed_form(
    spec: &NetworkSpec,
    weights: &[WeightMatrix],
    kind: CostKind,
    x: &Vector,
    y: &Vector,
) -> Result<(Vector, Vector, Vector)> {
    if spec.layer_count() != 3 {
        return Err(Error::InvalidConfig(format!(
            "closed-form expressions require exactly 3 layers, spec has {}",
            spec.layer_count()
        )));
    }
    let trace = forward(spec, weights, x)?;
    let activation = spec.activation();

    let grad_c = cost_gradient(kind, y, trace.output())?;
    let s3 = activation.componentwise_derivative(trace.potential(3));
    let s2 = activation.componentwise_derivative(trace.potential(2));
    let s1 = activation.componentwise_derivative(trace.potential(1));
    let w3_bullet_t = weights[2].without_bias_column().transpose();
    let w2_bullet_t = weights[1].without_bias_column().transpose();

    let grad_w3 = grad_c
        .hadamard(&s3)
        .outer(&trace.activation(2).augment())
        .vectorize();

    let grad_w2 = w3_bullet_t
        .mul_vector(&grad_c.hadamard(&s3))
        .hadamard(&s2)
        .outer(&trace.activation(1).augment())
        .vectorize();

    let grad_w1 = w2_bullet_t
        .mul_vector(&w3_bullet_t.mul_vector(&grad_c.hadamard(&s3)).hadamard(&s2))
        .hadamard(&s1)
        .outer(&trace.activation(0).augment())
        .vectorize();

    Ok((grad_w1, grad_w2, grad_w3))
}

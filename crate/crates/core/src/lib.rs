//! Backpropagation in matrix form for k-layered feedforward networks.
//!
//! The library builds networks out of affine potentials
//! `z^l = W^l (a^{l-1}; 1)` and componentwise activations, computes exact
//! cost gradients with the matrix-form backward recursion, and ships the
//! machinery to verify those gradients against fully independent routes:
//! difference quotients, explicit Jacobian chain-rule products, and the
//! three-layer closed forms. A small gradient-descent trainer and a
//! Gaussian-mixture sampler round out a reproducible binary-classification
//! experiment.
//!
//! Layout contract used throughout: flat weight and gradient vectors stack
//! per-layer blocks in layer order, each block the column-major
//! vectorization of its matrix.

pub mod backprop;
pub mod cost;
pub mod counters;
pub mod datagen;
pub mod error;
pub mod network;
pub mod oracles;
pub mod rng;
pub mod tensor;
pub mod train;

pub use backprop::{backward, batch_gradient, full_gradient, BackpropTrace, GradientVector};
pub use cost::{
    additive_cost, cost_gradient, cost_value, exemplar_cost, flatten, CostKind, TrainingSet,
    WeightVector,
};
pub use error::{Error, Result};
pub use network::{
    forward, potential, ActivationKind, ForwardTrace, NetworkSpec, WeightMatrix,
};
pub use oracles::{
    base_case_closed_form, chain_rule_gradient, finite_difference_gradient, DiffScheme,
    FiniteDiffConfig,
};
pub use tensor::{unvectorize, Matrix, Vector};
pub use train::{
    gradient_descent, init_weights, predict_accuracy, TrainConfig, TrainMode, TrainRecord,
};

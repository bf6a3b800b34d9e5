use thiserror::Error;

/// Errors surfaced by fallible library operations.
///
/// Shape preconditions on the low-level tensor primitives are treated as
/// programmer error and panic via `assert!`; this enum covers conditions
/// that depend on runtime data (network/weight conformance, cost domains,
/// training-set contents, configuration values).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A weight matrix or vector does not conform to the network spec.
    #[error("layer {layer}: {detail}")]
    LayerShape { layer: usize, detail: String },

    /// A vector has the wrong dimension for the requested operation.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    /// Cross-entropy evaluated at an activation outside (0, 1).
    #[error("cross-entropy domain error: activation[{index}] = {value} is not in (0, 1)")]
    CostDomain { index: usize, value: f64 },

    /// An operation that averages over exemplars received an empty set.
    #[error("training set is empty")]
    EmptyTrainingSet,

    /// Accuracy was requested for a target that is not one-hot.
    #[error("target vector is not one-hot: {0}")]
    NonOneHotTarget(String),

    /// A configuration value violates its documented range.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

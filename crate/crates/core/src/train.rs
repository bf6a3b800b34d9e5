//! Gradient descent over the additive cost, with per-iteration metric
//! capture (cost, gradient, weight displacement, training accuracy).

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::backprop::{batch_gradient, subset_gradient, GradientVector};
use crate::cost::{additive_cost, CostKind, TrainingSet, WeightVector};
use crate::error::{Error, Result};
use crate::network::NetworkSpec;
use crate::rng::NormalSource;
use crate::tensor::Vector;

/// Whether each step averages over all exemplars or a sampled subset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainMode {
    /// Use every exemplar on every step.
    Batch,
    /// Sample `batch_size` exemplars without replacement each step, from a
    /// stream seeded by `rng_seed`.
    Stochastic { batch_size: usize, rng_seed: u64 },
}

/// Gradient-descent configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    alpha: f64,
    iterations: usize,
    mode: TrainMode,
    record_metrics: bool,
    gradient_norm_stop: Option<f64>,
}

impl TrainConfig {
    pub fn new(alpha: f64, iterations: usize, mode: TrainMode, record_metrics: bool) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::InvalidConfig(format!("learning rate must be > 0, got {alpha}")));
        }
        if iterations < 1 {
            return Err(Error::InvalidConfig("iteration count must be >= 1".into()));
        }
        if let TrainMode::Stochastic { batch_size, .. } = mode {
            if batch_size < 1 {
                return Err(Error::InvalidConfig("stochastic batch size must be >= 1".into()));
            }
        }
        Ok(Self { alpha, iterations, mode, record_metrics, gradient_norm_stop: None })
    }

    /// Full-batch descent with metric recording, 100 iterations.
    pub fn batch(alpha: f64) -> Result<Self> {
        Self::new(alpha, 100, TrainMode::Batch, true)
    }

    /// Also stop early once the update gradient norm drops below `tol`.
    pub fn with_gradient_norm_stop(mut self, tol: f64) -> Self {
        self.gradient_norm_stop = Some(tol);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn mode(&self) -> TrainMode {
        self.mode
    }

    pub fn record_metrics(&self) -> bool {
        self.record_metrics
    }
}

/// Metrics captured at one iterate (before any further update).
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub cost: f64,
    /// Mean gradient over the full training set at this iterate.
    pub gradient: GradientVector,
    pub gradient_norm: f64,
    /// Current weights minus the initial weights.
    pub displacement: Vector,
    /// Fraction of correctly classified training exemplars.
    pub accuracy: f64,
}

/// Per-iteration metric trace; row j describes the weights after j updates,
/// so a full run has `iterations + 1` rows starting at the initial weights.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainRecord {
    records: Vec<IterationRecord>,
}

impl TrainRecord {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, IterationRecord> {
        self.records.iter()
    }

    pub fn record(&self, j: usize) -> &IterationRecord {
        &self.records[j]
    }

    pub fn costs(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.cost).collect()
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.accuracy).collect()
    }
}

/// Samples an initial weight vector with i.i.d. standard-normal entries,
/// drawn in flat layout order from the seeded stream.
pub fn init_weights(spec: &NetworkSpec, seed: u64) -> WeightVector {
    let mut src = NormalSource::new(seed);
    let data = Vector::from_fn(spec.param_count(), |_| src.next_normal());
    WeightVector::new(spec.clone(), data).expect("dimension correct by construction")
}

/// Fraction of exemplars whose predicted class (argmax of the network
/// output, ties to the lowest index) matches the one-hot target class.
pub fn predict_accuracy(weight_vector: &WeightVector, set: &TrainingSet) -> Result<f64> {
    let spec = weight_vector.spec();
    if spec.output_dim() < 2 {
        return Err(Error::InvalidConfig(format!(
            "accuracy requires at least 2 output classes, spec has {}",
            spec.output_dim()
        )));
    }
    set.conforms_to(spec)?;
    let weights = weight_vector.unflatten();
    let mut correct = 0usize;
    for (i, (x, y)) in set.iter().enumerate() {
        let class = one_hot_class(y).ok_or_else(|| {
            Error::NonOneHotTarget(format!("exemplar {i} target {y}"))
        })?;
        let trace = crate::network::forward(spec, &weights, x)?;
        if trace.output().argmax() == class {
            correct += 1;
        }
    }
    Ok(correct as f64 / set.len() as f64)
}

fn one_hot_class(y: &Vector) -> Option<usize> {
    let mut hot = None;
    for i in 0..y.dim() {
        if y[i] == 1.0 {
            if hot.is_some() {
                return None;
            }
            hot = Some(i);
        } else if y[i] != 0.0 {
            return None;
        }
    }
    hot
}

/// Runs gradient descent from `init`, returning the final weights and the
/// metric trace (empty when metric recording is off).
///
/// Each update is `W := W - alpha * g` with `g` the mean gradient over the
/// step's exemplars. Iterations are sequential; metrics at row j are
/// evaluated before the j+1st update, so row 0 reflects the initial
/// weights.
pub fn gradient_descent(
    init: &WeightVector,
    kind: CostKind,
    set: &TrainingSet,
    cfg: &TrainConfig,
) -> Result<(WeightVector, TrainRecord)> {
    set.conforms_to(init.spec())?;
    let spec = init.spec().clone();

    let mut subset_rng = match cfg.mode {
        TrainMode::Stochastic { batch_size, rng_seed } => {
            if batch_size > set.len() {
                return Err(Error::InvalidConfig(format!(
                    "stochastic batch size {batch_size} exceeds training set size {}",
                    set.len()
                )));
            }
            Some(ChaCha8Rng::seed_from_u64(rng_seed))
        }
        TrainMode::Batch => None,
    };

    let mut current = init.clone();
    let mut record = TrainRecord::default();

    for j in 0..=cfg.iterations {
        let update_gradient = if j < cfg.iterations {
            Some(match cfg.mode {
                TrainMode::Batch => batch_gradient(&current, kind, set)?,
                TrainMode::Stochastic { batch_size, .. } => {
                    let rng = subset_rng.as_mut().unwrap();
                    let indices = index::sample(rng, set.len(), batch_size).into_vec();
                    subset_gradient(&current, kind, set, &indices)?
                }
            })
        } else {
            None
        };

        if cfg.record_metrics {
            // Metrics always describe the full set, whatever the update uses.
            let full_gradient = match (&cfg.mode, &update_gradient) {
                (TrainMode::Batch, Some(g)) => g.clone(),
                _ => batch_gradient(&current, kind, set)?,
            };
            record.records.push(IterationRecord {
                cost: additive_cost(&current, kind, set)?,
                gradient_norm: full_gradient.norm(),
                gradient: full_gradient,
                displacement: current.as_vector().sub(init.as_vector()),
                accuracy: predict_accuracy(&current, set)?,
            });
        }

        if let Some(g) = update_gradient {
            if let Some(tol) = cfg.gradient_norm_stop {
                if g.norm() < tol {
                    break;
                }
            }
            let stepped = current.as_vector().sub(&g.as_vector().scale(cfg.alpha));
            current = WeightVector::new(spec.clone(), stepped)?;
        }
    }

    Ok((current, record))
}

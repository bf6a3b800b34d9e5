//! Synthetic binary-classification data: balanced one-hot labels with
//! class-conditional spherical Gaussian features.
//!
//! Each exemplar draws its label first (uniform over the two one-hot
//! vectors) and then its feature pair, so the random stream is consumed
//! strictly in exemplar order and a seed pins the whole set.

use crate::cost::TrainingSet;
use crate::error::{Error, Result};
use crate::rng::NormalSource;
use crate::tensor::Vector;

/// Configuration for the two-component Gaussian mixture.
///
/// Labels are uniform over `{(1,0), (0,1)}`; a `(1,0)` label selects
/// `mu0`, a `(0,1)` label selects `mu1`. Features are drawn from a
/// Gaussian with the selected mean and covariance `sigma_scale * I`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureConfig {
    n: usize,
    mu0: [f64; 2],
    mu1: [f64; 2],
    sigma_scale: f64,
    rng_seed: u64,
}

impl MixtureConfig {
    pub fn new(n: usize, mu0: [f64; 2], mu1: [f64; 2], sigma_scale: f64, rng_seed: u64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidConfig("sample count must be >= 1".into()));
        }
        if !sigma_scale.is_finite() || sigma_scale <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "covariance scale must be > 0, got {sigma_scale}"
            )));
        }
        Ok(Self { n, mu0, mu1, sigma_scale, rng_seed })
    }

    /// 200 samples, means at (-1, -1) and (1, 1), covariance 0.5 * I.
    pub fn with_seed(rng_seed: u64) -> Self {
        Self { n: 200, mu0: [-1.0, -1.0], mu1: [1.0, 1.0], sigma_scale: 0.5, rng_seed }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma_scale(&self) -> f64 {
        self.sigma_scale
    }
}

/// Samples `cfg.n` (feature, one-hot label) pairs.
pub fn sample_training_set(cfg: &MixtureConfig) -> TrainingSet {
    let mut src = NormalSource::new(cfg.rng_seed);
    let std = cfg.sigma_scale.sqrt();
    let mut exemplars = Vec::with_capacity(cfg.n);
    for _ in 0..cfg.n {
        let class_zero = src.next_uniform() < 0.5;
        let (y, mu) = if class_zero {
            (Vector::from_slice(&[1.0, 0.0]), cfg.mu0)
        } else {
            (Vector::from_slice(&[0.0, 1.0]), cfg.mu1)
        };
        let (e1, e2) = src.next_pair();
        let x = Vector::from_slice(&[mu[0] + std * e1, mu[1] + std * e2]);
        exemplars.push((x, y));
    }
    TrainingSet::new(exemplars).expect("n >= 1 by construction")
}

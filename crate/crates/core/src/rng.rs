//! Seeded randomness with a frozen byte stream.
//!
//! All stochastic pieces of the library (data sampling, weight
//! initialization, minibatch selection) draw from a ChaCha8 stream seeded
//! by a 64-bit value, with standard normals produced by the Marsaglia
//! polar transform. Both choices are pinned so that a given seed
//! reproduces identical values across runs and platforms.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Standard-normal sampler over a seeded ChaCha8 stream.
///
/// The polar transform produces normals in pairs; `next` hands out the
/// cached second value before touching the underlying stream again.
#[derive(Debug, Clone)]
pub struct NormalSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSource {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), spare: None }
    }

    /// One uniform draw in [0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// One pair of independent standard normals (Marsaglia polar method).
    pub fn next_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.next_uniform() - 1.0;
            let v = 2.0 * self.next_uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * s.ln() / s).sqrt();
                return (u * f, v * f);
            }
        }
    }

    /// One standard normal.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (a, b) = self.next_pair();
        self.spare = Some(b);
        a
    }

    /// Access to the underlying stream, for non-normal draws such as
    /// subset sampling.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

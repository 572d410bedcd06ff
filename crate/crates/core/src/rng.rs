//! Reproducible randomness for parallel Monte Carlo.
//!
//! Every trajectory owns a ChaCha8 stream keyed by `(seed, stream id)`, so an
//! ensemble produces bit-identical output whether trajectories run
//! sequentially or on any number of threads. Distinct ensembles inside one
//! experiment take disjoint stream blocks via [`ensemble_stream`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::Point;

/// Stream ids are partitioned in blocks of 2^40 per ensemble, far above any
/// realistic trajectory count.
pub fn ensemble_stream(ensemble: u64, trajectory: u64) -> u64 {
    debug_assert!(trajectory < 1 << 40);
    (ensemble << 40) | trajectory
}

/// RNG for one trajectory: a ChaCha8 stream addressed by (seed, stream).
#[derive(Clone)]
pub struct TrajectoryRng {
    rng: ChaCha8Rng,
}

impl TrajectoryRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        TrajectoryRng { rng }
    }

    /// Standard normal vector of dimension `n`.
    pub fn normal_vec(&mut self, n: usize) -> Point {
        (0..n).map(|_| self.rng.sample(StandardNormal)).collect()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform in [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Exponential with the given rate (mean 1/rate).
    pub fn exponential(&mut self, rate: f64) -> f64 {
        let u: f64 = self.rng.random::<f64>();
        // 1-u is in (0,1], so the log is finite.
        -(1.0 - u).ln() / rate
    }
}

//! Seeded uniform sampling of the constrained simplex `D_n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::polygon::{AngleVector, GEOMETRIC_BOUND};

/// Draws per sample before giving up.
pub const DEFAULT_MAX_ATTEMPTS: usize = 100_000;

/// Uniform sampler on `{theta : sum = total, margin < theta_i < bound - margin}`.
///
/// Points are drawn from the symmetric unit-concentration Dirichlet (normalised
/// exponentials) scaled to `total`, and rejected until every coordinate clears
/// the margin. Rejection keeps the conditional distribution uniform.
#[derive(Debug, Clone)]
pub struct SimplexSampler {
    n: usize,
    total: f64,
    bound: f64,
    margin: f64,
    max_attempts: usize,
    rng: ChaCha8Rng,
}

impl SimplexSampler {
    pub fn new(n: usize, total: f64, bound: f64, margin: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
        }
        if !(margin > 0.0) {
            return Err(Error::InvalidArgument(format!("margin must be positive, got {margin}")));
        }
        let sigma = total / n as f64;
        let upper = bound - margin;
        if !(sigma > margin && sigma < upper) {
            return Err(Error::InfeasibleMargin {
                margin,
                sigma,
                upper,
            });
        }
        Ok(SimplexSampler {
            n,
            total,
            bound,
            margin,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Geometric sampler: angles in `(margin, pi/2 - margin)`.
    pub fn geometric(n: usize, total: f64, margin: f64, seed: u64) -> Result<Self> {
        Self::new(n, total, GEOMETRIC_BOUND, margin, seed)
    }

    pub fn with_max_attempts(mut self, max_attempts: usize) -> Self {
        self.max_attempts = max_attempts.max(1);
        self
    }

    pub fn sample(&mut self) -> Result<AngleVector> {
        let lo = self.margin;
        let hi = self.bound - self.margin;
        let mut weights = vec![0.0; self.n];
        for _ in 0..self.max_attempts {
            for w in weights.iter_mut() {
                *w = Exp1.sample(&mut self.rng);
            }
            let sum: f64 = weights.iter().sum();
            let values: Vec<f64> = weights.iter().map(|w| self.total * w / sum).collect();
            if values.iter().all(|&v| v > lo && v < hi) {
                return AngleVector::new(values, self.total, self.bound);
            }
        }
        Err(Error::RejectionBudgetExceeded {
            attempts: self.max_attempts,
            margin: self.margin,
        })
    }

    /// Draws `count` points in sequence.
    pub fn take(&mut self, count: usize) -> Result<Vec<AngleVector>> {
        (0..count).map(|_| self.sample()).collect()
    }
}

/// One geometric sample (angles in `(margin, pi/2 - margin)`) for the given seed.
pub fn sample_simplex(n: usize, total: f64, margin: f64, seed: u64) -> Result<AngleVector> {
    SimplexSampler::geometric(n, total, margin, seed)?.sample()
}

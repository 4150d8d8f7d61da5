//! Seeded Monte Carlo area estimates over balls.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::geometry::Ball;
use crate::math;

/// Mix a base seed with two stream indices (splitmix64 finaliser).
pub fn derive_seed(base: u64, a: u64, b: u64) -> u64 {
    let mut x = base ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xD1B5_4A32_D192_ED03);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

pub struct BallSampler {
    rng: ChaCha8Rng,
    ball: Ball,
}

impl BallSampler {
    pub fn new(ball: Ball, seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), ball }
    }

    fn unit(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform point in the open ball.
    pub fn sample(&mut self) -> Complex64 {
        loop {
            let x = 2.0 * self.unit() - 1.0;
            let y = 2.0 * self.unit() - 1.0;
            if x * x + y * y < 1.0 {
                return self.ball.center + Complex64::new(x, y) * self.ball.radius;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub samples: u64,
    pub hits: u64,
    /// Fraction of the ball's area that satisfies the predicate.
    pub fraction: f64,
    pub fraction_stderr: f64,
}

impl Estimate {
    pub fn from_counts(samples: u64, hits: u64) -> Self {
        let n = samples.max(1) as f64;
        let p = hits as f64 / n;
        Self { samples, hits, fraction: p, fraction_stderr: math::sqrt(p * (1.0 - p) / n) }
    }

    pub fn area(&self, ball: &Ball) -> f64 {
        self.fraction * ball.area()
    }

    pub fn area_stderr(&self, ball: &Ball) -> f64 {
        self.fraction_stderr * ball.area()
    }
}

/// Estimate `μ(ball ∩ {pred})` from `n` uniform samples.
pub fn estimate(ball: &Ball, n: u64, seed: u64, mut pred: impl FnMut(Complex64) -> bool) -> Estimate {
    let mut s = BallSampler::new(*ball, seed);
    let mut hits = 0u64;
    for _ in 0..n {
        if pred(s.sample()) {
            hits += 1;
        }
    }
    Estimate::from_counts(n, hits)
}

/// Joint estimate of two nested predicates `inner ⊂ outer` on the same
/// sample stream, returning `(outer hits, inner hits, samples)`.
pub fn count_pair(
    ball: &Ball,
    n: u64,
    seed: u64,
    mut outer: impl FnMut(Complex64) -> bool,
    mut inner: impl FnMut(Complex64) -> bool,
) -> (u64, u64) {
    let mut s = BallSampler::new(*ball, seed);
    let (mut a, mut b) = (0u64, 0u64);
    for _ in 0..n {
        let z = s.sample();
        if outer(z) {
            a += 1;
            if inner(z) {
                b += 1;
            }
        }
    }
    (a, b)
}

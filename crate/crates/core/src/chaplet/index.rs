use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::geometry::Ball;
use crate::math;

/// Uniform bucket grid over `[-1, 1]²` listing, per bucket, the ascending
/// indices of the balls (grown by `pad`) that meet it.
#[derive(Debug, Clone)]
pub struct BallIndex {
    n: usize,
    buckets: Vec<Vec<u32>>,
}

impl BallIndex {
    pub fn new(balls: &[Ball], pad: f64, n: usize) -> Self {
        let n = n.max(1);
        let mut buckets = vec![Vec::new(); n * n];
        let cell = 2.0 / n as f64;
        for (i, b) in balls.iter().enumerate() {
            let r = b.radius + pad;
            let lo = |v: f64| (math::floor((v - r + 1.0) / cell).max(0.0) as usize).min(n - 1);
            let hi = |v: f64| (math::floor((v + r + 1.0) / cell).max(0.0) as usize).min(n - 1);
            for bx in lo(b.center.re)..=hi(b.center.re) {
                for by in lo(b.center.im)..=hi(b.center.im) {
                    buckets[by * n + bx].push(i as u32);
                }
            }
        }
        Self { n, buckets }
    }

    pub fn candidates(&self, z: Complex64) -> &[u32] {
        let cell = 2.0 / self.n as f64;
        let bx = math::floor((z.re + 1.0) / cell);
        let by = math::floor((z.im + 1.0) / cell);
        if bx < 0.0 || by < 0.0 || bx >= self.n as f64 || by >= self.n as f64 {
            return &[];
        }
        &self.buckets[by as usize * self.n + bx as usize]
    }

    /// Union of candidates over the buckets meeting an axis-aligned box.
    pub fn candidates_in(&self, x0: f64, y0: f64, x1: f64, y1: f64, out: &mut Vec<u32>) {
        out.clear();
        let cell = 2.0 / self.n as f64;
        let clamp = |v: f64| (math::floor((v + 1.0) / cell).max(0.0) as usize).min(self.n - 1);
        for by in clamp(y0)..=clamp(y1) {
            for bx in clamp(x0)..=clamp(x1) {
                out.extend_from_slice(&self.buckets[by * self.n + bx]);
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}

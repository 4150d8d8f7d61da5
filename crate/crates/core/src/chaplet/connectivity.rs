use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ChapletSet;
use crate::geometry::Rect;

/// Grid flood fill showing `Ū \ A` reaches `∂U` from every cell where it is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityCertificate {
    pub step: f64,
    pub passable: usize,
    pub reached: usize,
    pub shells: usize,
    pub shells_touched: usize,
    pub pass: bool,
}

const SAMPLES: usize = 3;

impl ChapletSet {
    fn shells_meeting(&self, r: &Rect, buf: &mut Vec<u32>, hit: &mut Vec<u32>) {
        hit.clear();
        self.shell_index.candidates_in(r.x0, r.y0, r.x1, r.y1, buf);
        for &k in buf.iter() {
            let s = &self.shells[k as usize];
            let (lo, hi) = r.distance_range(s.center);
            if lo < s.radius + s.half_width && hi > s.radius - s.half_width {
                hit.push(k);
            }
        }
    }

    /// Whether `z` lies in `U` but outside the chaplet for a reason other than a shell.
    fn open_point(&self, z: Complex64) -> bool {
        if self.is_generic() {
            return self.domain.contains(z) && self.component_of(z).is_none();
        }
        self.domain.contains(z) && (self.in_exceptional(z) || !self.in_cover(z))
    }

    fn meets_domain(&self, r: &Rect) -> bool {
        let (lo, hi) = r.distance_range(Complex64::new(0.0, 0.0));
        lo < 1.0 && hi > self.domain.inner_radius()
    }

    fn meets_boundary(&self, r: &Rect) -> bool {
        let (lo, hi) = r.distance_range(Complex64::new(0.0, 0.0));
        let a = self.domain.inner_radius();
        (lo <= 1.0 && hi >= 1.0) || (a > 0.0 && lo <= a && hi >= a)
    }

    fn rect_open(&self, r: &Rect, buf: &mut Vec<u32>, hit: &mut Vec<u32>) -> bool {
        self.shells_meeting(r, buf, hit);
        if !hit.is_empty() {
            return true;
        }
        let n = SAMPLES;
        (0..n).any(|i| {
            (0..n).any(|j| {
                let t = |k: usize, a: f64, b: f64| a + (b - a) * (k as f64 + 0.5) / n as f64;
                self.open_point(Complex64::new(t(i, r.x0, r.x1), t(j, r.y0, r.y1)))
            })
        })
    }

    /// Certificate over cells of side `step` covering `[-1, 1]²`.
    pub fn connectivity(&self, step: f64) -> ConnectivityCertificate {
        let n = libm::ceil(2.0 / step) as usize;
        let h = 2.0 / n as f64;
        let cell = |i: usize, j: usize| Rect {
            x0: -1.0 + i as f64 * h,
            y0: -1.0 + j as f64 * h,
            x1: -1.0 + (i + 1) as f64 * h,
            y1: -1.0 + (j + 1) as f64 * h,
        };
        let (mut buf, mut hit) = (Vec::new(), Vec::new());
        let mut passable = vec![false; n * n];
        let mut queue = VecDeque::new();
        let mut seen = vec![false; n * n];
        for j in 0..n {
            for i in 0..n {
                let r = cell(i, j);
                if !self.meets_domain(&r) {
                    continue;
                }
                let k = j * n + i;
                passable[k] = self.meets_boundary(&r) || self.rect_open(&r, &mut buf, &mut hit);
                if passable[k] && self.meets_boundary(&r) {
                    seen[k] = true;
                    queue.push_back((i, j));
                }
            }
        }
        let mut touched = vec![false; self.shells.len()];
        let mut reached = 0;
        while let Some((i, j)) = queue.pop_front() {
            reached += 1;
            self.shells_meeting(&cell(i, j), &mut buf, &mut hit);
            for &s in &hit {
                touched[s as usize] = true;
            }
            let r = cell(i, j);
            let edges = [
                (i + 1 < n, i + 1, j, Rect { x0: r.x1, x1: r.x1, ..r }),
                (i > 0, i.wrapping_sub(1), j, Rect { x1: r.x0, ..r }),
                (j + 1 < n, i, j + 1, Rect { y0: r.y1, y1: r.y1, ..r }),
                (j > 0, i, j.wrapping_sub(1), Rect { y1: r.y0, ..r }),
            ];
            for (ok, a, b, e) in edges {
                if !ok {
                    continue;
                }
                let k = b * n + a;
                if seen[k] || !passable[k] {
                    continue;
                }
                if self.rect_open(&e, &mut buf, &mut hit) || (self.meets_boundary(&e) && self.meets_domain(&e)) {
                    seen[k] = true;
                    queue.push_back((a, b));
                }
            }
        }
        let total = passable.iter().filter(|&&p| p).count();
        let shells_touched = touched.iter().filter(|&&t| t).count();
        ConnectivityCertificate {
            step: h,
            passable: total,
            reached,
            shells: self.shells.len(),
            shells_touched,
            pass: reached == total && shells_touched == self.shells.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaplet::{assemble_chaplet, BallCover, CloudParams, Shell};
    use crate::geometry::{Ball, Domain};

    fn ring(center: Complex64, radius: f64, tau: f64, j: usize) -> Shell {
        Shell {
            ball: j,
            center,
            radius,
            half_width: tau,
            ring: 0,
            budget: 0.1,
            boundary_distance: 1.0 - center.norm() - radius,
            rho: 0.0,
            r0: 0.5,
        }
    }

    fn cover(balls: Vec<Ball>) -> BallCover {
        let k = balls.len();
        BallCover { domain: Domain::UnitDisc, rho_max: 0.9, c: 0.3, balls, rings: vec![0; k], oscillations: vec![0.0; k] }
    }

    #[test]
    fn lone_shell_in_open_disc_connects() {
        let b = Ball { center: Complex64::new(0.0, 0.0), radius: 0.5 };
        let ch = assemble_chaplet(&cover(vec![b]), &[ring(b.center, 0.5, 1e-6, 0)], &[], &[], CloudParams::default()).unwrap();
        let c = ch.connectivity(1.0 / 64.0);
        assert!(c.pass, "{c:?}");
        assert!(c.reached > 100);
    }

    #[test]
    fn separating_annulus_is_rejected() {
        use crate::geometry::{Base, CompositeSet, OpenSet};
        let o = Complex64::new(0.0, 0.0);
        let band = CompositeSet {
            base: Base::Ball(Ball { center: o, radius: 0.6 }),
            minus: vec![OpenSet::Ball(Ball { center: o, radius: 0.4 })],
            intersect: Vec::new(),
        };
        let ch = ChapletSet::from_sets(Domain::UnitDisc, vec![band], CloudParams::default()).unwrap();
        assert!(!ch.connectivity(1.0 / 128.0).pass);
        let empty = ChapletSet::from_sets(Domain::UnitDisc, Vec::new(), CloudParams::default()).unwrap();
        assert!(empty.connectivity(1.0 / 128.0).pass);
    }

    #[test]
    fn trapped_hole_is_detected() {
        let outer = Ball { center: Complex64::new(0.0, 0.0), radius: 0.8 };
        let inner = Ball { center: Complex64::new(0.0, 0.0), radius: 0.3 };
        // only the inner ball carries a shell; the outer ball is solid and hides it
        let ch = assemble_chaplet(&cover(vec![outer, inner]), &[ring(inner.center, 0.3, 1e-3, 1)], &[], &[], CloudParams::default()).unwrap();
        let c = ch.connectivity(1.0 / 64.0);
        assert!(!c.pass);
        assert_eq!(c.shells_touched, 0);
    }
}

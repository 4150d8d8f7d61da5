use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BallIndex, ChapletError};
use crate::boundary::ContinuousExtension;
use crate::geometry::{Ball, Domain};
use crate::math::{self, TAU};

/// Largest usable fraction: `3c < 1` keeps `|S| < dist(S, ∂U)`.
pub const MAX_FRACTION: f64 = 0.32;
const SPACING: f64 = 0.7;
const BAND: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverParams {
    pub c: f64,
    pub rho_max: f64,
    pub max_depth: usize,
    pub osc_radii: usize,
    pub osc_angles: usize,
    pub check_step: f64,
}

impl CoverParams {
    pub fn new(rho_max: f64, c: f64) -> Self {
        Self { c, rho_max, max_depth: 6, osc_radii: 8, osc_angles: 32, check_step: 1.0 / 200.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallCover {
    pub domain: Domain,
    pub rho_max: f64,
    pub c: f64,
    pub balls: Vec<Ball>,
    /// Ring of each ball; the oscillation target of ball `l` is `1/(ring + 1)`.
    pub rings: Vec<usize>,
    pub oscillations: Vec<f64>,
}

impl BallCover {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    pub fn osc_index(&self, i: usize) -> usize {
        self.rings[i] + 1
    }

    pub fn ring_sizes(&self) -> Vec<usize> {
        let n = self.rings.iter().copied().max().map_or(0, |m| m + 1);
        let mut v = vec![0; n];
        for &r in &self.rings {
            v[r] += 1;
        }
        v
    }

    pub fn index(&self, pad: f64) -> BallIndex {
        BallIndex::new(&self.balls, pad, 128)
    }

    /// First ball (in cover order) whose open interior holds `z`.
    pub fn first_containing(&self, idx: &BallIndex, z: Complex64) -> Option<usize> {
        idx.candidates(z).iter().map(|&i| i as usize).find(|&i| self.balls[i].contains_open(z))
    }

    /// Whether `z` lies in the truncated region the cover must exhaust.
    pub fn in_truncated(&self, z: Complex64) -> bool {
        truncated(&self.domain, self.rho_max, z)
    }
}

fn truncated(d: &Domain, rho_max: f64, z: Complex64) -> bool {
    let r = z.norm();
    r <= rho_max && r >= d.inner_radius() + (1.0 - rho_max) * (d.inner_radius() > 0.0) as u8 as f64
}

fn radial_dist(d: &Domain, r: f64) -> f64 {
    match *d {
        Domain::UnitDisc => 1.0 - r,
        Domain::Annulus { inner_radius } => (1.0 - r).min(r - inner_radius),
    }
}

/// Smallest ring centre `R` whose band `R − BAND·c·dist(R)` reaches down to `edge`.
fn solve_ring(d: &Domain, c: f64, edge: f64) -> f64 {
    let f = |r: f64| r - BAND * c * radial_dist(d, r) - edge;
    let (mut lo, mut hi) = (edge.max(d.inner_radius()), 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

fn oscillation(u: &ContinuousExtension, b: &Ball, p: &CoverParams) -> f64 {
    let m = u.psi().sector_count();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    let mut visit = |z: Complex64| {
        if u.exceptional(z) {
            return;
        }
        let s = u.psi().sector(math::angle(z.re, z.im));
        let v = u.eval(z);
        lo[s] = lo[s].min(v);
        hi[s] = hi[s].max(v);
    };
    visit(b.center);
    for i in 1..=p.osc_radii {
        let t = b.radius * i as f64 / p.osc_radii as f64;
        for k in 0..p.osc_angles {
            visit(b.center + Complex64::from_polar(t, TAU * k as f64 / p.osc_angles as f64));
        }
    }
    lo.iter().zip(&hi).filter(|(l, _)| l.is_finite()).map(|(l, h)| h - l).fold(0.0, f64::max)
}

fn children(b: &Ball) -> [Ball; 7] {
    let r = 0.55 * b.radius;
    let mut out = [Ball { center: b.center, radius: r }; 7];
    for (k, child) in out.iter_mut().enumerate().skip(1) {
        let a = TAU * (k - 1) as f64 / 6.0;
        child.center = b.center + Complex64::from_polar(0.866 * b.radius, a);
    }
    out
}

pub fn cover_balls(d: &Domain, u: &ContinuousExtension, rho_max: f64, c: f64) -> Result<BallCover, ChapletError> {
    cover_balls_with(d, u, &CoverParams::new(rho_max, c))
}

/// Greedy concentric-ring cover of the truncated domain, subdividing balls
/// until the oscillation of `u` on each is below `1/(ring + 1)`.
pub fn cover_balls_with(d: &Domain, u: &ContinuousExtension, p: &CoverParams) -> Result<BallCover, ChapletError> {
    if !(p.c > 0.0 && p.c < 0.5) {
        return Err(ChapletError::BadFraction(p.c));
    }
    if !(p.rho_max > d.inner_radius() && p.rho_max < 1.0) {
        return Err(ChapletError::BadStageRadius(p.rho_max));
    }
    if !(p.check_step > 0.0) {
        return Err(ChapletError::BadStep(p.check_step));
    }
    let c = p.c.min(MAX_FRACTION);
    let mut seeds: Vec<(Ball, usize)> = Vec::new();
    let mut ring = 0;
    let mut edge = match *d {
        Domain::UnitDisc => {
            seeds.push((Ball { center: Complex64::new(0.0, 0.0), radius: c }, 0));
            ring = 1;
            0.9 * c
        }
        Domain::Annulus { inner_radius } => inner_radius + (1.0 - p.rho_max),
    };
    while edge < p.rho_max {
        let big_r = solve_ring(d, c, edge);
        let r = c * radial_dist(d, big_r);
        let n = (math::ceil(TAU * big_r / (SPACING * r)) as usize).max(3);
        let phase = if ring % 2 == 1 { 0.0 } else { 0.5 * TAU / n as f64 };
        for k in 0..n {
            let a = phase + TAU * k as f64 / n as f64;
            seeds.push((Ball { center: Complex64::from_polar(big_r, a), radius: r }, ring));
        }
        edge = big_r + BAND * r;
        ring += 1;
    }

    let mut balls: Vec<(Ball, usize, f64)> = Vec::new();
    for (seed, ring) in seeds {
        let target = 1.0 / (ring + 1) as f64;
        let mut stack = vec![(seed, 0usize)];
        let mut emitted = Vec::new();
        while let Some((b, depth)) = stack.pop() {
            let w = oscillation(u, &b, p);
            if w < target {
                emitted.push((b, ring, w));
            } else if depth >= p.max_depth {
                return Err(ChapletError::OscillationUnreachable {
                    re: b.center.re,
                    im: b.center.im,
                    target: ring + 1,
                    depth,
                });
            } else {
                for ch in children(&b).iter().rev() {
                    stack.push((*ch, depth + 1));
                }
            }
        }
        balls.extend(emitted);
    }

    let plain: Vec<Ball> = balls.iter().map(|b| b.0).collect();
    let idx = BallIndex::new(&plain, 0.0, 128);
    let keep: Vec<bool> = (0..plain.len())
        .map(|i| {
            !idx.candidates(plain[i].center).iter().any(|&j| {
                let j = j as usize;
                j != i && plain[j].contains_ball(&plain[i]) && (plain[i] != plain[j] || j < i)
            })
        })
        .collect();
    let balls: Vec<(Ball, usize, f64)> = balls.into_iter().zip(keep).filter(|(_, k)| *k).map(|(b, _)| b).collect();
    let cover = BallCover {
        domain: *d,
        rho_max: p.rho_max,
        c: p.c,
        balls: balls.iter().map(|b| b.0).collect(),
        rings: balls.iter().map(|b| b.1).collect(),
        oscillations: balls.iter().map(|b| b.2).collect(),
    };
    check_coverage(&cover, p.check_step)?;
    Ok(cover)
}

fn check_coverage(cover: &BallCover, step: f64) -> Result<(), ChapletError> {
    let idx = cover.index(0.0);
    let n = math::ceil(2.0 * cover.rho_max / step) as i64;
    for i in -n..=n {
        for j in -n..=n {
            let z = Complex64::new(i as f64 * step, j as f64 * step);
            if cover.in_truncated(z) && cover.first_containing(&idx, z).is_none() {
                return Err(ChapletError::Uncovered { re: z.re, im: z.im });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::ArcSet;
    use crate::boundary::{extend_continuous, lusin_decompose, BoundaryFunction, BoundaryMeasure, ExtensionParams};
    use crate::geometry::dist_to_boundary;

    fn constant() -> ContinuousExtension {
        let f = BoundaryFunction::constant(1.0);
        let d = lusin_decompose(&f, &BoundaryMeasure::ArcLength, 0).unwrap();
        extend_continuous(&f, &d, ExtensionParams::default()).unwrap()
    }

    #[test]
    fn constant_radii_are_exact() {
        let d = Domain::UnitDisc;
        let cover = cover_balls(&d, &constant(), 0.7, 0.3).unwrap();
        for b in &cover.balls {
            let dist = dist_to_boundary(b.center, &d).unwrap();
            assert!((b.radius - 0.3 * dist).abs() < 1e-12);
            assert!(2.0 * b.radius < 1.0 - b.center.norm() - b.radius);
        }
        assert!(cover.oscillations.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn grid_points_are_covered() {
        let cover = cover_balls(&Domain::UnitDisc, &constant(), 0.7, 0.3).unwrap();
        let idx = cover.index(0.0);
        let mut n = 0;
        for i in 0..100 {
            for j in 0..100 {
                let z = Complex64::new(-0.7 + 1.4 * i as f64 / 99.0, -0.7 + 1.4 * j as f64 / 99.0);
                if z.norm() <= 0.7 {
                    n += 1;
                    assert!(cover.first_containing(&idx, z).is_some());
                }
            }
        }
        assert!(n > 7000);
    }

    #[test]
    fn no_ball_contains_another() {
        let cover = cover_balls(&Domain::UnitDisc, &constant(), 0.9, 0.3).unwrap();
        for (i, a) in cover.balls.iter().enumerate() {
            for (j, b) in cover.balls.iter().enumerate() {
                assert!(i == j || !a.contains_ball(b));
            }
        }
    }

    #[test]
    fn smooth_data_subdivides() {
        let f = BoundaryFunction::new(
            alloc::vec![crate::boundary::Piece {
                start: 0.0,
                end: TAU,
                values: crate::boundary::PieceValues::Expr(crate::boundary::TrigPoly {
                    constant: 0.0,
                    linear: 0.0,
                    cos: alloc::vec![1.0],
                    sin: Vec::new(),
                }),
            }],
            Vec::new(),
            ArcSet::full(),
        )
        .unwrap();
        let dec = lusin_decompose(&f, &BoundaryMeasure::ArcLength, 0).unwrap();
        let u = extend_continuous(&f, &dec, ExtensionParams::default()).unwrap();
        let cover = cover_balls(&Domain::UnitDisc, &u, 0.6, 0.3).unwrap();
        for (i, w) in cover.oscillations.iter().enumerate() {
            assert!(*w < 1.0 / cover.osc_index(i) as f64);
        }
    }

    #[test]
    fn annulus_cover() {
        let d = Domain::annulus(0.3).unwrap();
        let cover = cover_balls(&d, &constant(), 0.85, 0.3).unwrap();
        for b in &cover.balls {
            let dist = dist_to_boundary(b.center, &d).unwrap();
            assert!(3.0 * b.radius < dist);
        }
    }

    #[test]
    fn fraction_is_checked() {
        assert!(matches!(cover_balls(&Domain::UnitDisc, &constant(), 0.7, 0.6), Err(ChapletError::BadFraction(_))));
    }
}

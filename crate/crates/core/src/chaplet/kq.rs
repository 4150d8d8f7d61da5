use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ChapletError, ChapletSet};
use crate::geometry::{dist_to_boundary, Ball, Domain};

/// Compact `D ∪ ⋃_{j ∈ members} V̄_j(δ)` where `D = {dist(z, ∂U) ≥ 1 − radius}`
/// (the closed disc of that radius for the unit disc).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Swallow {
    pub radius: f64,
    pub delta: f64,
    pub members: Vec<usize>,
    /// Lower bound on the boundary distance of every point of the compact.
    pub depth: f64,
}

impl Swallow {
    fn in_core(&self, d: &Domain, z: Complex64) -> bool {
        d.contains(z) && dist_to_boundary(z, d).map(|t| t >= 1.0 - self.radius).unwrap_or(false)
    }

    pub fn contains(&self, ch: &ChapletSet, z: Complex64) -> bool {
        self.in_core(&ch.domain, z) || self.members.iter().any(|&j| ch.in_neighbourhood(j, z, self.delta))
    }

    /// Radius of the smallest origin-centred disc holding the compact.
    pub fn outer_radius(&self) -> f64 {
        1.0 - self.depth
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KqWitness {
    pub q: Swallow,
    /// Every sample of a swallowed component lies in `Q`, no sample of another does.
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exhaustion {
    pub candidates: Vec<f64>,
    pub stages: Vec<Swallow>,
    /// Stage (1-based) at which each component is first inside `L_n°`.
    pub engulf: Vec<usize>,
}

impl Exhaustion {
    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn outer_radii(&self) -> Vec<f64> {
        self.stages.iter().map(Swallow::outer_radius).collect()
    }

    /// Components engulfed exactly at stage `n` (1-based).
    pub fn new_at(&self, n: usize) -> Vec<usize> {
        (0..self.engulf.len()).filter(|&j| self.engulf[j] == n).collect()
    }
}

fn depth_range(ch: &ChapletSet, j: usize) -> (f64, f64) {
    let c = &ch.components[j];
    c.fit_cloud.iter().chain(&c.verify_cloud).fold((f64::INFINITY, 0.0f64), |(lo, hi), &z| {
        let t = dist_to_boundary(z, &ch.domain).unwrap_or(0.0);
        (lo.min(t), hi.max(t))
    })
}

/// Guaranteed lower bound on the boundary distance of `V̄_j(δ)`.
fn floor_depth(ch: &ChapletSet, j: usize, delta: f64, lo: f64) -> f64 {
    if ch.is_generic() {
        return lo - delta - ch.clouds.fit_step;
    }
    let b: Ball = ch.cover.balls[ch.components[j].id.ball];
    let ball = dist_to_boundary(b.center, &ch.domain).unwrap_or(0.0) - b.radius - delta;
    ball.max(lo - delta - ch.clouds.fit_step).min(lo)
}

fn swallow(ch: &ChapletSet, radius: f64, delta: f64, take: impl Fn(usize, f64) -> bool) -> Swallow {
    let margin = ch.clouds.fit_step;
    let mut members = Vec::new();
    let mut depth = 1.0 - radius;
    for j in 0..ch.component_count() {
        let (lo, hi) = depth_range(ch, j);
        if take(j, hi) || hi >= 1.0 - radius - margin {
            members.push(j);
            depth = depth.min(floor_depth(ch, j, delta, lo));
        }
    }
    Swallow { radius, delta, members, depth }
}

fn audit(ch: &ChapletSet, q: &Swallow) -> bool {
    (0..ch.component_count()).all(|j| {
        let inside = q.members.contains(&j);
        let c = &ch.components[j];
        c.verify_cloud.iter().chain(&c.fit_cloud).all(|&z| q.contains(ch, z) == inside)
    })
}

/// Witness `Q ⊃ K` with every component either inside `Q°` or disjoint from `Q`.
pub fn check_kq(ch: &ChapletSet, k: &[Ball]) -> Result<KqWitness, ChapletError> {
    let reach = k.iter().map(|b| b.center.norm() + b.radius).fold(0.0, f64::max);
    let radius = reach + ch.clouds.fit_step;
    if radius >= 1.0 {
        return Err(ChapletError::Accumulation);
    }
    let delta = if ch.v_delta > 0.0 { 0.5 * ch.v_delta } else { 0.0 };
    let q = swallow(ch, radius, delta, |_, _| false);
    if q.depth <= 0.0 {
        return Err(ChapletError::Accumulation);
    }
    let verified = audit(ch, &q);
    Ok(KqWitness { q, verified })
}

/// Open compatible exhaustion from candidate radii; the last stage swallows every component.
pub fn compatible_exhaustion(ch: &ChapletSet, radii: &[f64]) -> Result<Exhaustion, ChapletError> {
    if radii.is_empty() {
        return Err(ChapletError::BadExhaustion);
    }
    for &r in radii {
        if !(r > 0.0 && r < 1.0) {
            return Err(ChapletError::BadStageRadius(r));
        }
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ChapletError::BadExhaustion);
    }
    let n = radii.len();
    let mut engulf = alloc::vec![0usize; ch.component_count()];
    let mut stages: Vec<Swallow> = Vec::with_capacity(n);
    for (i, &r) in radii.iter().enumerate() {
        let delta = ch.v_delta * (i + 1) as f64 / (n + 1) as f64;
        let last = i + 1 == n;
        let s = swallow(ch, r, delta, |j, _| last || engulf[j] != 0);
        if s.depth <= 0.0 {
            return Err(ChapletError::ExhaustionEscapes { stage: i + 1 });
        }
        for &j in &s.members {
            if engulf[j] == 0 {
                engulf[j] = i + 1;
            }
        }
        stages.push(s);
    }
    Ok(Exhaustion { candidates: radii.to_vec(), stages, engulf })
}

impl Exhaustion {
    /// Sample check of open compatibility at every stage.
    pub fn audit(&self, ch: &ChapletSet) -> bool {
        self.stages.iter().all(|s| audit(ch, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaplet::{assemble_chaplet, BallCover, CloudParams};
    use crate::geometry::{Base, CompositeSet, OpenSet};
    use alloc::vec;

    fn o() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    #[test]
    fn empty_chaplet_any_disc() {
        let ch = ChapletSet::from_sets(Domain::UnitDisc, Vec::new(), CloudParams::default()).unwrap();
        let w = check_kq(&ch, &[Ball { center: o(), radius: 0.5 }]).unwrap();
        assert!(w.verified && w.q.members.is_empty());
        assert!(w.q.radius > 0.5);
    }

    #[test]
    fn straddling_component_is_swallowed() {
        let band = CompositeSet {
            base: Base::Ball(Ball { center: o(), radius: 0.55 }),
            minus: vec![OpenSet::Ball(Ball { center: o(), radius: 0.45 })],
            intersect: Vec::new(),
        };
        let ch = ChapletSet::from_sets(Domain::UnitDisc, vec![band], CloudParams::default()).unwrap();
        let w = check_kq(&ch, &[Ball { center: o(), radius: 0.49 }]).unwrap();
        assert_eq!(w.q.members, vec![0]);
        assert!(w.q.outer_radius() > 0.55);
        assert!(w.verified);
    }

    #[test]
    fn single_component_exhaustion() {
        let b = Ball { center: Complex64::new(0.1, 0.0), radius: 0.2 };
        let cover = BallCover { domain: Domain::UnitDisc, rho_max: 0.3, c: 0.3, balls: vec![b], rings: vec![0], oscillations: vec![0.0] };
        let ch = assemble_chaplet(&cover, &[], &[], &[], CloudParams::default()).unwrap();
        let ex = compatible_exhaustion(&ch, &[0.5]).unwrap();
        assert_eq!(ex.engulf, vec![1]);
        assert!(ex.audit(&ch));
    }

    #[test]
    fn radii_validated() {
        let ch = ChapletSet::from_sets(Domain::UnitDisc, Vec::new(), CloudParams::default()).unwrap();
        assert!(compatible_exhaustion(&ch, &[0.5, 0.4]).is_err());
        assert!(compatible_exhaustion(&ch, &[1.0]).is_err());
        assert!(compatible_exhaustion(&ch, &[]).is_err());
    }
}

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BallCover, BallIndex, ChapletError, Shell};
use crate::boundary::sector_of;
use crate::geometry::{dist_to_boundary, Base, Ball, ClosedSet, CompositeSet, Domain, OpenSet, Sector};
use crate::math::{self, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ComponentId {
    pub ball: usize,
    pub sector: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CloudParams {
    pub fit_step: f64,
    pub verify_step: f64,
    /// Local lattices are refined to at most `radius / per_radius` inside small balls.
    pub fit_per_radius: f64,
    pub verify_per_radius: f64,
}

impl Default for CloudParams {
    fn default() -> Self {
        Self { fit_step: 0.005, verify_step: 0.0025, fit_per_radius: 4.0, verify_per_radius: 8.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub id: ComponentId,
    pub ring: usize,
    pub set: CompositeSet,
    pub anchor: Complex64,
    pub fit_cloud: Vec<Complex64>,
    pub verify_cloud: Vec<Complex64>,
    pub min_modulus: f64,
    pub max_modulus: f64,
}

/// Serializable description from which a [`ChapletSet`] is rebuilt exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChapletRecord {
    pub domain: Domain,
    pub cover: BallCover,
    pub shells: Vec<Shell>,
    pub exceptional: Vec<OpenSet>,
    pub jumps: Vec<f64>,
    pub clouds: CloudParams,
    pub components: Vec<ComponentSummary>,
    pub dropped: Vec<ComponentId>,
    pub v_delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub id: ComponentId,
    pub anchor: Complex64,
    pub fit_points: usize,
    pub verify_points: usize,
    pub min_modulus: f64,
    pub max_modulus: f64,
}

/// The Mergelyan chaplet `A = ⊔ A_j` with `A_j = (S_j ∩ A ∩ sector) \ ∪_{k<j} S_k° \ W`.
#[derive(Debug, Clone)]
pub struct ChapletSet {
    pub domain: Domain,
    pub cover: BallCover,
    pub shells: Vec<Shell>,
    /// Open exceptional pieces removed from every component.
    pub exceptional: Vec<OpenSet>,
    pub jumps: Vec<f64>,
    pub clouds: CloudParams,
    pub components: Vec<Component>,
    /// Ball/sector pieces without sample points at the working resolution.
    pub dropped: Vec<ComponentId>,
    /// Dilation radius of the neighbourhoods `V_j`.
    pub v_delta: f64,
    generic: bool,
    pub(crate) ball_index: BallIndex,
    pub(crate) shell_index: BallIndex,
    lookup: Vec<u32>,
    sectors: usize,
}

const NONE: u32 = u32::MAX;

fn lattice(ball: &Ball, step: f64) -> impl Iterator<Item = Complex64> + '_ {
    let lo_x = math::floor((ball.center.re - ball.radius) / step) as i64;
    let hi_x = math::ceil((ball.center.re + ball.radius) / step) as i64;
    let lo_y = math::floor((ball.center.im - ball.radius) / step) as i64;
    let hi_y = math::ceil((ball.center.im + ball.radius) / step) as i64;
    (lo_y..=hi_y).flat_map(move |j| {
        (lo_x..=hi_x).filter_map(move |i| {
            let z = Complex64::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
            ball.contains_open(z).then_some(z)
        })
    })
}

fn shell_balls(shells: &[Shell]) -> Vec<Ball> {
    shells.iter().map(|s| Ball { center: s.center, radius: s.radius + s.half_width }).collect()
}

impl ChapletSet {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn in_shell(&self, z: Complex64) -> bool {
        self.shell_index.candidates(z).iter().any(|&k| self.shells[k as usize].contains(z))
    }

    pub fn in_cover(&self, z: Complex64) -> bool {
        self.cover.first_containing(&self.ball_index, z).is_some()
    }

    pub fn in_exceptional(&self, z: Complex64) -> bool {
        self.exceptional.iter().any(|o| o.contains(z))
    }

    /// Index of the component holding `z`, if any.
    pub fn component_of(&self, z: Complex64) -> Option<usize> {
        if self.generic {
            return self.components.iter().position(|c| c.set.contains(z));
        }
        if !self.domain.contains(z) || self.in_exceptional(z) || self.in_shell(z) {
            return None;
        }
        let j = self.cover.first_containing(&self.ball_index, z)?;
        let m = sector_of(&self.jumps, math::angle(z.re, z.im));
        let c = self.lookup[j * self.sectors + m];
        (c != NONE).then_some(c as usize)
    }

    /// `A = U \ ∪ R_k` minus the exceptional set: the good set at every probe.
    pub fn in_good(&self, z: Complex64) -> bool {
        self.domain.contains(z) && !self.in_exceptional(z) && !self.in_shell(z)
    }

    /// Membership in the open neighbourhood `V_j ⊇ A_j`.
    pub fn in_neighbourhood(&self, j: usize, z: Complex64, delta: f64) -> bool {
        let c = &self.components[j];
        if self.generic {
            return c.set.contains(z);
        }
        let b = &self.cover.balls[c.id.ball];
        if (z - b.center).norm() >= b.radius + delta {
            return false;
        }
        if sector_of(&self.jumps, math::angle(z.re, z.im)) != c.id.sector {
            return false;
        }
        if self
            .shell_index
            .candidates(z)
            .iter()
            .map(|&k| &self.shells[k as usize])
            .any(|s| ((z - s.center).norm() - s.radius).abs() < s.half_width - delta)
        {
            return false;
        }
        !self
            .ball_index
            .candidates(z)
            .iter()
            .map(|&k| k as usize)
            .take_while(|&k| k < c.id.ball)
            .any(|k| (z - self.cover.balls[k].center).norm() < self.cover.balls[k].radius - delta)
    }

    pub fn record(&self) -> ChapletRecord {
        ChapletRecord {
            domain: self.domain,
            cover: self.cover.clone(),
            shells: self.shells.clone(),
            exceptional: self.exceptional.clone(),
            jumps: self.jumps.clone(),
            clouds: self.clouds,
            components: self
                .components
                .iter()
                .map(|c| ComponentSummary {
                    id: c.id,
                    anchor: c.anchor,
                    fit_points: c.fit_cloud.len(),
                    verify_points: c.verify_cloud.len(),
                    min_modulus: c.min_modulus,
                    max_modulus: c.max_modulus,
                })
                .collect(),
            dropped: self.dropped.clone(),
            v_delta: self.v_delta,
        }
    }

    pub fn from_record(r: &ChapletRecord) -> Self {
        build(r.domain, r.cover.clone(), r.shells.clone(), r.exceptional.clone(), r.jumps.clone(), r.clouds)
    }

    /// A chaplet given directly by its component sets, without cover structure.
    pub fn from_sets(domain: Domain, sets: Vec<CompositeSet>, clouds: CloudParams) -> Result<Self, ChapletError> {
        let mut components = Vec::new();
        let unit = Ball { center: Complex64::new(0.0, 0.0), radius: 1.0 };
        for (i, set) in sets.into_iter().enumerate() {
            let pick = |step: f64, set: &CompositeSet| -> Vec<Complex64> {
                lattice(&unit, step).filter(|&z| domain.contains(z) && set.contains(z)).collect()
            };
            let fit_cloud = pick(clouds.fit_step, &set);
            let verify_cloud = pick(clouds.verify_step, &set);
            if fit_cloud.is_empty() || verify_cloud.is_empty() {
                return Err(ChapletError::EmptyComponent { ball: i, sector: 0 });
            }
            let (lo, hi) = moduli(&fit_cloud, &verify_cloud);
            components.push(Component {
                id: ComponentId { ball: i, sector: 0 },
                ring: 0,
                anchor: deepest(&fit_cloud, &domain),
                set,
                fit_cloud,
                verify_cloud,
                min_modulus: lo,
                max_modulus: hi,
            });
        }
        let cover = BallCover { domain, rho_max: 0.0, c: 0.0, balls: Vec::new(), rings: Vec::new(), oscillations: Vec::new() };
        Ok(Self {
            domain,
            cover,
            shells: Vec::new(),
            exceptional: Vec::new(),
            jumps: Vec::new(),
            clouds,
            components,
            dropped: Vec::new(),
            v_delta: 0.0,
            generic: true,
            ball_index: BallIndex::new(&[], 0.0, 1),
            shell_index: BallIndex::new(&[], 0.0, 1),
            lookup: Vec::new(),
            sectors: 1,
        })
    }

    pub fn is_generic(&self) -> bool {
        self.generic
    }
}

fn moduli(a: &[Complex64], b: &[Complex64]) -> (f64, f64) {
    a.iter().chain(b).fold((f64::INFINITY, 0.0f64), |(lo, hi), z| (lo.min(z.norm()), hi.max(z.norm())))
}

fn deepest(cloud: &[Complex64], d: &Domain) -> Complex64 {
    let mut best = cloud[0];
    let mut depth = f64::NEG_INFINITY;
    for &z in cloud {
        let t = dist_to_boundary(z, d).unwrap_or(0.0);
        if t > depth {
            depth = t;
            best = z;
        }
    }
    best
}

/// Materialise the chaplet components of a cover and its shells; `exceptional`
/// is removed from every component and `jumps` split them into sectors.
pub fn assemble_chaplet(
    cover: &BallCover,
    shells: &[Shell],
    exceptional: &[OpenSet],
    jumps: &[f64],
    clouds: CloudParams,
) -> Result<ChapletSet, ChapletError> {
    if !(clouds.fit_step > 0.0) {
        return Err(ChapletError::BadStep(clouds.fit_step));
    }
    if !(clouds.verify_step > 0.0) {
        return Err(ChapletError::BadStep(clouds.verify_step));
    }
    Ok(build(cover.domain, cover.clone(), shells.to_vec(), exceptional.to_vec(), jumps.to_vec(), clouds))
}

fn build(
    domain: Domain,
    cover: BallCover,
    shells: Vec<Shell>,
    exceptional: Vec<OpenSet>,
    mut jumps: Vec<f64>,
    clouds: CloudParams,
) -> ChapletSet {
    jumps.sort_by(f64::total_cmp);
    let sectors = jumps.len().max(1);
    let max_tau = shells.iter().map(|s| s.half_width).fold(0.0, f64::max);
    let min_tau = shells.iter().map(|s| s.half_width).fold(f64::INFINITY, f64::min);
    let mut ch = ChapletSet {
        domain,
        ball_index: cover.index(0.0),
        shell_index: BallIndex::new(&shell_balls(&shells), max_tau, 128),
        cover,
        shells,
        exceptional,
        jumps,
        clouds,
        components: Vec::new(),
        dropped: Vec::new(),
        v_delta: if min_tau.is_finite() { 0.25 * min_tau } else { 0.0 },
        generic: false,
        lookup: Vec::new(),
        sectors,
    };
    let n = ch.cover.len();
    let mut fit: Vec<Vec<Vec<Complex64>>> = vec![vec![Vec::new(); sectors]; n];
    let mut verify: Vec<Vec<Vec<Complex64>>> = vec![vec![Vec::new(); sectors]; n];
    for j in 0..n {
        let b = ch.cover.balls[j];
        for (step, per, out) in [
            (clouds.fit_step, clouds.fit_per_radius, &mut fit[j]),
            (clouds.verify_step, clouds.verify_per_radius, &mut verify[j]),
        ] {
            let s = step.min(b.radius / per);
            for z in lattice(&b, s) {
                if ch.in_exceptional(z) || ch.in_shell(z) || !domain.contains(z) {
                    continue;
                }
                if ch.cover.first_containing(&ch.ball_index, z) != Some(j) {
                    continue;
                }
                out[sector_of(&ch.jumps, math::angle(z.re, z.im))].push(z);
            }
        }
    }
    ch.lookup = vec![NONE; n * sectors];
    let mut earlier = Vec::new();
    let mut near_shells = Vec::new();
    for j in 0..n {
        for m in 0..sectors {
            let id = ComponentId { ball: j, sector: m };
            let mut f = core::mem::take(&mut fit[j][m]);
            let v = core::mem::take(&mut verify[j][m]);
            if f.is_empty() && v.is_empty() {
                ch.dropped.push(id);
                continue;
            }
            if f.is_empty() {
                f = v.clone();
            }
            let b = ch.cover.balls[j];
            let reach = 2.0 * b.radius + max_tau;
            ch.ball_index.candidates_in(b.center.re - b.radius, b.center.im - b.radius, b.center.re + b.radius, b.center.im + b.radius, &mut earlier);
            ch.shell_index.candidates_in(b.center.re - reach, b.center.im - reach, b.center.re + reach, b.center.im + reach, &mut near_shells);
            let mut set = CompositeSet { base: Base::Ball(b), minus: Vec::new(), intersect: Vec::new() };
            set.minus.extend(
                near_shells
                    .iter()
                    .map(|&k| &ch.shells[k as usize])
                    .filter(|s| (s.center - b.center).norm() < b.radius + s.radius + s.half_width)
                    .map(|s| OpenSet::Shell(s.annulus())),
            );
            set.minus.extend(
                earlier
                    .iter()
                    .map(|&k| k as usize)
                    .filter(|&k| k < j)
                    .map(|k| ch.cover.balls[k])
                    .filter(|o| (o.center - b.center).norm() < b.radius + o.radius)
                    .map(OpenSet::Ball),
            );
            set.minus.extend(ch.exceptional.iter().copied());
            if ch.jumps.len() >= 2 {
                let a = ch.jumps[m];
                let w = math::wrap_angle(ch.jumps[(m + 1) % ch.jumps.len()] - a);
                set.intersect.push(ClosedSet::Sector(Sector { start: a, width: if w == 0.0 { TAU } else { w } }));
            }
            let (lo, hi) = moduli(&f, &v);
            ch.lookup[j * sectors + m] = ch.components.len() as u32;
            ch.components.push(Component {
                id,
                ring: ch.cover.rings[j],
                anchor: deepest(&f, &domain),
                set,
                fit_cloud: f,
                verify_cloud: v,
                min_modulus: lo,
                max_modulus: hi,
            });
        }
    }
    ch
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arcs::ArcSet;
    use crate::boundary::{extend_continuous, lusin_decompose, BoundaryFunction, BoundaryMeasure, ExtensionParams};
    use crate::chaplet::{boundary_probes, build_shells, cover_balls};

    fn step_chaplet(rho_max: f64) -> ChapletSet {
        let f = BoundaryFunction::step(0.0, 1.0, ArcSet::empty()).unwrap();
        let dec = lusin_decompose(&f, &BoundaryMeasure::ArcLength, 2).unwrap();
        let u = extend_continuous(&f, &dec, ExtensionParams { kappa: 100.0, cap: 1.0, core_radius: 0.25 }).unwrap();
        let d = Domain::UnitDisc;
        let cover = cover_balls(&d, &u, rho_max, 0.3).unwrap();
        let (shells, _) = build_shells(&cover, &d, &boundary_probes(&d, 64)).unwrap();
        let clouds = CloudParams { fit_step: 0.02, verify_step: 0.01, ..CloudParams::default() };
        assemble_chaplet(&cover, &shells, &u.exceptional_sets(), f.jumps(), clouds).unwrap()
    }

    #[test]
    fn single_ball_single_component() {
        let b = Ball { center: Complex64::new(0.1, 0.0), radius: 0.2 };
        let cover = BallCover { domain: Domain::UnitDisc, rho_max: 0.3, c: 0.3, balls: vec![b], rings: vec![0], oscillations: vec![0.0] };
        let ch = assemble_chaplet(&cover, &[], &[], &[], CloudParams::default()).unwrap();
        assert_eq!(ch.component_count(), 1);
        assert!(ch.components[0].anchor.norm() < 0.01);
    }

    #[test]
    fn shell_inside_ball_splits_it() {
        let big = Ball { center: Complex64::new(0.0, 0.0), radius: 0.3 };
        let small = Ball { center: Complex64::new(0.05, 0.0), radius: 0.1 };
        let cover = BallCover {
            domain: Domain::UnitDisc,
            rho_max: 0.3,
            c: 0.3,
            balls: vec![small, big],
            rings: vec![0, 0],
            oscillations: vec![0.0, 0.0],
        };
        let shell = |j: usize, b: Ball| Shell {
            ball: j,
            center: b.center,
            radius: b.radius,
            half_width: 0.01,
            ring: 0,
            budget: 0.25,
            boundary_distance: 1.0 - b.center.norm() - b.radius,
            rho: 0.0,
            r0: 0.5,
        };
        let ch = assemble_chaplet(&cover, &[shell(0, small), shell(1, big)], &[], &[], CloudParams::default()).unwrap();
        assert_eq!(ch.component_count(), 2);
        let inner = ch.components.iter().find(|c| c.id.ball == 0).unwrap();
        let outer = ch.components.iter().find(|c| c.id.ball == 1).unwrap();
        assert!(inner.set.contains(Complex64::new(0.05, 0.0)));
        assert!(outer.set.contains(Complex64::new(-0.25, 0.0)));
        assert!(!outer.set.contains(Complex64::new(0.05, 0.0)));
    }

    #[test]
    fn membership_matches_composite_sets() {
        let ch = step_chaplet(0.6);
        let mut hits = 0;
        for i in 0..100 {
            for j in 0..100 {
                let z = Complex64::new(-0.99 + 1.98 * i as f64 / 99.0, -0.99 + 1.98 * j as f64 / 99.0);
                let fast = ch.component_of(z);
                let slow = ch.components.iter().position(|c| ch.domain.contains(z) && c.set.contains(z));
                assert_eq!(fast, slow, "at {z}");
                hits += fast.is_some() as usize;
            }
        }
        assert!(hits > 1000, "{hits}");
    }

    #[test]
    fn anchors_and_disjointness() {
        let ch = step_chaplet(0.6);
        for (j, c) in ch.components.iter().enumerate() {
            assert_eq!(ch.component_of(c.anchor), Some(j));
            for &z in c.verify_cloud.iter().step_by(7) {
                assert_eq!(ch.component_of(z), Some(j));
                for k in 0..ch.component_count() {
                    if k != j {
                        assert!(!ch.in_neighbourhood(k, z, ch.v_delta));
                    }
                }
                assert!(ch.in_neighbourhood(j, z, ch.v_delta));
            }
        }
    }

    #[test]
    fn record_round_trip() {
        let ch = step_chaplet(0.5);
        let again = ChapletSet::from_record(&ch.record());
        assert_eq!(again.record(), ch.record());
        assert_eq!(again.components[3].verify_cloud, ch.components[3].verify_cloud);
    }

    #[test]
    fn generic_sets_need_samples() {
        let tiny = CompositeSet {
            base: Base::Ball(Ball { center: Complex64::new(0.0, 0.0), radius: 1e-4 }),
            minus: Vec::new(),
            intersect: Vec::new(),
        };
        assert!(ChapletSet::from_sets(Domain::UnitDisc, vec![tiny], CloudParams::default()).is_err());
    }
}

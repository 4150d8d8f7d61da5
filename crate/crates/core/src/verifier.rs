//! Density and approach certificates at boundary points.

use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary::ContinuousExtension;
use crate::carleman::{AnchorValue, RunCertificate};
use crate::chaplet::{BallIndex, ChapletSet, Shell};
use crate::geometry::{ball_domain_area, lens_area, Ball, Domain, OpenSet, Wedge};
use crate::math::{self, PI, TAU};
use crate::montecarlo::{count_pair, derive_seed, BallSampler};
use crate::oracle::OperatorKind;

/// Safety factor on the quadrature of wedge areas.
pub const WEDGE_SAFETY: f64 = 1.02;
const WEDGE_NODES: usize = 4000;
const MIN_HITS: u64 = 64;

/// `U` minus the shells and the exceptional set.
#[derive(Debug, Clone)]
pub struct GoodSet {
    pub domain: Domain,
    pub shells: Vec<Shell>,
    pub exceptional: Vec<OpenSet>,
    index: BallIndex,
}

impl GoodSet {
    pub fn new(domain: Domain, shells: Vec<Shell>, exceptional: Vec<OpenSet>) -> Self {
        let outer: Vec<Ball> = shells.iter().map(|s| Ball { center: s.center, radius: s.radius + s.half_width }).collect();
        let index = BallIndex::new(&outer, 0.0, 128);
        Self { domain, shells, exceptional, index }
    }

    pub fn whole(domain: Domain) -> Self {
        Self::new(domain, Vec::new(), Vec::new())
    }

    pub fn from_chaplet(ch: &ChapletSet) -> Self {
        Self::new(ch.domain, ch.shells.clone(), ch.exceptional.clone())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.domain.contains(z) && !self.exceptional.iter().any(|o| o.contains(z)) && self.shell_at(z).is_none()
    }

    pub fn shell_at(&self, z: Complex64) -> Option<usize> {
        self.index.candidates(z).iter().map(|&k| k as usize).find(|&k| self.shells[k].contains(z))
    }

    /// Certified upper bound on the bad ratio at `B(p, r)`: shell budgets
    /// for every shell visible at `r`, plus the exceptional pieces.
    pub fn bad_bound(&self, p: Complex64, r: f64) -> f64 {
        let shells: f64 = self.shells.iter().filter(|s| r >= s.r0).map(|s| s.budget).sum();
        shells + WEDGE_SAFETY * self.exceptional_ratio(p, r)
    }

    /// `μ(B(p, r) ∩ U ∩ W) / μ(B(p, r) ∩ U)`, summed over the exceptional pieces.
    pub fn exceptional_ratio(&self, p: Complex64, r: f64) -> f64 {
        let b = Ball { center: p, radius: r };
        let den = ball_domain_area(&b, &self.domain);
        if den <= 0.0 {
            return 0.0;
        }
        let num: f64 = self
            .exceptional
            .iter()
            .map(|o| match o {
                OpenSet::Ball(c) => lens_area(&b, c),
                OpenSet::Shell(a) => {
                    let outer = Ball { center: a.center, radius: a.radius + a.half_width };
                    let inner = Ball { center: a.center, radius: (a.radius - a.half_width).max(0.0) };
                    (lens_area(&b, &outer) - lens_area(&b, &inner)).max(0.0)
                }
                OpenSet::Wedge(w) => wedge_area(w, &b, &self.domain),
            })
            .sum();
        (num / den).min(1.0)
    }

    fn lens_bad_ratio(&self, p: Complex64, r: f64) -> f64 {
        let den = ball_domain_area(&Ball { center: p, radius: r }, &self.domain);
        if den <= 0.0 {
            return 0.0;
        }
        let shells: f64 = self.shells.iter().map(|s| s.ball_area(p, r)).sum::<f64>() / den;
        (shells + self.exceptional_ratio(p, r)).min(1.0)
    }
}

/// Overlap length of two centred arcs of half-widths `a`, `b` at angular offset `d`.
fn arc_overlap(a: f64, b: f64, d: f64) -> f64 {
    let one = |x: f64| ((a).min(x + b) - (-a).max(x - b)).max(0.0);
    (one(d) + one(TAU - d)).min(2.0 * a.min(b)).min(TAU)
}

/// Midpoint-rule area of `wedge ∩ B ∩ U`.
pub fn wedge_area(w: &Wedge, b: &Ball, d: &Domain) -> f64 {
    let pm = b.center.norm();
    let lo = (pm - b.radius).max(d.inner_radius()).max(0.0);
    let hi = (pm + b.radius).min(1.0);
    if hi <= lo {
        return 0.0;
    }
    let tp = math::angle(b.center.re, b.center.im);
    let off = math::angular_distance(tp, w.angle);
    let h = (hi - lo) / WEDGE_NODES as f64;
    let mut acc = 0.0;
    for i in 0..WEDGE_NODES {
        let rho = lo + (i as f64 + 0.5) * h;
        let half = w.gauge.half_width(1.0 - rho).min(PI);
        let beta = if pm == 0.0 {
            if rho < b.radius { PI } else { 0.0 }
        } else {
            let c = (rho * rho + pm * pm - b.radius * b.radius) / (2.0 * rho * pm);
            if c <= -1.0 {
                PI
            } else {
                math::acos(c)
            }
        };
        acc += rho * arc_overlap(beta, half, off);
    }
    acc * h
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensityMethod {
    MonteCarlo { seed: u64, samples: u64 },
    /// Lens areas of shells and the exceptional set, summed; exact when they are disjoint.
    LensExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub radius: f64,
    pub good_ratio: f64,
    pub bad_ratio: f64,
    pub stderr: f64,
    pub bound: f64,
    pub seed: Option<u64>,
    /// `bad_ratio ≤ bound + 3·stderr`.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProfile {
    pub theta: f64,
    pub method: DensityMethod,
    pub rows: Vec<DensityRow>,
    /// Radii dropped for lack of samples in `B(p, r) ∩ U`.
    pub dropped: Vec<f64>,
}

impl DensityProfile {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Boundary point at angle `theta` on the outer circle.
pub fn boundary_point(theta: f64) -> Complex64 {
    Complex64::new(math::cos(theta), math::sin(theta))
}

pub fn density_profile(set: &GoodSet, theta: f64, radii: &[f64], method: DensityMethod) -> DensityProfile {
    let p = boundary_point(theta);
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for (k, &r) in radii.iter().enumerate() {
        let b = Ball { center: p, radius: r };
        let den = ball_domain_area(&b, &set.domain);
        let bound = set.bad_bound(p, r);
        match method {
            DensityMethod::LensExact => {
                let bad = set.lens_bad_ratio(p, r);
                rows.push(DensityRow { radius: r, good_ratio: 1.0 - bad, bad_ratio: bad, stderr: 0.0, bound, seed: None, pass: bad <= bound });
            }
            DensityMethod::MonteCarlo { seed, samples } => {
                let s = derive_seed(seed, theta.to_bits(), k as u64);
                let (inside, good) = count_pair(&b, samples, s, |z| set.domain.contains(z), |z| set.contains(z));
                if inside < MIN_HITS || den <= 0.0 {
                    dropped.push(r);
                    continue;
                }
                let n = samples as f64;
                let f = good as f64 / n;
                let scale = b.area() / den;
                let good_ratio = (f * scale).clamp(0.0, 1.0);
                let stderr = math::sqrt(f * (1.0 - f) / n) * scale;
                let bad = 1.0 - good_ratio;
                rows.push(DensityRow {
                    radius: r,
                    good_ratio,
                    bad_ratio: bad,
                    stderr,
                    bound,
                    seed: Some(s),
                    pass: bad <= bound + 3.0 * stderr,
                });
            }
        }
    }
    DensityProfile { theta, method, rows, dropped }
}

/// Monte Carlo hits inside shells at radii where the certificate says the
/// ball cannot meet them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VacuityReport {
    pub samples: u64,
    pub violations: u64,
    /// Smallest `r0` over the shells.
    pub min_r0: f64,
}

pub fn shell_vacuity(set: &GoodSet, thetas: &[f64], radii: &[f64], samples: u64, seed: u64) -> VacuityReport {
    let mut total = 0u64;
    let mut bad = 0u64;
    for &t in thetas {
        let p = boundary_point(t);
        for (k, &r) in radii.iter().enumerate() {
            let mut s = BallSampler::new(Ball { center: p, radius: r }, derive_seed(seed ^ 0x5eed, t.to_bits(), k as u64));
            for _ in 0..samples {
                let z = s.sample();
                total += 1;
                let hit = set
                    .index
                    .candidates(z)
                    .iter()
                    .map(|&k| &set.shells[k as usize])
                    .any(|sh| r < sh.r0 && sh.contains(z));
                bad += hit as u64;
            }
        }
    }
    let min_r0 = set.shells.iter().map(|s| s.r0).fold(f64::INFINITY, f64::min);
    VacuityReport { samples: total, violations: bad, min_r0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachBand {
    pub index: usize,
    pub inner_r: f64,
    pub outer_r: f64,
    pub points: usize,
    /// `sup |u_N − ψ(θ_p)|` over the band samples; zero when empty.
    pub sup_error: f64,
    /// Largest telescoped bound over components met by the band.
    pub max_bound: f64,
    /// Largest `ω_l` over those components' balls.
    pub max_oscillation: f64,
    /// Smallest oscillation index `l` over those balls.
    pub min_osc_index: usize,
    /// `sup |u − ψ(θ_p)|` over the band samples.
    pub blend: f64,
    /// `max_bound + max_oscillation + blend`.
    pub budget: f64,
    pub pass: bool,
}

impl ApproachBand {
    pub fn is_empty(&self) -> bool {
        self.points == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachProfile {
    pub theta: f64,
    pub psi: f64,
    /// Whether `θ` lies in the certified continuity set.
    pub certified: bool,
    pub bands: Vec<ApproachBand>,
}

impl ApproachProfile {
    pub fn pass(&self) -> bool {
        !self.certified || self.bands.iter().all(|b| b.pass)
    }

    /// Last nonempty band sup is at most the first nonempty one.
    pub fn settles(&self) -> bool {
        let mut full = self.bands.iter().filter(|b| !b.is_empty());
        match (full.next(), full.next_back()) {
            (Some(a), Some(b)) => b.sup_error <= a.sup_error,
            _ => true,
        }
    }
}

/// Bands `1 − 2^-k ≤ |z| < 1 − 2^-(k+1)` inside `B(p, 2^-(k-1))`, sampled on
/// the verify clouds of the components.
pub fn approach_profile(
    ch: &ChapletSet,
    cert: &RunCertificate,
    anchors: &[AnchorValue],
    u: &ContinuousExtension,
    theta: f64,
    bands: &[usize],
) -> ApproachProfile {
    let p = boundary_point(theta);
    let psi = u.psi().eval(theta);
    let certified = u.psi().continuity_set().contains(theta) && !u.psi().jumps().iter().any(|&j| math::angular_distance(j, theta) == 0.0);
    let target = Complex64::new(psi, 0.0);
    let mut out = Vec::new();
    for &k in bands {
        let inner = 1.0 - math::pow(2.0, -(k as f64));
        let outer = 1.0 - math::pow(2.0, -(k as f64) - 1.0);
        let reach = math::pow(2.0, -(k as f64) + 1.0);
        let mut band = ApproachBand {
            index: k,
            inner_r: inner,
            outer_r: outer,
            points: 0,
            sup_error: 0.0,
            max_bound: 0.0,
            max_oscillation: 0.0,
            min_osc_index: usize::MAX,
            blend: 0.0,
            budget: 0.0,
            pass: true,
        };
        for (j, c) in ch.components.iter().enumerate() {
            let mut met = false;
            for &z in &c.verify_cloud {
                let m = z.norm();
                if m < inner || m >= outer || (z - p).norm() >= reach {
                    continue;
                }
                met = true;
                band.points += 1;
                let v = cert.polynomial.eval(z);
                let e = match cert.operator {
                    OperatorKind::CauchyRiemann => (v - target).norm(),
                    OperatorKind::Laplace => (v.re - psi).abs(),
                };
                band.sup_error = band.sup_error.max(e);
                band.blend = band.blend.max((u.eval(z) - psi).abs());
            }
            if met {
                band.max_bound = band.max_bound.max(cert.bounds[j]);
                band.max_oscillation = band.max_oscillation.max(anchors[j].ball_oscillation.max(anchors[j].audit));
                let l = if ch.is_generic() { 1 } else { ch.cover.osc_index(c.id.ball) };
                band.min_osc_index = band.min_osc_index.min(l);
            }
        }
        if band.points == 0 {
            band.min_osc_index = 0;
        }
        band.budget = band.max_bound + band.max_oscillation + band.blend;
        band.pass = band.sup_error <= band.budget;
        out.push(band);
    }
    ApproachProfile { theta, psi, certified, bands: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WedgeGauge;

    fn shell_at_half() -> Shell {
        Shell {
            ball: 0,
            center: Complex64::new(0.0, 0.0),
            radius: 0.5,
            half_width: 0.01,
            ring: 0,
            budget: 0.25,
            boundary_distance: 0.5,
            rho: 0.0,
            r0: 0.49,
        }
    }

    #[test]
    fn whole_domain_ratio_is_one() {
        let set = GoodSet::whole(Domain::UnitDisc);
        let prof = density_profile(&set, 0.3, &[0.25, 0.125], DensityMethod::MonteCarlo { seed: 7, samples: 20_000 });
        assert!(prof.rows.iter().all(|r| (r.good_ratio - 1.0).abs() < 0.03 && r.pass));
        let exact = density_profile(&set, 0.3, &[0.25], DensityMethod::LensExact);
        assert_eq!(exact.rows[0].good_ratio, 1.0);
    }

    #[test]
    fn shell_vacuous_below_r0() {
        let set = GoodSet::new(Domain::UnitDisc, alloc::vec![shell_at_half()], Vec::new());
        let prof = density_profile(&set, 1.0, &[0.25, 0.125], DensityMethod::LensExact);
        assert!(prof.rows.iter().all(|r| r.good_ratio == 1.0));
        let big = density_profile(&set, 1.0, &[0.75], DensityMethod::LensExact);
        assert!(big.rows[0].good_ratio < 1.0);
        let v = shell_vacuity(&set, &[0.0, 1.0], &[0.25, 0.125], 10_000, 3);
        assert_eq!(v.violations, 0);
    }

    #[test]
    fn wedge_quadrature_matches_monte_carlo() {
        let w = Wedge { angle: 0.0, gauge: WedgeGauge { kappa: 4.0, cap: 1.0 } };
        let b = Ball { center: boundary_point(0.1), radius: 0.3 };
        let q = wedge_area(&w, &b, &Domain::UnitDisc);
        let (_, hits) = count_pair(&b, 400_000, 11, |z| Domain::UnitDisc.contains(z), |z| w.contains(z));
        let mc = hits as f64 / 400_000.0 * b.area();
        assert!((q - mc).abs() < 4.0 * math::sqrt(mc * b.area() / 400_000.0), "{q} {mc}");
    }

    #[test]
    fn arc_overlap_cases() {
        assert!((arc_overlap(0.5, 0.2, 0.0) - 0.4).abs() < 1e-15);
        assert_eq!(arc_overlap(0.1, 0.1, 1.0), 0.0);
        assert!((arc_overlap(0.3, 0.3, 0.3) - 0.3).abs() < 1e-15);
        assert!((arc_overlap(PI, 0.2, 2.0) - 0.4).abs() < 1e-12);
    }
}

use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{BallCover, ChapletError};
use crate::geometry::{ball_domain_area, lens_area, Annulus, Ball, Domain};
use crate::math::{self, PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellParams {
    /// Geometric cap on the half-width.
    pub eps_geom: f64,
    /// Factor applied to the area-budget thickness to absorb probe sampling.
    pub safety: f64,
    /// Dyadic exponents `k` of the certificate radii `2^-k`.
    pub radius_exponents: (u32, u32),
}

impl Default for ShellParams {
    fn default() -> Self {
        Self { eps_geom: 0.01, safety: 0.5, radius_exponents: (0, 12) }
    }
}

/// Open annulus `R_j` of half-width `tau` around the circle `s_j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub ball: usize,
    pub center: Complex64,
    pub radius: f64,
    pub half_width: f64,
    pub ring: usize,
    /// Density budget at every boundary point.
    pub budget: f64,
    /// `dist(s_j, ∂U)`.
    pub boundary_distance: f64,
    /// Lower bound of `μ(B(p, d_j/2) ∩ U)` over the probes.
    pub rho: f64,
    /// `B(p, r) ∩ R_j = ∅` for every boundary point `p` and `r < r0`.
    pub r0: f64,
}

impl Shell {
    pub fn annulus(&self) -> Annulus {
        Annulus { center: self.center, radius: self.radius, half_width: self.half_width }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        ((z - self.center).norm() - self.radius).abs() < self.half_width
    }

    pub fn area(&self) -> f64 {
        4.0 * PI * self.radius * self.half_width
    }

    /// Exact `μ(R_j ∩ B(p, r))` as a difference of lenses.
    pub fn ball_area(&self, p: Complex64, r: f64) -> f64 {
        let b = Ball { center: p, radius: r };
        let outer = Ball { center: self.center, radius: self.radius + self.half_width };
        let inner = Ball { center: self.center, radius: self.radius - self.half_width };
        (lens_area(&b, &outer) - lens_area(&b, &inner)).max(0.0)
    }

    /// Exact density ratio `μ(R_j ∩ B(p, r)) / μ(U ∩ B(p, r))`.
    pub fn ratio(&self, p: Complex64, r: f64, d: &Domain) -> f64 {
        let den = ball_domain_area(&Ball { center: p, radius: r }, d);
        if den > 0.0 {
            self.ball_area(p, r) / den
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellCertificate {
    pub probes: usize,
    pub radii: Vec<f64>,
    /// Largest measured ratio per shell over the probe/radius grid.
    pub worst_ratio: Vec<f64>,
    /// Largest ratio seen below each shell's `r0`; must be exactly zero.
    pub worst_vacuous: Vec<f64>,
    pub pass: bool,
}

/// `n` equally spaced probes on each boundary circle of the domain.
pub fn boundary_probes(d: &Domain, n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(1.0, TAU * k as f64 / n as f64)).collect();
    if let Domain::Annulus { inner_radius } = *d {
        v.extend((0..n).map(|k| Complex64::from_polar(inner_radius, TAU * k as f64 / n as f64)));
    }
    v
}

fn circle_boundary_distance(b: &Ball, d: &Domain) -> f64 {
    let m = b.center.norm();
    match *d {
        Domain::UnitDisc => 1.0 - m - b.radius,
        Domain::Annulus { inner_radius } => (1.0 - m - b.radius).min(m - b.radius - inner_radius),
    }
}

pub fn build_shells(cover: &BallCover, d: &Domain, probes: &[Complex64]) -> Result<(Vec<Shell>, ShellCertificate), ChapletError> {
    build_shells_with(cover, d, probes, &ShellParams::default())
}

/// Budgeted shells: ring `k` shares the budget `2^-(k+1)` equally among its
/// balls, so the whole family sums below one.
pub fn build_shells_with(
    cover: &BallCover,
    d: &Domain,
    probes: &[Complex64],
    p: &ShellParams,
) -> Result<(Vec<Shell>, ShellCertificate), ChapletError> {
    if probes.is_empty() {
        return Err(ChapletError::NoProbes);
    }
    let sizes = cover.ring_sizes();
    let max_r = cover.balls.iter().map(|b| b.radius).fold(0.0, f64::max);
    let idx = cover.index(0.0);
    let mut near = Vec::new();
    let mut shells = Vec::with_capacity(cover.len());
    for (j, b) in cover.balls.iter().enumerate() {
        let ring = cover.rings[j];
        let budget = math::pow(2.0, -((ring + 1) as f64)) / sizes[ring] as f64;
        let dj = circle_boundary_distance(b, d);
        let rho = probes
            .iter()
            .map(|&q| ball_domain_area(&Ball { center: q, radius: 0.5 * dj }, d))
            .fold(f64::INFINITY, f64::min);
        let mut tau = p.eps_geom.min(p.safety * budget * rho / (4.0 * PI * b.radius)).min(0.25 * dj);
        let reach = b.radius + max_r + 2.0 * p.eps_geom;
        idx.candidates_in(b.center.re - reach, b.center.im - reach, b.center.re + reach, b.center.im + reach, &mut near);
        for &k in &near {
            let k = k as usize;
            if k == j {
                continue;
            }
            let o = &cover.balls[k];
            let dist = (o.center - b.center).norm();
            let gap = if dist > b.radius + o.radius {
                dist - b.radius - o.radius
            } else if dist < (b.radius - o.radius).abs() {
                (b.radius - o.radius).abs() - dist
            } else {
                continue;
            };
            tau = tau.min(0.25 * gap);
        }
        if !(tau > f64::EPSILON) {
            return Err(ChapletError::ShellTooThin { index: j });
        }
        shells.push(Shell {
            ball: j,
            center: b.center,
            radius: b.radius,
            half_width: tau,
            ring,
            budget,
            boundary_distance: dj,
            rho,
            r0: dj - tau,
        });
    }
    let cert = certify(&shells, d, probes, p);
    Ok((shells, cert))
}

fn certify(shells: &[Shell], d: &Domain, probes: &[Complex64], p: &ShellParams) -> ShellCertificate {
    let radii: Vec<f64> = (p.radius_exponents.0..=p.radius_exponents.1).map(|k| math::pow(2.0, -(k as f64))).collect();
    let mut worst_ratio = Vec::with_capacity(shells.len());
    let mut worst_vacuous = Vec::with_capacity(shells.len());
    let mut pass = true;
    for s in shells {
        let mut w = 0.0f64;
        let mut v = 0.0f64;
        let mut check = |q: Complex64, r: f64| {
            let x = s.ratio(q, r, d);
            w = w.max(x);
            if r < s.r0 {
                v = v.max(x);
            }
        };
        for &q in probes {
            for &r in &radii {
                check(q, r);
            }
            check(q, s.r0 * (1.0 - 1e-12));
        }
        pass &= w < s.budget && v == 0.0;
        worst_ratio.push(w);
        worst_vacuous.push(v);
    }
    ShellCertificate { probes: probes.len(), radii, worst_ratio, worst_vacuous, pass }
}

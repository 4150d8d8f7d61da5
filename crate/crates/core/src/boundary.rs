//! Boundary data `psi`, its continuity set, the Lusin tower and the
//! continuous extension `u` into the disc.

use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arcs::{ArcSet, Interval};
use crate::geometry::{ball_domain_area, Ball, Domain, OpenSet, Wedge, WedgeGauge};
use crate::math::{self, PI, TAU};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("boundary pieces must be non-empty, contiguous and cover one full turn")]
    BadPartition,
    #[error("piece {index}: {reason}")]
    BadPiece { index: usize, reason: &'static str },
    #[error("jump angle {0} is not finite")]
    NonFiniteJump(f64),
    #[error("continuity set meets the jump at {0}")]
    JumpInContinuitySet(f64),
    #[error("psi jumps by {gap} at {angle} but the angle is not declared as a jump")]
    UndeclaredJump { angle: f64, gap: f64 },
    #[error("protected set {protected} touches target set {target}")]
    TouchingSets { protected: usize, target: usize },
    #[error("invalid measure: {0}")]
    BadMeasure(&'static str),
    #[error("invalid extension parameter: {0}")]
    BadExtension(&'static str),
}

/// `c + l·θ + Σ a_k cos kθ + Σ b_k sin kθ`, with θ the absolute angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    pub constant: f64,
    #[serde(default)]
    pub linear: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.constant + self.linear * theta;
        for (k, a) in self.cos.iter().enumerate() {
            v += a * math::cos((k + 1) as f64 * theta);
        }
        for (k, b) in self.sin.iter().enumerate() {
            v += b * math::sin((k + 1) as f64 * theta);
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "payload", rename_all = "lowercase")]
pub enum PieceValues {
    Const(f64),
    /// Equally spaced samples over the closed arc, linearly interpolated.
    Samples(Vec<f64>),
    Expr(TrigPoly),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub values: PieceValues,
}

impl Piece {
    fn eval(&self, theta: f64) -> f64 {
        match &self.values {
            PieceValues::Const(c) => *c,
            PieceValues::Expr(p) => p.eval(theta),
            PieceValues::Samples(s) => {
                let t = ((theta - self.start) / (self.end - self.start)).clamp(0.0, 1.0);
                let x = t * (s.len() - 1) as f64;
                let i = (math::floor(x) as usize).min(s.len() - 2);
                let f = x - i as f64;
                s[i] * (1.0 - f) + s[i + 1] * f
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFunction {
    pieces: Vec<Piece>,
    jumps: Vec<f64>,
    continuity: ArcSet,
}

const JUMP_TOL: f64 = 1e-9;

impl BoundaryFunction {
    /// Validate a piecewise description. Pieces are half-open `[start, end)`,
    /// sorted and contiguous over one full turn starting at `pieces[0].start`.
    pub fn new(pieces: Vec<Piece>, jumps: Vec<f64>, continuity: ArcSet) -> Result<Self, BoundaryError> {
        let first = pieces.first().ok_or(BoundaryError::BadPartition)?;
        let origin = first.start;
        if !origin.is_finite() || !(0.0..TAU).contains(&origin) {
            return Err(BoundaryError::BadPartition);
        }
        let mut at = origin;
        for (index, p) in pieces.iter().enumerate() {
            if (p.start - at).abs() > 1e-12 || !(p.end > p.start) {
                return Err(BoundaryError::BadPartition);
            }
            at = p.end;
            match &p.values {
                PieceValues::Samples(s) if s.len() < 2 => {
                    return Err(BoundaryError::BadPiece { index, reason: "needs at least two samples" })
                }
                PieceValues::Samples(s) if s.iter().any(|v| !v.is_finite()) => {
                    return Err(BoundaryError::BadPiece { index, reason: "non-finite sample" })
                }
                PieceValues::Const(c) if !c.is_finite() => {
                    return Err(BoundaryError::BadPiece { index, reason: "non-finite constant" })
                }
                _ => {}
            }
        }
        if (at - origin - TAU).abs() > 1e-9 {
            return Err(BoundaryError::BadPartition);
        }
        let mut jumps: Vec<f64> = jumps
            .into_iter()
            .map(|j| if j.is_finite() { Ok(math::wrap_angle(j)) } else { Err(BoundaryError::NonFiniteJump(j)) })
            .collect::<Result<_, _>>()?;
        jumps.sort_by(f64::total_cmp);
        jumps.dedup_by(|a, b| math::angular_distance(*a, *b) < 1e-15);
        for &j in &jumps {
            if continuity.contains(j) {
                return Err(BoundaryError::JumpInContinuitySet(j));
            }
        }
        let f = Self { pieces, jumps, continuity };
        for i in 0..f.pieces.len() {
            let a = f.pieces[i].end;
            let next = &f.pieces[(i + 1) % f.pieces.len()];
            let right = next.eval(if i + 1 == f.pieces.len() { a - TAU } else { a });
            let left = f.pieces[i].eval(a);
            let gap = (right - left).abs();
            if gap > JUMP_TOL && f.jumps.iter().all(|j| math::angular_distance(*j, a) > 1e-12) {
                return Err(BoundaryError::UndeclaredJump { angle: math::wrap_angle(a), gap });
            }
        }
        Ok(f)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            pieces: alloc::vec![Piece { start: 0.0, end: TAU, values: PieceValues::Const(c) }],
            jumps: Vec::new(),
            continuity: ArcSet::full(),
        }
    }

    /// `lo` on `[0, pi)` and `hi` on `[pi, 2pi)`, jumps at 0 and pi.
    pub fn step(lo: f64, hi: f64, continuity: ArcSet) -> Result<Self, BoundaryError> {
        Self::new(
            alloc::vec![
                Piece { start: 0.0, end: PI, values: PieceValues::Const(lo) },
                Piece { start: PI, end: TAU, values: PieceValues::Const(hi) },
            ],
            alloc::vec![0.0, PI],
            continuity,
        )
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn jumps(&self) -> &[f64] {
        &self.jumps
    }

    pub fn continuity_set(&self) -> &ArcSet {
        &self.continuity
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let origin = self.pieces[0].start;
        let t = origin + math::wrap_angle(theta - origin);
        let p = self
            .pieces
            .iter()
            .find(|p| t >= p.start && t < p.end)
            .unwrap_or(&self.pieces[self.pieces.len() - 1]);
        p.eval(t)
    }

    /// Mean of `psi` over the circle by the midpoint rule.
    pub fn circle_mean(&self, n: usize) -> f64 {
        let n = n.max(1);
        (0..n).map(|k| self.eval(TAU * (k as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64
    }

    /// Smallest angular gap between consecutive jumps (`2pi` with at most one jump).
    pub fn min_jump_gap(&self) -> f64 {
        if self.jumps.len() < 2 {
            return TAU;
        }
        let n = self.jumps.len();
        (0..n)
            .map(|i| math::wrap_angle(self.jumps[(i + 1) % n] - self.jumps[i]))
            .map(|g| if g == 0.0 { TAU } else { g })
            .fold(f64::INFINITY, f64::min)
    }

    /// Number of angular sectors cut out by the jumps.
    pub fn sector_count(&self) -> usize {
        self.jumps.len().max(1)
    }

    /// Index of the sector `[jump_m, jump_{m+1})` holding `theta`.
    pub fn sector(&self, theta: f64) -> usize {
        sector_of(&self.jumps, theta)
    }

    /// Start angle and width of sector `m`.
    pub fn sector_span(&self, m: usize) -> (f64, f64) {
        let n = self.jumps.len();
        if n < 2 {
            return (self.jumps.first().copied().unwrap_or(0.0), TAU);
        }
        let a = self.jumps[m];
        (a, math::wrap_angle(self.jumps[(m + 1) % n] - a))
    }

    /// Open arcs between consecutive jumps as `(start, length)`.
    pub fn continuity_arcs(&self) -> Vec<(f64, f64)> {
        match self.jumps.len() {
            0 => Vec::new(),
            1 => alloc::vec![(self.jumps[0], TAU)],
            n => (0..n)
                .map(|i| (self.jumps[i], math::wrap_angle(self.jumps[(i + 1) % n] - self.jumps[i])))
                .collect(),
        }
    }
}

/// Sector index of `theta` among sorted jump angles.
pub fn sector_of(jumps: &[f64], theta: f64) -> usize {
    let n = jumps.len();
    if n < 2 {
        return 0;
    }
    let t = math::wrap_angle(theta);
    match jumps.iter().rposition(|&j| j <= t) {
        Some(m) => m,
        None => n - 1,
    }
}

/// Largest `|psi(a) − psi(b)|` over sample pairs of `set` within angular
/// distance `h`.
pub fn sampled_oscillation(psi: &BoundaryFunction, set: &ArcSet, h: f64, per_unit: f64) -> f64 {
    let mut pts: Vec<(f64, f64)> = set.samples(per_unit).into_iter().map(|t| (t, psi.eval(t))).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let n = pts.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for k in 1..n {
            let j = (i + k) % n;
            if math::angular_distance(pts[i].0, pts[j].0) > h {
                break;
            }
            worst = worst.max((pts[i].1 - pts[j].1).abs());
        }
    }
    worst
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryMeasure {
    ArcLength,
    /// Density samples at `2pi·k/n`, linearly interpolated around the circle.
    Weighted { density: Vec<f64> },
    Atomic { atoms: Vec<(f64, f64)> },
}

impl BoundaryMeasure {
    pub fn validate(&self) -> Result<(), BoundaryError> {
        match self {
            BoundaryMeasure::ArcLength => Ok(()),
            BoundaryMeasure::Weighted { density } => {
                if density.is_empty() {
                    Err(BoundaryError::BadMeasure("weighted measure needs density samples"))
                } else if density.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
                    Err(BoundaryError::BadMeasure("density samples must be finite and nonnegative"))
                } else {
                    Ok(())
                }
            }
            BoundaryMeasure::Atomic { atoms } => {
                if atoms.iter().any(|(a, m)| !(a.is_finite() && m.is_finite() && *m >= 0.0)) {
                    Err(BoundaryError::BadMeasure("atoms need finite angles and nonnegative masses"))
                } else {
                    Ok(())
                }
            }
        }
    }

    fn density_integral(density: &[f64], lo: f64, hi: f64) -> f64 {
        let n = density.len();
        if n == 1 {
            return density[0] * (hi - lo);
        }
        let step = TAU / n as f64;
        let at = |t: f64| {
            let x = t / step;
            let i = math::floor(x) as usize;
            let f = x - i as f64;
            density[i % n] * (1.0 - f) + density[(i + 1) % n] * f
        };
        let mut total = 0.0;
        let mut a = lo;
        while a < hi {
            let b = ((math::floor(a / step) + 1.0) * step).min(hi);
            total += 0.5 * (at(a) + at(b)) * (b - a);
            if b <= a {
                break;
            }
            a = b;
        }
        total
    }

    pub fn mass(&self, set: &ArcSet) -> f64 {
        match self {
            BoundaryMeasure::ArcLength => set.length(),
            BoundaryMeasure::Weighted { density } => set
                .intervals()
                .iter()
                .map(|i| Self::density_integral(density, i.lo, i.hi))
                .sum(),
            BoundaryMeasure::Atomic { atoms } => {
                atoms.iter().filter(|(a, _)| set.contains(*a)).map(|(_, m)| m).sum()
            }
        }
    }

    pub fn total(&self) -> f64 {
        self.mass(&ArcSet::full())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LusinDecomposition {
    pub s: ArcSet,
    pub q: Vec<ArcSet>,
    /// Closure of the part of the circle outside `F`.
    pub uncovered: ArcSet,
    pub uncovered_mass: f64,
    /// Set when `F` misses a set of positive `nu`-measure.
    pub uncovered_positive: bool,
}

impl LusinDecomposition {
    /// `S ∪ Q_1 ∪ … ∪ Q_k`.
    pub fn prefix(&self, k: usize) -> ArcSet {
        self.q.iter().take(k).fold(self.s.clone(), |acc, q| acc.union(q))
    }

    pub fn covered(&self) -> ArcSet {
        self.prefix(self.q.len())
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.s.contains(theta) || self.q.iter().any(|q| q.contains(theta))
    }
}

/// Split the continuity arcs of `psi` into `S` and closed sets `Q_k` that stay
/// `2^-(k+1)` away from the jumps, separated by gaps `2^-(n+k+1)`.
pub fn lusin_decompose(
    psi: &BoundaryFunction,
    nu: &BoundaryMeasure,
    max_sets: usize,
) -> Result<LusinDecomposition, BoundaryError> {
    nu.validate()?;
    let s = psi.continuity.clone();
    for &j in &psi.jumps {
        if s.contains(j) {
            return Err(BoundaryError::JumpInContinuitySet(j));
        }
    }
    let n = max_sets.min(40);
    let margin = |k: usize| math::pow(2.0, -((k + 1) as f64));
    let gap = |k: usize| math::pow(2.0, -((n + k + 1) as f64));
    let eta = gap(n);
    let mut q = Vec::new();
    for k in 1..=n {
        let mut parts: Vec<Interval> = Vec::new();
        let arcs = if psi.jumps.is_empty() { alloc::vec![(0.0, TAU)] } else { psi.continuity_arcs() };
        for (start, len) in arcs {
            let mut push = |a: f64, b: f64| {
                if b >= a {
                    parts.extend_from_slice(ArcSet::arc(start + a, start + b).intervals());
                }
            };
            if psi.jumps.is_empty() {
                if k == 1 {
                    push(0.0, TAU);
                }
                continue;
            }
            let half = 0.5 * len;
            if k == 1 {
                push(margin(1), len - margin(1));
            } else {
                let outer = (margin(k - 1) - gap(k)).min(half - gap(k));
                push(margin(k), outer);
                push(len - outer, len - margin(k));
            }
        }
        let qk = ArcSet::from_intervals(parts).minus_open_dilation(&s, eta);
        let qk = q.iter().fold(qk, |acc: ArcSet, prev: &ArcSet| acc.minus_open_dilation(prev, 0.0));
        if !qk.is_empty() {
            q.push(qk);
        }
    }
    let mut d = LusinDecomposition {
        s,
        q,
        uncovered: ArcSet::empty(),
        uncovered_mass: 0.0,
        uncovered_positive: false,
    };
    let covered = d.covered();
    d.uncovered = complement_closure(&covered);
    let atoms_out = match nu {
        BoundaryMeasure::Atomic { atoms } => atoms.iter().filter(|(a, _)| !covered.contains(*a)).map(|(_, m)| m).sum(),
        _ => 0.0,
    };
    d.uncovered_mass = match nu {
        BoundaryMeasure::Atomic { .. } => atoms_out,
        _ => (nu.total() - nu.mass(&covered)).max(0.0),
    };
    d.uncovered_positive = d.uncovered_mass > 0.0;
    Ok(d)
}

fn complement_closure(set: &ArcSet) -> ArcSet {
    let mut v = Vec::new();
    let mut at = 0.0;
    for i in set.intervals() {
        if i.lo > at {
            v.push(Interval { lo: at, hi: i.lo });
        }
        at = at.max(i.hi);
    }
    if at < TAU {
        v.push(Interval { lo: at, hi: TAU });
    }
    ArcSet::from_intervals(v)
}

/// Open neighbourhood `{z ∈ D : dist(z, Q_l) < delta}` of a target arc set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryNeighbourhood {
    pub protected: usize,
    pub target: usize,
    pub arcs: ArcSet,
    pub delta: f64,
    pub r0: f64,
    pub rho: f64,
    pub budget: f64,
    pub area_bound: f64,
}

impl BoundaryNeighbourhood {
    pub fn contains(&self, z: Complex64) -> bool {
        if z.norm() >= 1.0 {
            return false;
        }
        let theta = math::angle(z.re, z.im);
        if self.arcs.contains(theta) {
            return 1.0 - z.norm() < self.delta;
        }
        self.arcs
            .intervals()
            .iter()
            .flat_map(|i| [i.lo, i.hi])
            .any(|e| (z - Complex64::from_polar(1.0, e)).norm() < self.delta)
    }
}

/// Area of `{z ∈ D : dist(z, arcs) < delta}` is at most the annular sector
/// of depth `delta` over the arcs widened by `asin(delta)` on each side.
pub fn neighbourhood_area_bound(arcs: &ArcSet, delta: f64) -> f64 {
    let inner = (1.0 - delta).max(0.0);
    let pieces = arcs.intervals().len() as f64;
    let width = (arcs.length() + 2.0 * pieces * math::asin(delta.min(1.0))).min(TAU);
    0.5 * (1.0 - inner * inner) * width
}

/// Neighbourhoods of each `Q_l` whose area is below `budgets[l-1]·rho`, where
/// `rho` bounds `μ(B(p, r_0) ∩ U)` from below over the protected prefix.
pub fn budgeted_wedges(
    decomp: &LusinDecomposition,
    budgets: &[f64],
    d: &Domain,
) -> Result<Vec<BoundaryNeighbourhood>, BoundaryError> {
    let mut out = Vec::new();
    let n = decomp.q.len();
    for j in 0..n {
        let protected = decomp.prefix(j);
        if protected.is_empty() {
            continue;
        }
        for l in (j + 1)..=n {
            let target = &decomp.q[l - 1];
            let r0 = 0.5 * protected.chord_distance(target);
            if !(r0 > 0.0) {
                return Err(BoundaryError::TouchingSets { protected: j, target: l });
            }
            let rho = protected
                .samples(64.0)
                .into_iter()
                .map(|t| ball_domain_area(&Ball { center: Complex64::from_polar(1.0, t), radius: r0 }, d))
                .fold(f64::INFINITY, f64::min);
            let budget = budgets.get(l - 1).copied().unwrap_or_else(|| math::pow(2.0, -(l as f64)));
            let mut delta = r0;
            if budget < 1.0 {
                while neighbourhood_area_bound(target, delta) >= budget * rho {
                    delta *= 0.5;
                    if delta <= f64::EPSILON {
                        return Err(BoundaryError::TouchingSets { protected: j, target: l });
                    }
                }
            }
            out.push(BoundaryNeighbourhood {
                protected: j,
                target: l,
                arcs: target.clone(),
                delta,
                r0,
                rho,
                budget,
                area_bound: neighbourhood_area_bound(target, delta),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    /// Wedge half-width `min(kappa·δ², cap)`; `cap` is further limited to a
    /// third of the smallest jump gap.
    pub kappa: f64,
    pub cap: f64,
    /// Inside `|z| < core_radius` the extension contracts radially to the
    /// circle mean of `psi`.
    pub core_radius: f64,
}

impl Default for ExtensionParams {
    fn default() -> Self {
        Self { kappa: 1.0, cap: 1.0, core_radius: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousExtension {
    psi: BoundaryFunction,
    gauge: WedgeGauge,
    core_radius: f64,
    mean: f64,
    certified: LusinDecomposition,
}

pub fn extend_continuous(
    psi: &BoundaryFunction,
    decomp: &LusinDecomposition,
    params: ExtensionParams,
) -> Result<ContinuousExtension, BoundaryError> {
    if psi.jumps.iter().any(|j| !j.is_finite()) {
        return Err(BoundaryError::BadExtension("jump set must be finite"));
    }
    if !(params.kappa > 0.0 && params.cap > 0.0) {
        return Err(BoundaryError::BadExtension("wedge gauge must be positive"));
    }
    if !(params.core_radius > 0.0 && params.core_radius < 1.0) {
        return Err(BoundaryError::BadExtension("core radius must lie in (0, 1)"));
    }
    let cap = params.cap.min(psi.min_jump_gap() / 3.0).min(PI / 2.0);
    Ok(ContinuousExtension {
        psi: psi.clone(),
        gauge: WedgeGauge { kappa: params.kappa, cap },
        core_radius: params.core_radius,
        mean: psi.circle_mean(4096),
        certified: decomp.clone(),
    })
}

impl ContinuousExtension {
    pub fn psi(&self) -> &BoundaryFunction {
        &self.psi
    }

    pub fn gauge(&self) -> WedgeGauge {
        self.gauge
    }

    pub fn core_radius(&self) -> f64 {
        self.core_radius
    }

    pub fn decomposition(&self) -> &LusinDecomposition {
        &self.certified
    }

    pub fn wedges(&self) -> Vec<Wedge> {
        self.psi.jumps.iter().map(|&angle| Wedge { angle, gauge: self.gauge }).collect()
    }

    pub fn core(&self) -> Ball {
        Ball { center: Complex64::new(0.0, 0.0), radius: self.core_radius }
    }

    /// The exceptional set as open pieces: the core disc and the jump wedges.
    pub fn exceptional_sets(&self) -> Vec<OpenSet> {
        let mut v = alloc::vec![OpenSet::Ball(self.core())];
        v.extend(self.wedges().into_iter().map(OpenSet::Wedge));
        v
    }

    /// The jump wedge containing `z`, as `(jump angle, signed offset, half-width)`.
    fn wedge_at(&self, rho: f64, theta: f64) -> Option<(f64, f64, f64)> {
        let h = self.gauge.half_width(1.0 - rho);
        self.psi.jumps.iter().find_map(|&a| {
            let mut s = math::wrap_angle(theta - a);
            if s > PI {
                s -= TAU;
            }
            (s.abs() < h).then_some((a, s, h))
        })
    }

    /// Whether `z` lies in the exceptional set: the core disc or a jump wedge.
    pub fn exceptional(&self, z: Complex64) -> bool {
        let rho = z.norm();
        rho < self.core_radius || (rho < 1.0 && self.wedge_at(rho, math::angle(z.re, z.im)).is_some())
    }

    fn outer(&self, rho: f64, theta: f64) -> f64 {
        match self.wedge_at(rho, theta) {
            None => self.psi.eval(theta),
            Some((a, s, h)) => {
                let t = (s + h) / (2.0 * h);
                (1.0 - t) * self.psi.eval(a - h) + t * self.psi.eval(a + h)
            }
        }
    }

    pub fn eval(&self, z: Complex64) -> f64 {
        let rho = z.norm();
        let theta = math::angle(z.re, z.im);
        if rho >= self.core_radius {
            self.outer(rho, theta)
        } else {
            let edge = self.outer(self.core_radius, theta);
            self.mean + (rho / self.core_radius) * (edge - self.mean)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step() -> BoundaryFunction {
        BoundaryFunction::step(0.0, 1.0, ArcSet::empty()).unwrap()
    }

    #[test]
    fn sectors_follow_jumps() {
        let f = step();
        assert_eq!(f.sector_count(), 2);
        assert_eq!(f.sector(0.0), 0);
        assert_eq!(f.sector(3.0), 0);
        assert_eq!(f.sector(PI), 1);
        assert_eq!(f.sector(-0.1), 1);
        assert_eq!(f.sector_span(1), (PI, PI));
    }

    #[test]
    fn step_evaluates() {
        let f = step();
        assert_eq!(f.eval(0.0), 0.0);
        assert_eq!(f.eval(3.0), 0.0);
        assert_eq!(f.eval(PI), 1.0);
        assert_eq!(f.eval(-0.1), 1.0);
        assert!((f.circle_mean(1000) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn undeclared_jump_rejected() {
        let e = BoundaryFunction::new(
            alloc::vec![
                Piece { start: 0.0, end: PI, values: PieceValues::Const(0.0) },
                Piece { start: PI, end: TAU, values: PieceValues::Const(1.0) },
            ],
            alloc::vec![0.0],
            ArcSet::empty(),
        );
        assert!(matches!(e, Err(BoundaryError::UndeclaredJump { .. })));
    }

    #[test]
    fn samples_and_expr_pieces() {
        let f = BoundaryFunction::new(
            alloc::vec![
                Piece { start: 0.0, end: PI, values: PieceValues::Samples(alloc::vec![0.0, 1.0, 0.0]) },
                Piece {
                    start: PI,
                    end: TAU,
                    values: PieceValues::Expr(TrigPoly { constant: 0.0, linear: 0.0, cos: Vec::new(), sin: alloc::vec![1.0] }),
                },
            ],
            Vec::new(),
            ArcSet::full(),
        )
        .unwrap();
        assert!((f.eval(PI / 2.0) - 1.0).abs() < 1e-15);
        assert!((f.eval(1.5 * PI) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn continuous_full_circle() {
        let f = BoundaryFunction::constant(2.0);
        let d = lusin_decompose(&f, &BoundaryMeasure::ArcLength, 3).unwrap();
        assert!(d.q.is_empty());
        assert_eq!(d.uncovered_mass, 0.0);
        assert!((d.covered().length() - TAU).abs() < 1e-15);
    }

    #[test]
    fn step_margins() {
        let d = lusin_decompose(&step(), &BoundaryMeasure::ArcLength, 2).unwrap();
        assert_eq!(d.q.len(), 2);
        assert!(d.uncovered_mass <= 4.0 * 0.25);
        assert!(!d.covered().contains(0.0) && !d.covered().contains(PI));
        assert_eq!(d.q[0].intersect(&d.q[1]), ArcSet::empty());
    }

    #[test]
    fn atom_at_jump_is_flagged() {
        let nu = BoundaryMeasure::Atomic { atoms: alloc::vec![(PI, 1.0)] };
        let d = lusin_decompose(&step(), &nu, 4).unwrap();
        assert_eq!(d.uncovered_mass, 1.0);
        assert!(d.uncovered_positive);
    }

    #[test]
    fn continuity_set_must_avoid_jumps() {
        let e = BoundaryFunction::step(0.0, 1.0, ArcSet::arc(-0.1, 0.1));
        assert!(matches!(e, Err(BoundaryError::JumpInContinuitySet(_))));
    }

    #[test]
    fn opposite_point_neighbourhood() {
        let d = LusinDecomposition {
            s: ArcSet::point(0.0),
            q: alloc::vec![ArcSet::point(PI)],
            uncovered: ArcSet::empty(),
            uncovered_mass: 0.0,
            uncovered_positive: false,
        };
        let w = budgeted_wedges(&d, &[0.5], &Domain::UnitDisc).unwrap();
        assert_eq!(w.len(), 1);
        assert!((w[0].r0 - 1.0).abs() < 1e-12);
        assert!(w[0].area_bound < 0.5 * w[0].rho);
        let v = budgeted_wedges(&d, &[1.0], &Domain::UnitDisc).unwrap();
        assert_eq!(v[0].delta, v[0].r0);
    }

    #[test]
    fn constant_extends_constantly() {
        let f = BoundaryFunction::constant(3.5);
        let d = lusin_decompose(&f, &BoundaryMeasure::ArcLength, 0).unwrap();
        let u = extend_continuous(&f, &d, ExtensionParams::default()).unwrap();
        for z in [Complex64::new(0.0, 0.0), Complex64::new(0.1, 0.05), Complex64::new(-0.7, 0.6)] {
            assert_eq!(u.eval(z), 3.5);
        }
    }

    #[test]
    fn step_extension_off_wedges() {
        let f = step();
        let d = lusin_decompose(&f, &BoundaryMeasure::ArcLength, 3).unwrap();
        let u = extend_continuous(&f, &d, ExtensionParams::default()).unwrap();
        assert!((u.gauge().half_width(0.1) - 0.01).abs() < 1e-17);
        assert_eq!(u.eval(Complex64::from_polar(0.9, 0.0101)), 0.0);
        assert_eq!(u.eval(Complex64::from_polar(0.9, PI + 0.0101)), 1.0);
        let mid = u.eval(Complex64::from_polar(0.9, 0.0));
        assert!((mid - 0.5).abs() < 1e-12);
        assert!((u.eval(Complex64::new(0.0, 0.0)) - 0.5).abs() < 1e-12);
    }
}

//! Planar measure primitives: balls, domains, open removal sets and
//! composite membership.

use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{self, PI};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point ({re}, {im}) is not in the domain")]
    OutsideDomain { re: f64, im: f64 },
    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("annulus inner radius must lie in (0, 1), got {0}")]
    BadInnerRadius(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Complex64,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Complex64, radius: f64) -> Result<Self, GeometryError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(Self { center, radius })
        } else {
            Err(GeometryError::NonPositiveRadius(radius))
        }
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Open ball membership.
    pub fn contains_open(&self, z: Complex64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Closed ball membership.
    pub fn contains_closed(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }

    pub fn contains_ball(&self, other: &Ball) -> bool {
        (other.center - self.center).norm() + other.radius <= self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Domain {
    UnitDisc,
    Annulus {
        #[serde(rename = "innerRadius")]
        inner_radius: f64,
    },
}

impl Domain {
    pub fn annulus(inner_radius: f64) -> Result<Self, GeometryError> {
        if inner_radius > 0.0 && inner_radius < 1.0 {
            Ok(Domain::Annulus { inner_radius })
        } else {
            Err(GeometryError::BadInnerRadius(inner_radius))
        }
    }

    pub fn inner_radius(&self) -> f64 {
        match *self {
            Domain::UnitDisc => 0.0,
            Domain::Annulus { inner_radius } => inner_radius,
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        match *self {
            Domain::UnitDisc => r < 1.0,
            Domain::Annulus { inner_radius } => r < 1.0 && r > inner_radius,
        }
    }

    pub fn area(&self) -> f64 {
        let a = self.inner_radius();
        PI * (1.0 - a * a)
    }

    pub fn is_boundary_point(&self, z: Complex64, tol: f64) -> bool {
        let r = z.norm();
        match *self {
            Domain::UnitDisc => (r - 1.0).abs() <= tol,
            Domain::Annulus { inner_radius } => {
                (r - 1.0).abs() <= tol || (r - inner_radius).abs() <= tol
            }
        }
    }
}

/// Area of `b1 ∩ b2` from the circular-lens closed form.
pub fn lens_area(b1: &Ball, b2: &Ball) -> f64 {
    let (r1, r2) = (b1.radius, b2.radius);
    let d = (b1.center - b2.center).norm();
    if d >= r1 + r2 {
        return 0.0;
    }
    let small = r1.min(r2);
    if d <= (r1 - r2).abs() {
        return PI * small * small;
    }
    let a1 = math::acos((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1));
    let a2 = math::acos((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2));
    let area = r1 * r1 * segment(2.0 * a1) + r2 * r2 * segment(2.0 * a2);
    area.clamp(0.0, PI * small * small)
}

/// Area of the unit-radius circular segment cut by a chord of central
/// angle `x`, `(x − sin x)/2`, with a series near zero.
fn segment(x: f64) -> f64 {
    if x < 0.05 {
        let x2 = x * x;
        let x3 = x2 * x;
        0.5 * x3 * (1.0 / 6.0 - x2 * (1.0 / 120.0 - x2 * (1.0 / 5040.0 - x2 / 362_880.0)))
    } else {
        0.5 * (x - math::sin(x))
    }
}

/// Exact `μ(B ∩ U)`.
pub fn ball_domain_area(b: &Ball, d: &Domain) -> f64 {
    let unit = Ball { center: Complex64::new(0.0, 0.0), radius: 1.0 };
    let outer = lens_area(b, &unit);
    match *d {
        Domain::UnitDisc => outer,
        Domain::Annulus { inner_radius } => {
            let hole = Ball { center: Complex64::new(0.0, 0.0), radius: inner_radius };
            (outer - lens_area(b, &hole)).max(0.0)
        }
    }
}

pub fn dist_to_boundary(z: Complex64, d: &Domain) -> Result<f64, GeometryError> {
    if !d.contains(z) {
        return Err(GeometryError::OutsideDomain { re: z.re, im: z.im });
    }
    let r = z.norm();
    Ok(match *d {
        Domain::UnitDisc => 1.0 - r,
        Domain::Annulus { inner_radius } => (1.0 - r).min(r - inner_radius),
    })
}

/// Angular gauge of a jump wedge: half-width `min(kappa·δ², cap)` at depth δ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeGauge {
    pub kappa: f64,
    pub cap: f64,
}

impl WedgeGauge {
    pub const SQUARE: WedgeGauge = WedgeGauge { kappa: 1.0, cap: f64::INFINITY };

    pub fn half_width(&self, depth: f64) -> f64 {
        (self.kappa * depth * depth).min(self.cap)
    }
}

/// Open wedge `{ρe^{iθ} : |θ − angle| < h(1 − ρ), ρ < 1}` at a jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub angle: f64,
    pub gauge: WedgeGauge,
}

impl Wedge {
    pub fn contains(&self, z: Complex64) -> bool {
        let rho = z.norm();
        if rho >= 1.0 {
            return false;
        }
        let h = self.gauge.half_width(1.0 - rho);
        if h >= PI {
            return true;
        }
        math::angular_distance(math::angle(z.re, z.im), self.angle) < h
    }
}

/// Open round annulus `{z : ||z − center| − radius| < half_width}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annulus {
    pub center: Complex64,
    pub radius: f64,
    pub half_width: f64,
}

impl Annulus {
    pub fn contains(&self, z: Complex64) -> bool {
        ((z - self.center).norm() - self.radius).abs() < self.half_width
    }

    pub fn inner_radius(&self) -> f64 {
        (self.radius - self.half_width).max(0.0)
    }

    pub fn outer_radius(&self) -> f64 {
        self.radius + self.half_width
    }

    pub fn area(&self) -> f64 {
        let (a, b) = (self.inner_radius(), self.outer_radius());
        PI * (b * b - a * a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OpenSet {
    Ball(Ball),
    Shell(Annulus),
    Wedge(Wedge),
}

impl OpenSet {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            OpenSet::Ball(b) => b.contains_open(z),
            OpenSet::Shell(s) => s.contains(z),
            OpenSet::Wedge(w) => w.contains(z),
        }
    }
}

/// Closed angular sector `{z : arg z ∈ [start, start + width]}` about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub start: f64,
    pub width: f64,
}

impl Sector {
    pub fn contains_angle(&self, theta: f64) -> bool {
        if self.width >= math::TAU {
            return true;
        }
        math::wrap_angle(theta - self.start) <= self.width
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.contains_angle(math::angle(z.re, z.im))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ClosedSet {
    Ball(Ball),
    Sector(Sector),
}

impl ClosedSet {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            ClosedSet::Ball(b) => b.contains_closed(z),
            ClosedSet::Sector(s) => s.contains(z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Base {
    /// Closed ball.
    Ball(Ball),
    Domain(Domain),
}

/// `base ∩ closed sets \ open sets`, with removed sets open so that points
/// on their boundaries stay in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeSet {
    pub base: Base,
    pub minus: Vec<OpenSet>,
    pub intersect: Vec<ClosedSet>,
}

impl CompositeSet {
    pub fn domain(d: Domain) -> Self {
        Self { base: Base::Domain(d), minus: Vec::new(), intersect: Vec::new() }
    }

    pub fn minus(mut self, s: OpenSet) -> Self {
        self.minus.push(s);
        self
    }

    pub fn intersect(mut self, s: ClosedSet) -> Self {
        self.intersect.push(s);
        self
    }

    pub fn contains(&self, z: Complex64) -> bool {
        member(z, self)
    }
}

pub fn member(z: Complex64, s: &CompositeSet) -> bool {
    let in_base = match &s.base {
        Base::Ball(b) => b.contains_closed(z),
        Base::Domain(d) => d.contains(z),
    };
    in_base
        && s.intersect.iter().all(|c| c.contains(z))
        && !s.minus.iter().any(|o| o.contains(z))
}

/// Axis-aligned rectangle, used by grid certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    /// Range of `|z − c|` over the closed rectangle.
    pub fn distance_range(&self, c: Complex64) -> (f64, f64) {
        let dx = if c.re < self.x0 {
            self.x0 - c.re
        } else if c.re > self.x1 {
            c.re - self.x1
        } else {
            0.0
        };
        let dy = if c.im < self.y0 {
            self.y0 - c.im
        } else if c.im > self.y1 {
            c.im - self.y1
        } else {
            0.0
        };
        let fx = (c.re - self.x0).abs().max((c.re - self.x1).abs());
        let fy = (c.im - self.y0).abs().max((c.im - self.y1).abs());
        (math::sqrt(dx * dx + dy * dy), math::sqrt(fx * fx + fy * fy))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: f64, y: f64, r: f64) -> Ball {
        Ball::new(Complex64::new(x, y), r).unwrap()
    }

    #[test]
    fn lens_nested_and_disjoint() {
        assert!((lens_area(&b(0.0, 0.0, 1.0), &b(0.0, 0.0, 0.5)) - PI / 4.0).abs() < 1e-15);
        assert_eq!(lens_area(&b(0.0, 0.0, 1.0), &b(2.5, 0.0, 1.0)), 0.0);
    }

    #[test]
    fn lens_unit_overlap() {
        let want = 2.0 * PI / 3.0 - 3f64.sqrt() / 2.0;
        assert!((lens_area(&b(0.0, 0.0, 1.0), &b(1.0, 0.0, 1.0)) - want).abs() < 1e-13);
    }

    #[test]
    fn domain_areas() {
        let d = Domain::UnitDisc;
        assert!((ball_domain_area(&b(0.0, 0.0, 0.5), &d) - PI / 4.0).abs() < 1e-15);
        assert_eq!(ball_domain_area(&b(3.0, 0.0, 0.5), &d), 0.0);
        let a = ball_domain_area(&b(1.0, 0.0, 0.1), &d);
        assert!(a > 0.0 && a < PI * 0.01 / 2.0);
        let a = Domain::annulus(0.2).unwrap();
        assert!((ball_domain_area(&b(0.0, 0.0, 0.5), &a) - PI * (0.25 - 0.04)).abs() < 1e-14);
    }

    #[test]
    fn distances() {
        let d = Domain::UnitDisc;
        assert_eq!(dist_to_boundary(Complex64::new(0.0, 0.0), &d).unwrap(), 1.0);
        assert_eq!(dist_to_boundary(Complex64::new(0.75, 0.0), &d).unwrap(), 0.25);
        let a = Domain::annulus(0.2).unwrap();
        assert!((dist_to_boundary(Complex64::new(0.5, 0.0), &a).unwrap() - 0.3).abs() < 1e-15);
        assert!(dist_to_boundary(Complex64::new(0.1, 0.0), &a).is_err());
        assert!(dist_to_boundary(Complex64::new(1.0, 0.0), &d).is_err());
    }

    #[test]
    fn membership_conventions() {
        let s = CompositeSet::domain(Domain::UnitDisc);
        assert!(member(Complex64::new(0.0, 0.0), &s));
        let s = s.minus(OpenSet::Ball(b(0.5, 0.0, 0.1)));
        assert!(!member(Complex64::new(0.5, 0.0), &s));
        let s = CompositeSet::domain(Domain::UnitDisc).minus(OpenSet::Ball(b(0.5, 0.0, 0.25)));
        assert!(member(Complex64::new(0.75, 0.0), &s));
        assert!(member(Complex64::new(0.25, 0.0), &s));
    }

    #[test]
    fn wedge_gauge_arithmetic() {
        let w = Wedge { angle: 0.0, gauge: WedgeGauge::SQUARE };
        assert!((w.gauge.half_width(0.1) - 0.01).abs() < 1e-17);
        let z = |t: f64| Complex64::from_polar(0.9, t);
        assert!(w.contains(z(0.0099)));
        assert!(!w.contains(z(0.0101)));
        assert!(w.contains(z(-0.0099)));
    }

    #[test]
    fn sector_wraps() {
        let s = Sector { start: 1.5 * PI, width: PI };
        assert!(s.contains_angle(0.1));
        assert!(s.contains_angle(1.5 * PI));
        assert!(!s.contains_angle(PI));
    }

    #[test]
    fn rect_ranges() {
        let r = Rect { x0: 1.0, y0: 0.0, x1: 2.0, y1: 1.0 };
        let (lo, hi) = r.distance_range(Complex64::new(0.0, 0.0));
        assert_eq!(lo, 1.0);
        assert!((hi - 5f64.sqrt()).abs() < 1e-15);
    }
}

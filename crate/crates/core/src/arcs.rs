//! Finite unions of closed arcs on the unit circle.
//!
//! Arcs are stored as sorted, disjoint closed intervals of `[0, 2pi]`; an arc
//! that wraps through angle 0 is split in two.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::math::{self, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArcSet {
    intervals: Vec<Interval>,
}

impl ArcSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        Self { intervals: alloc::vec![Interval { lo: 0.0, hi: TAU }] }
    }

    /// A single closed arc running counter-clockwise from `start` to `end`.
    /// `end < start` wraps; `end − start ≥ 2pi` is the full circle.
    pub fn arc(start: f64, end: f64) -> Self {
        let mut width = end - start;
        if width < 0.0 {
            width += TAU;
        }
        if width >= TAU {
            return Self::full();
        }
        let a = math::wrap_angle(start);
        let b = a + width;
        if b <= TAU {
            Self { intervals: alloc::vec![Interval { lo: a, hi: b }] }
        } else {
            Self::from_intervals(alloc::vec![
                Interval { lo: 0.0, hi: b - TAU },
                Interval { lo: a, hi: TAU },
            ])
        }
    }

    pub fn point(theta: f64) -> Self {
        let t = math::wrap_angle(theta);
        Self { intervals: alloc::vec![Interval { lo: t, hi: t }] }
    }

    pub fn from_intervals(mut v: Vec<Interval>) -> Self {
        v.retain(|i| !i.is_empty());
        v.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for i in v {
            match out.last_mut() {
                Some(last) if i.lo <= last.hi => last.hi = last.hi.max(i.hi),
                _ => out.push(i),
            }
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        let t = math::wrap_angle(theta);
        self.intervals.iter().any(|i| i.lo <= t && t <= i.hi)
            || (t == 0.0 && self.intervals.iter().any(|i| i.hi >= TAU))
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut v = self.intervals.clone();
        v.extend_from_slice(&other.intervals);
        Self::from_intervals(v)
    }

    pub fn intersect(&self, other: &ArcSet) -> ArcSet {
        let mut v = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                let i = Interval { lo: a.lo.max(b.lo), hi: a.hi.min(b.hi) };
                if !i.is_empty() {
                    v.push(i);
                }
            }
        }
        Self::from_intervals(v)
    }

    /// Remove the open `eta`-neighbourhood of `other`; the result stays closed.
    pub fn minus_open_dilation(&self, other: &ArcSet, eta: f64) -> ArcSet {
        let mut holes: Vec<(f64, f64)> = Vec::new();
        for b in &other.intervals {
            for shift in [-TAU, 0.0, TAU] {
                holes.push((b.lo - eta + shift, b.hi + eta + shift));
            }
        }
        let mut cur = self.intervals.clone();
        for (c, d) in holes {
            let mut next = Vec::with_capacity(cur.len() + 1);
            for i in cur {
                if d <= i.lo || c >= i.hi {
                    next.push(i);
                    continue;
                }
                if c >= i.lo {
                    next.push(Interval { lo: i.lo, hi: c });
                }
                if d <= i.hi {
                    next.push(Interval { lo: d, hi: i.hi });
                }
            }
            cur = next;
        }
        Self::from_intervals(cur)
    }

    /// Shortest angular distance from `theta` to the set.
    pub fn angular_distance_to(&self, theta: f64) -> f64 {
        if self.contains(theta) {
            return 0.0;
        }
        self.intervals
            .iter()
            .flat_map(|i| [i.lo, i.hi])
            .map(|e| math::angular_distance(e, theta))
            .fold(f64::INFINITY, f64::min)
    }

    /// Shortest angular distance between two sets.
    pub fn angular_distance(&self, other: &ArcSet) -> f64 {
        if !self.intersect(other).is_empty() {
            return 0.0;
        }
        let a = self
            .intervals
            .iter()
            .flat_map(|i| [i.lo, i.hi])
            .map(|e| other.angular_distance_to(e));
        let b = other
            .intervals
            .iter()
            .flat_map(|i| [i.lo, i.hi])
            .map(|e| self.angular_distance_to(e));
        a.chain(b).fold(f64::INFINITY, f64::min)
    }

    /// Euclidean distance between the corresponding point sets of the circle.
    pub fn chord_distance(&self, other: &ArcSet) -> f64 {
        let t = self.angular_distance(other);
        2.0 * math::sin(0.5 * t.min(math::PI))
    }

    /// Evenly spaced samples, at least `per_unit` per radian and including
    /// every endpoint.
    pub fn samples(&self, per_unit: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in &self.intervals {
            let n = math::ceil(i.len() * per_unit).max(0.0) as usize;
            if n == 0 {
                out.push(i.lo);
                if i.hi > i.lo {
                    out.push(i.hi);
                }
                continue;
            }
            for k in 0..=n {
                out.push(i.lo + i.len() * k as f64 / n as f64);
            }
        }
        out
    }
}

//! Constructive boundary-value approximation in planar domains.
//!
//! Given boundary data `psi` on the unit circle, the pipeline builds a
//! continuous extension into the disc, a ball cover with thin budgeted
//! shells, the resulting chaplet of disjoint compacta, and a single global
//! polynomial (holomorphic or harmonic) that tracks the extension along a
//! set of relative density one at every certified boundary point.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the CLI and
//! parallel drivers live in the companion `carleman` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod arcs;
pub mod boundary;
pub mod carleman;
pub mod chaplet;
pub mod geometry;
pub mod math;
pub mod montecarlo;
pub mod oracle;
pub mod verifier;

pub use num_complex::Complex64;

pub use boundary::{
    BoundaryFunction, BoundaryMeasure, ContinuousExtension, LusinDecomposition, PieceValues,
};
pub use carleman::{RunCertificate, StageRecord, ToleranceSchedule};
pub use chaplet::{BallCover, ChapletSet, Exhaustion, Shell};
pub use geometry::{Ball, CompositeSet, Domain, OpenSet};
pub use oracle::{FitRequest, GlobalPolynomial, OperatorKind};
pub use verifier::{ApproachProfile, DensityProfile, GoodSet};

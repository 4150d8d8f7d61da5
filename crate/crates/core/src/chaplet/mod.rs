//! Ball cover, budgeted shells, chaplet components, connectivity and the
//! compatible exhaustion.

mod assemble;
pub use assemble::{assemble_chaplet, ChapletRecord, ChapletSet, CloudParams, Component, ComponentId, ComponentSummary};
mod connectivity;
pub use connectivity::ConnectivityCertificate;
mod cover;
mod index;
mod kq;
pub use kq::{check_kq, compatible_exhaustion, Exhaustion, KqWitness, Swallow};
mod shells;
pub use shells::{boundary_probes, build_shells, build_shells_with, Shell, ShellCertificate, ShellParams};



pub use cover::{cover_balls, cover_balls_with, BallCover, CoverParams};
pub use index::BallIndex;



use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChapletError {
    #[error("cover fraction must lie in (0, 1/2), got {0}")]
    BadFraction(f64),
    #[error("stage radius must lie in (0, 1), got {0}")]
    BadStageRadius(f64),
    #[error("oscillation target 1/{target} unreachable for the ball at ({re}, {im}) after {depth} subdivisions")]
    OscillationUnreachable { re: f64, im: f64, target: usize, depth: usize },
    #[error("cover leaves the point ({re}, {im}) of the truncated domain uncovered")]
    Uncovered { re: f64, im: f64 },
    #[error("shell {index} would be thinner than machine epsilon")]
    ShellTooThin { index: usize },
    #[error("no boundary probes supplied")]
    NoProbes,
    #[error("component of ball {ball} in sector {sector} has no sample points")]
    EmptyComponent { ball: usize, sector: usize },
    #[error("grid step must be positive, got {0}")]
    BadStep(f64),
    #[error("compact set reaches the boundary; components accumulate on it")]
    Accumulation,
    #[error("stage radii must increase strictly inside (0, 1)")]
    BadExhaustion,
    #[error("exhaustion stage {stage} leaves the disc")]
    ExhaustionEscapes { stage: usize },
}

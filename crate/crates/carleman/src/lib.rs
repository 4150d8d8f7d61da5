//! Configuration, artifact formats and orchestration for `carleman-core` runs.

pub mod artifacts;
pub mod config;
pub mod pipeline;

pub use config::RunConfig;
pub use pipeline::{build, report, verify};

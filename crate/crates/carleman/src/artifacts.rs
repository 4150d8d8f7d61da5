//! On-disk artifacts of a run directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use carleman_core::carleman::{AnchorValue, StageRecord, ToleranceSchedule};
use carleman_core::chaplet::{ChapletRecord, ConnectivityCertificate, Exhaustion, ShellCertificate};
use carleman_core::verifier::{ApproachProfile, DensityProfile, VacuityReport};
use carleman_core::OperatorKind;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const CONFIG: &str = "config.json";
pub const CHAPLET: &str = "chaplet.json";
pub const POLYNOMIAL: &str = "polynomial.json";
pub const RUN: &str = "run.json";
pub const DENSITY: &str = "density.csv";
pub const APPROACH: &str = "approach.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChapletArtifact {
    pub chaplet: ChapletRecord,
    pub shell_certificate: ShellCertificate,
    pub connectivity: ConnectivityCertificate,
    pub exhaustion: Exhaustion,
    pub anchors: Vec<AnchorValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeResult {
    pub theta: f64,
    pub certified: bool,
    pub density: DensityProfile,
    pub approach: ApproachProfile,
    /// Good ratio at the smallest radius reaches `1 − epsDensity`.
    pub density_floor: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Verification {
    pub pass: bool,
    pub probes: Vec<ProbeResult>,
    pub vacuity: VacuityReport,
    /// Largest `sup |u_N − g_j| − bound_j` over the components.
    pub direct_scan_excess: f64,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunArtifact {
    pub operator: OperatorKind,
    pub components: usize,
    pub balls: usize,
    pub shells: usize,
    pub stages: Vec<StageRecord>,
    pub schedule: ToleranceSchedule,
    pub outer_radii: Vec<f64>,
    pub engulf: Vec<usize>,
    pub bounds: Vec<f64>,
    pub gauge_at_anchor: Vec<f64>,
    pub all_pass: bool,
    pub within_gauge: bool,
    pub infeasible_stages: Vec<usize>,
    pub connectivity_pass: bool,
    pub verification: Option<Verification>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCsvRow {
    pub point_theta: f64,
    pub radius: f64,
    pub good_ratio: f64,
    pub bad_ratio: f64,
    pub stderr: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachCsvRow {
    pub point_theta: f64,
    pub band_index: usize,
    pub band_inner_r: f64,
    pub sup_error: f64,
    pub budget: f64,
}

pub struct RunDir {
    root: PathBuf,
}

impl RunDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root).with_context(|| format!("creating run directory {}", root.display()))?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text).with_context(|| format!("writing {name}"))
    }

    pub fn read_json<T: DeserializeOwned>(&self, name: &str) -> Result<T> {
        let p = self.path(name);
        let text = fs::read_to_string(&p).with_context(|| format!("missing artifact {}", p.display()))?;
        serde_json::from_str(&text).with_context(|| format!("malformed artifact {}", p.display()))
    }

    pub fn write_csv<T: Serialize>(&self, name: &str, rows: &[T], header: &[&str]) -> Result<()> {
        let p = self.path(name);
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&p).with_context(|| format!("writing {name}"))?;
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub const DENSITY_HEADER: [&str; 6] = ["point_theta", "radius", "good_ratio", "bad_ratio", "stderr", "bound"];
pub const APPROACH_HEADER: [&str; 5] = ["point_theta", "band_index", "band_inner_r", "sup_error", "budget"];

//! Run configuration: JSON with full defaulting and field-named validation.

use std::path::Path;

use carleman_core::arcs::ArcSet;
use carleman_core::boundary::{BoundaryFunction, BoundaryMeasure, ExtensionParams, Piece, PieceValues};
use carleman_core::math::{PI, TAU};
use carleman_core::{Domain, OperatorKind};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field, reason: reason.into() }
}

/// One boundary piece `{arcStartRad, arcEndRad, type, payload}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PieceSpec {
    pub arc_start_rad: f64,
    pub arc_end_rad: f64,
    #[serde(flatten)]
    pub values: PieceValues,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct BoundarySpec {
    pub pieces: Vec<PieceSpec>,
    pub jumps: Vec<f64>,
    /// Closed arcs `[start, end]` of the declared continuity set `S`.
    pub continuity_set: Vec<[f64; 2]>,
    pub measure: BoundaryMeasure,
    pub lusin_sets: usize,
}

impl Default for BoundarySpec {
    fn default() -> Self {
        Self {
            pieces: vec![
                PieceSpec { arc_start_rad: 0.0, arc_end_rad: PI, values: PieceValues::Const(0.0) },
                PieceSpec { arc_start_rad: PI, arc_end_rad: TAU, values: PieceValues::Const(1.0) },
            ],
            jumps: vec![0.0, PI],
            continuity_set: vec![[PI / 2.0 - 0.5, PI / 2.0 + 0.5], [1.5 * PI - 0.5, 1.5 * PI + 0.5]],
            measure: BoundaryMeasure::ArcLength,
            lusin_sets: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct ExtensionSpec {
    pub kappa: f64,
    pub cap: f64,
    pub core_radius: f64,
}

impl Default for ExtensionSpec {
    fn default() -> Self {
        Self { kappa: 100.0, cap: 1.0, core_radius: 0.25 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct GaugeSpec {
    pub eps0: f64,
    pub alpha: f64,
    /// Only base 2 is supported.
    pub budget_base: f64,
}

impl Default for GaugeSpec {
    fn default() -> Self {
        Self { eps0: 0.5, alpha: 0.5, budget_base: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct GridSpec {
    pub cover_check: f64,
    pub fit_step: f64,
    pub verify_step: f64,
    pub flood_step: f64,
    pub shell_probes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { cover_check: 1.0 / 200.0, fit_step: 0.005, verify_step: 0.0025, flood_step: 1.0 / 512.0, shell_probes: 256 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct FitSpec {
    pub max_degree: usize,
    pub aim: f64,
    pub lookahead: bool,
}

impl Default for FitSpec {
    fn default() -> Self {
        Self { max_degree: 256, aim: 0.35, lookahead: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct VerifySpec {
    /// Probe angles; empty means eight angles spread over the continuity set.
    pub probes: Vec<f64>,
    pub density_radii: Vec<f64>,
    pub density_samples: u64,
    pub bands: Vec<usize>,
    pub vacuity_samples: u64,
    pub eps_density: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            probes: Vec::new(),
            density_radii: (2..=7).map(|k| 2f64.powi(-k)).collect(),
            density_samples: 100_000,
            bands: vec![1, 2, 3],
            vacuity_samples: 1_000_000,
            eps_density: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct RunConfig {
    pub domain: Domain,
    pub boundary: BoundarySpec,
    pub extension: ExtensionSpec,
    pub operator: OperatorKind,
    pub stages: usize,
    pub stage_radii: Vec<f64>,
    pub cover_fraction: f64,
    pub cover_radius: f64,
    pub gauge: GaugeSpec,
    pub grids: GridSpec,
    pub fit: FitSpec,
    pub verify: VerifySpec,
    pub seed: u64,
    pub out_dir: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            domain: Domain::UnitDisc,
            boundary: BoundarySpec::default(),
            extension: ExtensionSpec::default(),
            operator: OperatorKind::CauchyRiemann,
            stages: 3,
            stage_radii: vec![0.45, 0.8, 0.87],
            cover_fraction: 0.3,
            cover_radius: 0.85,
            gauge: GaugeSpec::default(),
            grids: GridSpec::default(),
            fit: FitSpec::default(),
            verify: VerifySpec::default(),
            seed: 1,
            out_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| ConfigError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |field: &'static str, v: f64| if v > 0.0 && v.is_finite() { Ok(()) } else { Err(invalid(field, format!("must be positive, got {v}"))) };
        if self.stages == 0 {
            return Err(invalid("stages", "need at least one stage"));
        }
        if self.stage_radii.len() != self.stages {
            return Err(invalid("stageRadii", format!("expected {} radii, got {}", self.stages, self.stage_radii.len())));
        }
        if self.stage_radii.iter().any(|r| !(*r > 0.0 && *r < 1.0)) || self.stage_radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("stageRadii", "radii must increase strictly inside (0, 1)"));
        }
        if !(self.cover_fraction > 0.0 && self.cover_fraction < 0.5) {
            return Err(invalid("coverFraction", "must lie in (0, 1/2)"));
        }
        if !(self.cover_radius > self.domain.inner_radius() && self.cover_radius < 1.0) {
            return Err(invalid("coverRadius", "must lie inside the domain"));
        }
        if let Domain::Annulus { inner_radius } = self.domain {
            if !(inner_radius > 0.0 && inner_radius < 1.0) {
                return Err(invalid("domain.innerRadius", "must lie in (0, 1)"));
            }
        }
        positive("gauge.eps0", self.gauge.eps0)?;
        if !(self.gauge.alpha >= 0.0) {
            return Err(invalid("gauge.alpha", "must be non-negative"));
        }
        if self.gauge.budget_base != 2.0 {
            return Err(invalid("gauge.budgetBase", "only base 2 is supported"));
        }
        positive("grids.coverCheck", self.grids.cover_check)?;
        positive("grids.fitStep", self.grids.fit_step)?;
        positive("grids.verifyStep", self.grids.verify_step)?;
        positive("grids.floodStep", self.grids.flood_step)?;
        if self.grids.shell_probes == 0 {
            return Err(invalid("grids.shellProbes", "need at least one probe"));
        }
        if self.fit.max_degree == 0 {
            return Err(invalid("fit.maxDegree", "must be positive"));
        }
        if !(self.fit.aim > 0.0 && self.fit.aim <= 1.0) {
            return Err(invalid("fit.aim", "must lie in (0, 1]"));
        }
        positive("extension.kappa", self.extension.kappa)?;
        positive("extension.cap", self.extension.cap)?;
        if !(self.extension.core_radius > 0.0 && self.extension.core_radius < 1.0) {
            return Err(invalid("extension.coreRadius", "must lie in (0, 1)"));
        }
        if self.verify.probes.iter().any(|t| !(0.0..TAU).contains(t)) {
            return Err(invalid("verify.probes", "angles must lie in [0, 2pi)"));
        }
        if self.verify.density_radii.iter().any(|r| !(*r > 0.0)) || self.verify.density_radii.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid("verify.densityRadii", "radii must be positive and decreasing"));
        }
        if self.verify.density_samples == 0 {
            return Err(invalid("verify.densitySamples", "must be positive"));
        }
        if self.verify.bands.is_empty() {
            return Err(invalid("verify.bands", "need at least one band"));
        }
        if !(self.verify.eps_density > 0.0 && self.verify.eps_density < 1.0) {
            return Err(invalid("verify.epsDensity", "must lie in (0, 1)"));
        }
        self.boundary_function()?;
        self.boundary.measure.validate().map_err(|e| invalid("boundary.measure", e.to_string()))?;
        Ok(())
    }

    pub fn boundary_function(&self) -> Result<BoundaryFunction, ConfigError> {
        let pieces = self
            .boundary
            .pieces
            .iter()
            .map(|p| Piece { start: p.arc_start_rad, end: p.arc_end_rad, values: p.values.clone() })
            .collect();
        let s = self.continuity_set()?;
        BoundaryFunction::new(pieces, self.boundary.jumps.clone(), s).map_err(|e| invalid("boundary", e.to_string()))
    }

    pub fn continuity_set(&self) -> Result<ArcSet, ConfigError> {
        let mut s = ArcSet::empty();
        for a in &self.boundary.continuity_set {
            if !a.iter().all(|t| t.is_finite()) {
                return Err(invalid("boundary.continuitySet", "arc ends must be finite"));
            }
            s = s.union(&ArcSet::arc(a[0], a[1]));
        }
        Ok(s)
    }

    pub fn extension_params(&self) -> ExtensionParams {
        ExtensionParams { kappa: self.extension.kappa, cap: self.extension.cap, core_radius: self.extension.core_radius }
    }

    /// Configured probes, or eight angles spread over the continuity set.
    pub fn probes(&self) -> Vec<f64> {
        if !self.verify.probes.is_empty() {
            return self.verify.probes.clone();
        }
        let s = self.continuity_set().unwrap_or_else(|_| ArcSet::empty());
        let arcs = s.intervals();
        if arcs.is_empty() {
            return (0..8).map(|k| k as f64 * TAU / 8.0 + 0.3).collect();
        }
        let per = 8usize.div_ceil(arcs.len());
        let mut out = Vec::new();
        for a in arcs {
            for i in 0..per {
                out.push(a.lo + (a.hi - a.lo) * (i as f64 + 0.5) / per as f64);
            }
        }
        out.truncate(8);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_takes_defaults() {
        let c = RunConfig::from_json("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.probes().len(), 8);
        assert!(c.probes().iter().all(|&t| c.continuity_set().unwrap().contains(t)));
    }

    #[test]
    fn errors_name_the_field() {
        let e = RunConfig::from_json(r#"{"coverFraction": 0.7}"#).unwrap_err().to_string();
        assert!(e.contains("coverFraction"), "{e}");
        let e = RunConfig::from_json(r#"{"stages": 2}"#).unwrap_err().to_string();
        assert!(e.contains("stageRadii"), "{e}");
        let e = RunConfig::from_json(r#"{"grids": {"fitStep": -1}}"#).unwrap_err().to_string();
        assert!(e.contains("grids.fitStep"), "{e}");
        let e = RunConfig::from_json(r#"{"bogus": 1}"#).unwrap_err().to_string();
        assert!(e.contains("bogus"), "{e}");
    }

    #[test]
    fn parse_errors_carry_location() {
        let e = RunConfig::from_json("{\n  \"stages\": ,\n}").unwrap_err();
        assert!(matches!(e, ConfigError::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn piece_schema() {
        let c = RunConfig::from_json(
            r#"{"boundary": {"pieces": [{"arcStartRad": 0, "arcEndRad": 6.283185307179586, "type": "const", "payload": 2.5}],
                "jumps": [], "continuitySet": [[0, 6.283185307179586]]}}"#,
        )
        .unwrap();
        assert_eq!(c.boundary_function().unwrap().eval(1.0), 2.5);
    }
}

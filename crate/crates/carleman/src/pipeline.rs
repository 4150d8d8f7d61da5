//! `build`, `verify` and `report` over a run directory.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{bail, Context, Result};
use carleman_core::boundary::{extend_continuous, lusin_decompose, ContinuousExtension};
use carleman_core::carleman::{anchor_step_function, measured_error, run, RunCertificate, RunOptions, ToleranceSchedule};
use carleman_core::chaplet::{
    assemble_chaplet, boundary_probes, build_shells, compatible_exhaustion, cover_balls_with, ChapletSet, CloudParams, CoverParams,
};
use carleman_core::verifier::{approach_profile, density_profile, shell_vacuity, DensityMethod, GoodSet};
use carleman_core::GlobalPolynomial;
use rayon::prelude::*;

use crate::artifacts::*;
use crate::config::RunConfig;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const HARD: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const VIOLATED: i32 = 3;
}

fn extension(cfg: &RunConfig) -> Result<ContinuousExtension> {
    let psi = cfg.boundary_function()?;
    let dec = lusin_decompose(&psi, &cfg.boundary.measure, cfg.boundary.lusin_sets).context("Lusin decomposition")?;
    extend_continuous(&psi, &dec, cfg.extension_params()).context("continuous extension")
}

fn clouds(cfg: &RunConfig) -> CloudParams {
    CloudParams { fit_step: cfg.grids.fit_step, verify_step: cfg.grids.verify_step, ..CloudParams::default() }
}

pub struct BuildOutcome {
    pub code: i32,
    pub infeasible: Vec<usize>,
}

pub fn build(cfg: &RunConfig, out: &Path) -> Result<BuildOutcome> {
    let dir = RunDir::create(out)?;
    dir.write_json(CONFIG, cfg)?;
    let u = extension(cfg)?;
    let d = cfg.domain;
    let cp = CoverParams { check_step: cfg.grids.cover_check, ..CoverParams::new(cfg.cover_radius, cfg.cover_fraction) };
    let cover = cover_balls_with(&d, &u, &cp).context("ball cover")?;
    let (shells, shell_certificate) = build_shells(&cover, &d, &boundary_probes(&d, cfg.grids.shell_probes)).context("shells")?;
    let ch = assemble_chaplet(&cover, &shells, &u.exceptional_sets(), u.psi().jumps(), clouds(cfg)).context("chaplet")?;
    let connectivity = ch.connectivity(cfg.grids.flood_step);
    let ex = compatible_exhaustion(&ch, &cfg.stage_radii).context("exhaustion")?;
    if !ex.audit(&ch) {
        bail!("exhaustion is not open compatible with the chaplet");
    }
    let sched = ToleranceSchedule::new(cfg.gauge.eps0, cfg.gauge.alpha, &ex)?;
    let anchors = anchor_step_function(&ch, &u);
    let g: Vec<f64> = anchors.iter().map(|a| a.value).collect();
    let opts = RunOptions { max_degree: cfg.fit.max_degree, lookahead: cfg.fit.lookahead, aim: cfg.fit.aim };
    let cert = run(&ch, &ex, &g, &sched, cfg.operator, opts)?;

    dir.write_json(
        CHAPLET,
        &ChapletArtifact { chaplet: ch.record(), shell_certificate, connectivity: connectivity.clone(), exhaustion: ex.clone(), anchors },
    )?;
    dir.write_json(POLYNOMIAL, &cert.polynomial)?;
    let artifact = RunArtifact {
        operator: cert.operator,
        components: ch.component_count(),
        balls: ch.cover.len(),
        shells: ch.shells.len(),
        stages: cert.stages.clone(),
        schedule: cert.schedule.clone(),
        outer_radii: ex.outer_radii(),
        engulf: cert.engulf.clone(),
        bounds: cert.bounds.clone(),
        gauge_at_anchor: cert.gauge_at_anchor.clone(),
        all_pass: cert.all_pass(),
        within_gauge: cert.within_gauge(),
        infeasible_stages: cert.infeasible(),
        connectivity_pass: connectivity.pass,
        verification: None,
    };
    dir.write_json(RUN, &artifact)?;
    let code = if !connectivity.pass {
        exit::VIOLATED
    } else if !artifact.all_pass {
        exit::INFEASIBLE
    } else {
        exit::OK
    };
    Ok(BuildOutcome { code, infeasible: artifact.infeasible_stages })
}

pub struct Loaded {
    pub cfg: RunConfig,
    pub u: ContinuousExtension,
    pub ch: ChapletSet,
    pub chaplet: ChapletArtifact,
    pub run: RunArtifact,
    pub cert: RunCertificate,
}

pub fn load(dir: &RunDir) -> Result<Loaded> {
    let cfg: RunConfig = dir.read_json(CONFIG)?;
    cfg.validate()?;
    let chaplet: ChapletArtifact = dir.read_json(CHAPLET)?;
    let polynomial: GlobalPolynomial = dir.read_json(POLYNOMIAL)?;
    let run: RunArtifact = dir.read_json(RUN)?;
    let u = extension(&cfg)?;
    let ch = ChapletSet::from_record(&chaplet.chaplet);
    if ch.component_count() != run.bounds.len() || chaplet.anchors.len() != run.bounds.len() {
        bail!("artifacts disagree on the number of components");
    }
    let cert = RunCertificate {
        operator: run.operator,
        stages: run.stages.clone(),
        polynomial,
        schedule: run.schedule.clone(),
        engulf: run.engulf.clone(),
        anchors: chaplet.anchors.iter().map(|a| a.value).collect(),
        bounds: run.bounds.clone(),
        gauge_at_anchor: run.gauge_at_anchor.clone(),
    };
    Ok(Loaded { cfg, u, ch, chaplet, run, cert })
}

/// Dyadic radii `2^0 … 2^-12` of the shell certificate grid.
fn certificate_radii() -> Vec<f64> {
    (0..=12).map(|k| 2f64.powi(-k)).collect()
}

pub fn verify(run_dir: &Path, probes: Option<Vec<f64>>) -> Result<i32> {
    let dir = RunDir::new(run_dir);
    let mut l = load(&dir)?;
    let thetas = probes.unwrap_or_else(|| l.cfg.probes());
    let good = GoodSet::from_chaplet(&l.ch);
    let method = DensityMethod::MonteCarlo { seed: l.cfg.seed, samples: l.cfg.verify.density_samples };
    let results: Vec<ProbeResult> = thetas
        .par_iter()
        .map(|&theta| {
            let density = density_profile(&good, theta, &l.cfg.verify.density_radii, method);
            let approach = approach_profile(&l.ch, &l.cert, &l.chaplet.anchors, &l.u, theta, &l.cfg.verify.bands);
            let density_floor = density.rows.last().is_some_and(|r| r.good_ratio >= 1.0 - l.cfg.verify.eps_density);
            ProbeResult { theta, certified: approach.certified, density, approach, density_floor }
        })
        .collect();
    let radii = certificate_radii();
    let per = (l.cfg.verify.vacuity_samples / (thetas.len().max(1) * radii.len()) as u64).max(1);
    let vacuity = shell_vacuity(&good, &thetas, &radii, per, l.cfg.seed);
    let excess = (0..l.ch.component_count())
        .into_par_iter()
        .map(|j| measured_error(&l.ch, &l.cert, j) - l.cert.bounds[j] * (1.0 + 1e-9))
        .reduce(|| f64::NEG_INFINITY, f64::max);

    let mut failures = Vec::new();
    for r in results.iter().filter(|r| r.certified) {
        if !r.density.pass() {
            failures.push(format!("density bound at theta {}", r.theta));
        }
        if !r.density_floor {
            failures.push(format!("good ratio floor at theta {}", r.theta));
        }
        if !r.approach.pass() {
            failures.push(format!("approach budget at theta {}", r.theta));
        }
    }
    if vacuity.violations > 0 {
        failures.push(format!("{} Monte Carlo hits inside vacuous shells", vacuity.violations));
    }
    if excess > 1e-12 {
        failures.push(format!("component error exceeds its telescoped bound by {excess:e}"));
    }

    let density_rows: Vec<DensityCsvRow> = results
        .iter()
        .flat_map(|p| {
            p.density.rows.iter().map(move |r| DensityCsvRow {
                point_theta: p.theta,
                radius: r.radius,
                good_ratio: r.good_ratio,
                bad_ratio: r.bad_ratio,
                stderr: r.stderr,
                bound: r.bound,
            })
        })
        .collect();
    let approach_rows: Vec<ApproachCsvRow> = results
        .iter()
        .flat_map(|p| {
            p.approach.bands.iter().map(move |b| ApproachCsvRow {
                point_theta: p.theta,
                band_index: b.index,
                band_inner_r: b.inner_r,
                sup_error: b.sup_error,
                budget: b.budget,
            })
        })
        .collect();
    dir.write_csv(DENSITY, &density_rows, &DENSITY_HEADER)?;
    dir.write_csv(APPROACH, &approach_rows, &APPROACH_HEADER)?;
    let pass = failures.is_empty();
    l.run.verification = Some(Verification { pass, probes: results, vacuity, direct_scan_excess: excess, failures });
    dir.write_json(RUN, &l.run)?;
    Ok(if pass { exit::OK } else { exit::VIOLATED })
}

pub fn report(run_dir: &Path) -> Result<String> {
    let dir = RunDir::new(run_dir);
    let run: RunArtifact = dir.read_json(RUN)?;
    let mut s = String::new();
    writeln!(s, "operator {:?}, {} components, {} balls, {} shells", run.operator, run.components, run.balls, run.shells)?;
    writeln!(s, "{:>5} {:>6} {:>12} {:>12} {:>12} {:>5}", "stage", "degree", "prev_error", "new_error", "budget", "pass")?;
    for st in &run.stages {
        writeln!(s, "{:>5} {:>6} {:>12e} {:>12e} {:>12e} {:>5}", st.stage, st.degree, st.prev_error, st.new_error, st.budget, st.pass)?;
    }
    writeln!(s, "connectivity {}", if run.connectivity_pass { "connected" } else { "NOT connected" })?;
    match &run.verification {
        None => writeln!(s, "verification: not run")?,
        Some(v) => {
            writeln!(s, "{:>10} {:>9} {:>12} {:>12} {:>12}", "theta", "certified", "radius", "good_ratio", "band_error")?;
            for p in &v.probes {
                let last = p.density.rows.last();
                let band = p.approach.bands.iter().rev().find(|b| !b.is_empty());
                writeln!(
                    s,
                    "{:>10} {:>9} {:>12} {:>12} {:>12}",
                    p.theta,
                    p.certified,
                    last.map_or("-".into(), |r| format!("{:e}", r.radius)),
                    last.map_or("-".into(), |r| r.good_ratio.to_string()),
                    band.map_or("-".into(), |b| format!("{:e}", b.sup_error)),
                )?;
            }
            writeln!(s, "vacuity: {} samples, {} violations", v.vacuity.samples, v.vacuity.violations)?;
            for f in &v.failures {
                writeln!(s, "FAILED: {f}")?;
            }
        }
    }
    if !run.infeasible_stages.is_empty() {
        let list: Vec<String> = run.infeasible_stages.iter().map(|n| n.to_string()).collect();
        writeln!(s, "INFEASIBLE stages: {}", list.join(", "))?;
    }
    let certified = run.all_pass && run.connectivity_pass && run.verification.as_ref().is_some_and(|v| v.pass);
    writeln!(s, "{}", if certified { "CERTIFIED (finite-stage)" } else { "NOT CERTIFIED" })?;
    Ok(s)
}

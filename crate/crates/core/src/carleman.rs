//! The recursive approximation loop: weld the running polynomial with the
//! anchor step function on newly engulfed components, fit, and telescope.

use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::boundary::ContinuousExtension;
use crate::chaplet::{ChapletSet, Exhaustion, Swallow};
use crate::geometry::{dist_to_boundary, Domain};
use crate::math;
use crate::oracle::{fit, FitPoint, FitRequest, FitStatus, GlobalPolynomial, LadderStep, OperatorKind, OracleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CarlemanError {
    #[error("exhaustion does not match the chaplet: {0}")]
    Incompatible(&'static str),
    #[error("tolerance schedule is invalid: {0}")]
    BadSchedule(&'static str),
    #[error("{0} anchor values supplied for {1} components")]
    AnchorCount(usize, usize),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// `ε(z) = ε_0 · dist(z, ∂U)^α` with stage minima `ε_n` and budgets `ε_n / 2^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToleranceSchedule {
    pub eps0: f64,
    pub alpha: f64,
    /// `ε_n` for stages `1..=N`.
    pub eps: Vec<f64>,
}

impl ToleranceSchedule {
    pub fn new(eps0: f64, alpha: f64, ex: &Exhaustion) -> Result<Self, CarlemanError> {
        if !(eps0 > 0.0) || !(alpha >= 0.0) {
            return Err(CarlemanError::BadSchedule("gauge needs eps0 > 0 and alpha >= 0"));
        }
        let mut eps: Vec<f64> = ex.stages.iter().map(|s: &Swallow| eps0 * math::pow(s.depth, alpha)).collect();
        for i in 1..eps.len() {
            eps[i] = eps[i].min(eps[i - 1]);
        }
        Self::from_values(eps0, alpha, eps)
    }

    pub fn from_values(eps0: f64, alpha: f64, eps: Vec<f64>) -> Result<Self, CarlemanError> {
        if eps.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
            return Err(CarlemanError::BadSchedule("stage tolerances must be positive"));
        }
        if eps.windows(2).any(|w| w[1] > w[0]) {
            return Err(CarlemanError::BadSchedule("stage tolerances must not increase"));
        }
        Ok(Self { eps0, alpha, eps })
    }

    pub fn gauge(&self, z: Complex64, d: &Domain) -> f64 {
        self.eps0 * math::pow(dist_to_boundary(z, d).unwrap_or(0.0), self.alpha)
    }

    pub fn stages(&self) -> usize {
        self.eps.len()
    }

    /// `ε_n / 2^n` for the 1-based stage `n`.
    pub fn budget(&self, n: usize) -> f64 {
        self.eps[n - 1] / math::pow(2.0, n as f64)
    }

    /// `Σ_{k≥n} ε_k 2^-k`, continuing the schedule with `ε_N` past the last stage.
    pub fn tail(&self, n: usize) -> f64 {
        let last = *self.eps.last().unwrap_or(&0.0);
        let head: f64 = (n..=self.stages()).map(|k| self.budget(k)).sum();
        head + last / math::pow(2.0, self.stages().max(n - 1) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorValue {
    pub value: f64,
    /// Oscillation bound `ω_l` recorded for the owning ball.
    pub ball_oscillation: f64,
    /// Target `1 / l` for the owning ball.
    pub target: f64,
    /// Sampled `sup |u(x) − g_j|` over the component clouds.
    pub audit: f64,
}

/// `g_j = u(x_{A_j})` on every component.
pub fn anchor_step_function(ch: &ChapletSet, u: &ContinuousExtension) -> Vec<AnchorValue> {
    ch.components
        .iter()
        .map(|c| {
            let value = u.eval(c.anchor);
            let audit = c.fit_cloud.iter().chain(&c.verify_cloud).map(|&z| (u.eval(z) - value).abs()).fold(0.0, f64::max);
            let (osc, target) = if ch.is_generic() {
                (audit, 1.0)
            } else {
                (ch.cover.oscillations[c.id.ball], 1.0 / ch.cover.osc_index(c.id.ball) as f64)
            };
            AnchorValue { value, ball_oscillation: osc, target, audit }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub max_degree: usize,
    /// Also fit (without verifying) the targets of components engulfed later.
    pub lookahead: bool,
    /// Fits aim at this fraction of the stage budget.
    pub aim: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { max_degree: 256, lookahead: true, aim: 0.35 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub new_components: usize,
    pub fit_points: usize,
    pub prev_verify_points: usize,
    pub new_verify_points: usize,
    pub degree: usize,
    pub status: FitStatus,
    /// `sup |c_n|` on the verify samples of `L_{n−1}`.
    pub prev_error: f64,
    /// `sup |u_n − g|` on the verify samples of the new components.
    pub new_error: f64,
    pub budget: f64,
    pub pass: bool,
    pub ladder: Vec<LadderStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunCertificate {
    pub operator: OperatorKind,
    pub stages: Vec<StageRecord>,
    pub polynomial: GlobalPolynomial,
    pub schedule: ToleranceSchedule,
    pub engulf: Vec<usize>,
    pub anchors: Vec<f64>,
    /// Telescoped bound per component.
    pub bounds: Vec<f64>,
    /// `ε(x_{A_j})` per component.
    pub gauge_at_anchor: Vec<f64>,
}

impl RunCertificate {
    pub fn all_pass(&self) -> bool {
        self.stages.iter().all(|s| s.pass)
    }

    pub fn infeasible(&self) -> Vec<usize> {
        self.stages.iter().filter(|s| !s.pass).map(|s| s.stage).collect()
    }

    pub fn within_gauge(&self) -> bool {
        self.bounds.iter().zip(&self.gauge_at_anchor).all(|(b, g)| b <= g)
    }
}

/// Bound on `|u_N − g_j|` over component `j`: the welding error at its stage
/// plus the later corrections on `L_{k−1}`.
pub fn telescope_bound(stages: &[StageRecord], engulf_stage: usize) -> f64 {
    stages
        .iter()
        .filter(|s| s.stage >= engulf_stage)
        .map(|s| if s.stage == engulf_stage { s.new_error } else { s.prev_error })
        .sum()
}

fn core_grid(d: &Domain, s: &Swallow, step: f64) -> Vec<Complex64> {
    let n = math::ceil(s.radius / step) as i64;
    let mut out = Vec::new();
    for j in -n..n {
        for i in -n..n {
            let z = Complex64::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step);
            if d.contains(z) && dist_to_boundary(z, d).is_ok_and(|t| t >= 1.0 - s.radius) {
                out.push(z);
            }
        }
    }
    out
}

fn deviation(op: OperatorKind, v: Complex64, t: Complex64) -> f64 {
    match op {
        OperatorKind::CauchyRiemann => (v - t).norm(),
        OperatorKind::Laplace => (v.re - t.re).abs(),
    }
}

/// Run all stages; infeasible budgets are flagged and the loop continues.
pub fn run(
    ch: &ChapletSet,
    ex: &Exhaustion,
    g: &[f64],
    sched: &ToleranceSchedule,
    op: OperatorKind,
    opts: RunOptions,
) -> Result<RunCertificate, CarlemanError> {
    let m = ch.component_count();
    if g.len() != m {
        return Err(CarlemanError::AnchorCount(g.len(), m));
    }
    if ex.engulf.len() != m {
        return Err(CarlemanError::Incompatible("engulf table length differs from the component count"));
    }
    let n_stages = ex.len();
    if ex.engulf.iter().any(|&n| n == 0 || n > n_stages) {
        return Err(CarlemanError::Incompatible("component never engulfed"));
    }
    if sched.stages() != n_stages {
        return Err(CarlemanError::BadSchedule("schedule length differs from the stage count"));
    }
    let zero = Complex64::new(0.0, 0.0);
    // running values of u_{n-1} on every component cloud
    let mut u_fit: Vec<Vec<Complex64>> = ch.components.iter().map(|c| alloc::vec![zero; c.fit_cloud.len()]).collect();
    let mut u_ver: Vec<Vec<Complex64>> = ch.components.iter().map(|c| alloc::vec![zero; c.verify_cloud.len()]).collect();
    let mut poly = GlobalPolynomial::zero(op);
    let mut stages = Vec::with_capacity(n_stages);
    for n in 1..=n_stages {
        let budget = sched.budget(n);
        let gj = |j: usize| Complex64::new(g[j], 0.0);
        let mut fit_pts = Vec::new();
        let mut prev_v = Vec::new();
        let mut new_v: Vec<(Complex64, Complex64)> = Vec::new();
        if n > 1 {
            let prev = &ex.stages[n - 2];
            fit_pts.extend(core_grid(&ch.domain, prev, ch.clouds.fit_step).into_iter().map(|z| FitPoint::new(z, 0.0)));
            prev_v.extend(core_grid(&ch.domain, prev, ch.clouds.verify_step));
        }
        for j in 0..m {
            let c = &ch.components[j];
            let e = ex.engulf[j];
            if e < n {
                fit_pts.extend(c.fit_cloud.iter().map(|&z| FitPoint::new(z, 0.0)));
                prev_v.extend_from_slice(&c.verify_cloud);
            } else if e == n || opts.lookahead {
                fit_pts.extend(c.fit_cloud.iter().zip(&u_fit[j]).map(|(&z, &u)| FitPoint { z, target: gj(j) - u, weight: 1.0 }));
                if e == n {
                    new_v.extend(c.verify_cloud.iter().zip(&u_ver[j]).map(|(&z, &u)| (z, gj(j) - u)));
                }
            }
        }
        let mut verify: Vec<(Complex64, Complex64)> = prev_v.iter().map(|&z| (z, zero)).collect();
        verify.extend_from_slice(&new_v);
        let req = FitRequest { fit: fit_pts, verify, tolerance: budget * opts.aim.clamp(1e-6, 1.0 - 1e-9), max_degree: opts.max_degree };
        let out = fit(&req, op)?;
        let c_n = out.polynomial;
        let prev_error = prev_v.iter().map(|&z| deviation(op, c_n.eval(z), zero)).fold(0.0, f64::max);
        let new_error = new_v.iter().map(|&(z, t)| deviation(op, c_n.eval(z), t)).fold(0.0, f64::max);
        for j in 0..m {
            let c = &ch.components[j];
            for (u, &z) in u_fit[j].iter_mut().zip(&c.fit_cloud) {
                *u += c_n.eval(z);
            }
            for (u, &z) in u_ver[j].iter_mut().zip(&c.verify_cloud) {
                *u += c_n.eval(z);
            }
        }
        stages.push(StageRecord {
            stage: n,
            new_components: ex.new_at(n).len(),
            fit_points: req.fit.len(),
            prev_verify_points: prev_v.len(),
            new_verify_points: new_v.len(),
            degree: out.degree,
            status: out.status,
            prev_error,
            new_error,
            budget,
            pass: prev_error < budget && new_error < budget,
            ladder: out.ladder,
        });
        poly.add(c_n);
    }
    let bounds = ex.engulf.iter().map(|&e| telescope_bound(&stages, e)).collect();
    let gauge_at_anchor = ch.components.iter().map(|c| sched.gauge(c.anchor, &ch.domain)).collect();
    Ok(RunCertificate {
        operator: op,
        stages,
        polynomial: poly,
        schedule: sched.clone(),
        engulf: ex.engulf.clone(),
        anchors: g.to_vec(),
        bounds,
        gauge_at_anchor,
    })
}

/// Direct scan `sup |u_N − g_j|` over the verify cloud of component `j`.
pub fn measured_error(ch: &ChapletSet, cert: &RunCertificate, j: usize) -> f64 {
    let t = Complex64::new(cert.anchors[j], 0.0);
    ch.components[j]
        .verify_cloud
        .iter()
        .map(|&z| deviation(cert.operator, cert.polynomial.eval(z), t))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn record(stage: usize, e: f64) -> StageRecord {
        StageRecord {
            stage,
            new_components: 0,
            fit_points: 0,
            prev_verify_points: 0,
            new_verify_points: 0,
            degree: 0,
            status: FitStatus::Converged,
            prev_error: e,
            new_error: e,
            budget: 1.0,
            pass: true,
            ladder: Vec::new(),
        }
    }

    #[test]
    fn telescoping_sums() {
        assert_eq!(telescope_bound(&[record(1, 0.25)], 1), 0.25);
        let s = [record(1, 0.01), record(2, 0.004), record(3, 0.001)];
        assert!((telescope_bound(&s, 1) - 0.015).abs() < 1e-15);
        assert!((telescope_bound(&s, 2) - 0.005).abs() < 1e-15);
    }

    #[test]
    fn unit_schedule_tail_is_one() {
        for n in 1..12 {
            let s = ToleranceSchedule::from_values(1.0, 0.0, vec![1.0; n]).unwrap();
            assert_eq!(s.tail(1), 1.0);
        }
    }

    #[test]
    fn increasing_schedule_rejected() {
        assert!(ToleranceSchedule::from_values(1.0, 0.0, vec![0.5, 0.6]).is_err());
        assert!(ToleranceSchedule::from_values(1.0, 0.0, vec![0.0]).is_err());
    }
}

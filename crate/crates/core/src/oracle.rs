//! Global polynomial fits through a Vandermonde-with-Arnoldi basis.
//!
//! The basis is orthogonalised against the fit cloud (modified Gram–Schmidt,
//! applied twice) and evaluated elsewhere by replaying the recurrence. A
//! harmonic fit uses the real parts `Re(a_k q_k)` of the same basis.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    CauchyRiemann,
    Laplace,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("fit cloud is empty")]
    EmptyFitCloud,
    #[error("verify cloud is empty")]
    EmptyVerifyCloud,
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("cloud contains a non-finite point or target")]
    NonFinite,
}

/// One Arnoldi-recurrence polynomial `Σ coef_k w_k(z)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArnoldiTerm {
    /// `hessenberg[k]` has length `k + 2`: projections of `z·w_k` on
    /// `w_0..w_k` followed by the normalising factor of `w_{k+1}`.
    pub hessenberg: Vec<Vec<Complex64>>,
    pub coefficients: Vec<Complex64>,
}

impl ArnoldiTerm {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let d = self.degree();
        let mut w: Vec<Complex64> = Vec::with_capacity(d + 1);
        w.push(Complex64::new(1.0, 0.0));
        let mut acc = self.coefficients[0];
        for k in 0..d {
            let h = &self.hessenberg[k];
            let mut v = z * w[k];
            for (j, wj) in w.iter().enumerate() {
                v -= h[j] * wj;
            }
            v /= h[k + 1];
            acc += self.coefficients[k + 1] * v;
            w.push(v);
        }
        acc
    }
}

/// A global solution of `Pf = 0`: a sum of Arnoldi terms. For the Laplace
/// kind the value is the real part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalPolynomial {
    pub operator: OperatorKind,
    pub terms: Vec<ArnoldiTerm>,
}

impl GlobalPolynomial {
    pub fn zero(operator: OperatorKind) -> Self {
        Self { operator, terms: Vec::new() }
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(ArnoldiTerm::degree).max().unwrap_or(0)
    }

    pub fn add(&mut self, other: GlobalPolynomial) {
        self.terms.extend(other.terms);
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let v: Complex64 = self.terms.iter().map(|t| t.eval(z)).sum();
        match self.operator {
            OperatorKind::CauchyRiemann => v,
            OperatorKind::Laplace => Complex64::new(v.re, 0.0),
        }
    }

    /// Distance between a value of this polynomial and a target.
    pub fn deviation(&self, value: Complex64, target: Complex64) -> f64 {
        match self.operator {
            OperatorKind::CauchyRiemann => (value - target).norm(),
            OperatorKind::Laplace => (value.re - target.re).abs(),
        }
    }
}

pub fn evaluate(p: &GlobalPolynomial, z: Complex64) -> Complex64 {
    p.eval(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitPoint {
    pub z: Complex64,
    pub target: Complex64,
    pub weight: f64,
}

impl FitPoint {
    pub fn new(z: Complex64, target: f64) -> Self {
        Self { z, target: Complex64::new(target, 0.0), weight: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitRequest {
    pub fit: Vec<FitPoint>,
    /// Points and targets scanned for the sup error.
    pub verify: Vec<(Complex64, Complex64)>,
    pub tolerance: f64,
    pub max_degree: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderStep {
    pub degree: usize,
    pub error: f64,
    pub best_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum FitStatus {
    Converged,
    DegreeExhausted,
    /// The Krylov vectors became numerically dependent at this degree.
    Breakdown { degree: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub polynomial: GlobalPolynomial,
    pub achieved_error: f64,
    pub degree: usize,
    pub success: bool,
    pub status: FitStatus,
    pub ladder: Vec<LadderStep>,
}

/// Degrees tried by the escalation: 0, 1, 2, 4, 8, … and finally `max`.
pub fn degree_ladder(max: usize) -> Vec<usize> {
    let mut v = vec![0];
    let mut d = 1;
    while d < max {
        v.push(d);
        d *= 2;
    }
    if max > 0 {
        v.push(max);
    }
    v
}

const BREAKDOWN: f64 = 1e-13;

struct Krylov {
    z: Vec<Complex64>,
    w: Vec<f64>,
    wsum: f64,
    q: Vec<Vec<Complex64>>,
    h: Vec<Vec<Complex64>>,
    /// Basis values on the verify cloud, column by column.
    vq: Vec<Vec<Complex64>>,
    vz: Vec<Complex64>,
}

impl Krylov {
    fn new(fit: &[FitPoint], verify: &[(Complex64, Complex64)]) -> Self {
        let wsum: f64 = fit.iter().map(|p| p.weight).sum();
        Self {
            z: fit.iter().map(|p| p.z).collect(),
            w: fit.iter().map(|p| p.weight).collect(),
            wsum,
            q: vec![vec![Complex64::new(1.0, 0.0); fit.len()]],
            h: Vec::new(),
            vq: vec![vec![Complex64::new(1.0, 0.0); verify.len()]],
            vz: verify.iter().map(|p| p.0).collect(),
        }
    }

    fn dot(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for i in 0..a.len() {
            s += a[i].conj() * b[i] * self.w[i];
        }
        s / self.wsum
    }

    fn degree(&self) -> usize {
        self.q.len() - 1
    }

    fn extend(&mut self) -> bool {
        let k = self.degree();
        let mut v: Vec<Complex64> = self.z.iter().zip(&self.q[k]).map(|(z, q)| z * q).collect();
        let start = math::sqrt(self.dot(&v, &v).re);
        let mut h = vec![Complex64::new(0.0, 0.0); k + 2];
        for _ in 0..2 {
            for j in 0..=k {
                let c = self.dot(&self.q[j], &v);
                for (vi, qi) in v.iter_mut().zip(&self.q[j]) {
                    *vi -= c * qi;
                }
                h[j] += c;
            }
        }
        let norm = math::sqrt(self.dot(&v, &v).re);
        if !(norm > BREAKDOWN * start.max(1e-300)) || !(norm > 1e-300) {
            return false;
        }
        h[k + 1] = Complex64::new(norm, 0.0);
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        let mut vv: Vec<Complex64> = self.vz.iter().zip(&self.vq[k]).map(|(z, q)| z * q).collect();
        for j in 0..=k {
            for (vi, qi) in vv.iter_mut().zip(&self.vq[j]) {
                *vi -= h[j] * qi;
            }
        }
        for vi in vv.iter_mut() {
            *vi /= h[k + 1];
        }
        self.q.push(v);
        self.vq.push(vv);
        self.h.push(h);
        true
    }
}

/// Real orthonormal columns for harmonic fits, built incrementally.
struct RealQr {
    u: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
    /// For every kept column: Arnoldi index and whether it is the imaginary part.
    source: Vec<(usize, bool)>,
}

impl RealQr {
    fn push(&mut self, col: Vec<f64>, w: &[f64], wsum: f64, source: (usize, bool)) {
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(w).map(|((x, y), w)| x * y * w).sum::<f64>() / wsum;
        let start = math::sqrt(dot(&col, &col));
        let mut v = col;
        let mut r = vec![0.0; self.u.len() + 1];
        for _ in 0..2 {
            for (j, uj) in self.u.iter().enumerate() {
                let c = dot(uj, &v);
                for (vi, ui) in v.iter_mut().zip(uj) {
                    *vi -= c * ui;
                }
                r[j] += c;
            }
        }
        let norm = math::sqrt(dot(&v, &v));
        if !(norm > 1e-12 * start) || !(norm > 1e-300) {
            return;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        r[self.u.len()] = norm;
        self.u.push(v);
        self.r.push(r);
        self.source.push(source);
    }
}

fn validate(req: &FitRequest) -> Result<(), OracleError> {
    if req.fit.is_empty() {
        return Err(OracleError::EmptyFitCloud);
    }
    if req.verify.is_empty() {
        return Err(OracleError::EmptyVerifyCloud);
    }
    if !(req.tolerance > 0.0) {
        return Err(OracleError::BadTolerance(req.tolerance));
    }
    let finite = |z: Complex64| z.re.is_finite() && z.im.is_finite();
    if req.fit.iter().any(|p| !(finite(p.z) && finite(p.target) && p.weight.is_finite() && p.weight > 0.0))
        || req.verify.iter().any(|(z, t)| !(finite(*z) && finite(*t)))
    {
        return Err(OracleError::NonFinite);
    }
    Ok(())
}

/// Least-squares coefficients at the current degree.
fn solve(kr: &Krylov, kind: OperatorKind, targets: &[Complex64], qr: &mut Option<RealQr>) -> Vec<Complex64> {
    let d = kr.degree();
    match kind {
        OperatorKind::CauchyRiemann => {
            let mut c = vec![Complex64::new(0.0, 0.0); d + 1];
            let mut res: Vec<Complex64> = targets.to_vec();
            for _ in 0..2 {
                for k in 0..=d {
                    let a = kr.dot(&kr.q[k], &res);
                    for (ri, qi) in res.iter_mut().zip(&kr.q[k]) {
                        *ri -= a * qi;
                    }
                    c[k] += a;
                }
            }
            c
        }
        OperatorKind::Laplace => {
            let qr = qr.get_or_insert_with(|| RealQr { u: Vec::new(), r: Vec::new(), source: Vec::new() });
            let seen = qr.source.last().map(|s| s.0 + 1).unwrap_or(0);
            for k in seen..=d {
                let re: Vec<f64> = kr.q[k].iter().map(|v| v.re).collect();
                qr.push(re, &kr.w, kr.wsum, (k, false));
                if k > 0 {
                    let im: Vec<f64> = kr.q[k].iter().map(|v| v.im).collect();
                    qr.push(im, &kr.w, kr.wsum, (k, true));
                }
            }
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).zip(&kr.w).map(|((x, y), w)| x * y * w).sum::<f64>() / kr.wsum;
            let n = qr.u.len();
            let mut gamma = vec![0.0; n];
            let mut res: Vec<f64> = targets.iter().map(|t| t.re).collect();
            for _ in 0..2 {
                for j in 0..n {
                    let a = dot(&qr.u[j], &res);
                    for (ri, ui) in res.iter_mut().zip(&qr.u[j]) {
                        *ri -= a * ui;
                    }
                    gamma[j] += a;
                }
            }
            let mut beta = vec![0.0; n];
            for i in (0..n).rev() {
                let mut s = gamma[i];
                for j in (i + 1)..n {
                    s -= qr.r[j][i] * beta[j];
                }
                beta[i] = s / qr.r[i][i];
            }
            let mut c = vec![Complex64::new(0.0, 0.0); d + 1];
            for (b, &(k, imag)) in beta.iter().zip(&qr.source) {
                c[k] += if imag { Complex64::new(0.0, -*b) } else { Complex64::new(*b, 0.0) };
            }
            c
        }
    }
}

fn scan(kr: &Krylov, kind: OperatorKind, c: &[Complex64], verify: &[(Complex64, Complex64)]) -> f64 {
    let mut worst = 0.0f64;
    for (i, (_, t)) in verify.iter().enumerate() {
        let mut v = Complex64::new(0.0, 0.0);
        for (k, ck) in c.iter().enumerate() {
            v += ck * kr.vq[k][i];
        }
        let e = match kind {
            OperatorKind::CauchyRiemann => (v - t).norm(),
            OperatorKind::Laplace => (v.re - t.re).abs(),
        };
        worst = if e.is_nan() { f64::INFINITY } else { worst.max(e) };
    }
    worst
}

pub fn fit(req: &FitRequest, kind: OperatorKind) -> Result<FitOutcome, OracleError> {
    validate(req)?;
    let targets: Vec<Complex64> = req.fit.iter().map(|p| p.target).collect();
    let mut kr = Krylov::new(&req.fit, &req.verify);
    let mut qr = None;
    let mut ladder = Vec::new();
    let mut best: Option<(f64, usize, Vec<Complex64>)> = None;
    let mut status = FitStatus::DegreeExhausted;
    for d in degree_ladder(req.max_degree) {
        let mut broke = false;
        while kr.degree() < d {
            if !kr.extend() {
                broke = true;
                break;
            }
        }
        if broke && ladder.last().map(|s: &LadderStep| s.degree) == Some(kr.degree()) {
            status = FitStatus::Breakdown { degree: kr.degree() + 1 };
            break;
        }
        let c = solve(&kr, kind, &targets, &mut qr);
        let err = scan(&kr, kind, &c, &req.verify);
        if best.as_ref().is_none_or(|b| err < b.0) {
            best = Some((err, kr.degree(), c));
        }
        let best_error = best.as_ref().map(|b| b.0).unwrap_or(err);
        ladder.push(LadderStep { degree: kr.degree(), error: err, best_error });
        if best_error <= req.tolerance {
            status = FitStatus::Converged;
            break;
        }
        if broke {
            status = FitStatus::Breakdown { degree: kr.degree() + 1 };
            break;
        }
    }
    let (achieved_error, degree, c) = best.expect("ladder always holds degree 0");
    let term = ArnoldiTerm { hessenberg: kr.h[..degree].to_vec(), coefficients: c };
    Ok(FitOutcome {
        polynomial: GlobalPolynomial { operator: kind, terms: vec![term] },
        achieved_error,
        degree,
        success: status == FitStatus::Converged,
        status,
        ladder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(center: Complex64, r: f64, n: usize) -> Vec<Complex64> {
        let mut v = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let z = Complex64::new(-1.0 + 2.0 * (i as f64 + 0.5) / n as f64, -1.0 + 2.0 * (j as f64 + 0.5) / n as f64);
                if z.norm() <= 1.0 {
                    v.push(center + z * r);
                }
            }
        }
        v
    }

    fn request(pts: &[Complex64], f: impl Fn(Complex64) -> Complex64, tol: f64, max: usize) -> FitRequest {
        FitRequest {
            fit: pts.iter().map(|&z| FitPoint { z, target: f(z), weight: 1.0 }).collect(),
            verify: pts.iter().map(|&z| (z * 0.999, f(z * 0.999))).collect(),
            tolerance: tol,
            max_degree: max,
        }
    }

    #[test]
    fn constants_at_degree_zero() {
        let pts = grid(Complex64::new(0.1, 0.2), 0.5, 20);
        for kind in [OperatorKind::CauchyRiemann, OperatorKind::Laplace] {
            let out = fit(&request(&pts, |_| Complex64::new(5.0, 0.0), 1e-12, 16), kind).unwrap();
            assert!(out.success);
            assert_eq!(out.degree, 0);
            assert!(out.achieved_error <= 1e-12);
            assert!((out.polynomial.eval(Complex64::new(3.0, -2.0)).re - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_reproduced() {
        let pts = grid(Complex64::new(0.0, 0.0), 0.8, 20);
        let out = fit(&request(&pts, |z| z, 1e-12, 8), OperatorKind::CauchyRiemann).unwrap();
        assert_eq!(out.degree, 1);
        let z = Complex64::new(0.3, 0.1);
        assert!((out.polynomial.eval(z) - z).norm() < 1e-10);
    }

    #[test]
    fn harmonic_in_span() {
        let pts = grid(Complex64::new(0.0, 0.0), 0.8, 20);
        let f = |z: Complex64| Complex64::new((z * z).re, 0.0);
        let out = fit(&request(&pts, f, 1e-10, 8), OperatorKind::Laplace).unwrap();
        assert!(out.success && out.degree == 2);
        assert!(out.achieved_error <= 1e-10);
    }

    #[test]
    fn ladder_shape() {
        assert_eq!(degree_ladder(0), vec![0]);
        assert_eq!(degree_ladder(10), vec![0, 1, 2, 4, 8, 10]);
        assert_eq!(degree_ladder(8), vec![0, 1, 2, 4, 8]);
    }

    #[test]
    fn few_points_break_down() {
        let pts = [Complex64::new(0.1, 0.0), Complex64::new(0.2, 0.1), Complex64::new(-0.3, 0.2)];
        let out = fit(&request(&pts, |z| (z * 7.0).exp(), 1e-14, 32), OperatorKind::CauchyRiemann).unwrap();
        assert!(matches!(out.status, FitStatus::Breakdown { .. } | FitStatus::Converged));
        assert!(out.degree <= 2);
    }

    #[test]
    fn two_discs_regression() {
        let left = grid(Complex64::new(-0.5, 0.0), 0.2, 24);
        let right = grid(Complex64::new(0.5, 0.0), 0.2, 24);
        let fine_l = grid(Complex64::new(-0.5, 0.0), 0.2, 48);
        let fine_r = grid(Complex64::new(0.5, 0.0), 0.2, 48);
        let mut fitc: Vec<FitPoint> = left.iter().map(|&z| FitPoint::new(z, 0.0)).collect();
        fitc.extend(right.iter().map(|&z| FitPoint::new(z, 1.0)));
        let mut verify: Vec<(Complex64, Complex64)> = fine_l.iter().map(|&z| (z, Complex64::new(0.0, 0.0))).collect();
        verify.extend(fine_r.iter().map(|&z| (z, Complex64::new(1.0, 0.0))));
        let req = FitRequest { fit: fitc, verify, tolerance: 1e-3, max_degree: 100 };
        let out = fit(&req, OperatorKind::CauchyRiemann).unwrap();
        assert!(out.success && out.degree <= 32);
        assert!(out.ladder.windows(2).all(|w| w[1].best_error <= w[0].best_error));
    }
}

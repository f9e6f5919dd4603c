//! Self-checks of the special-function layer: orthonormality, the three-term
//! recurrence and the `X_0` coupling integrals.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::harmonics::{self, c5};
use crate::specfun::{self, recurrence_coeffs};
use crate::{math, Error, Result};

pub const AUDIT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AuditConfig {
    pub lmax: u32,
    pub mmax: u32,
    /// Highest degree of the recurrence suite.
    pub recurrence_lmax: u32,
    /// Relative perturbation applied to every `N_{l,m}`; zero in normal runs.
    pub norm_perturbation: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        AuditConfig { lmax: 30, mmax: 10, recurrence_lmax: 40, norm_perturbation: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: String,
    pub checks: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    /// Where the largest deviation occurred.
    pub worst: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub suites: Vec<SuiteReport>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

struct Tracker {
    checks: usize,
    max: f64,
    worst: String,
}

impl Tracker {
    fn new() -> Self {
        Tracker { checks: 0, max: 0.0, worst: String::new() }
    }

    fn record(&mut self, dev: f64, at: impl FnOnce() -> String) {
        self.checks += 1;
        if dev > self.max || dev.is_nan() {
            self.max = if dev.is_nan() { f64::INFINITY } else { dev };
            self.worst = at();
        }
    }

    fn finish(self, name: &str) -> SuiteReport {
        SuiteReport {
            name: String::from(name),
            checks: self.checks,
            max_deviation: self.max,
            tolerance: AUDIT_TOLERANCE,
            worst: self.worst,
            passed: self.max <= AUDIT_TOLERANCE,
        }
    }
}

/// Quadrature of `P_l^m P_l'^m (1 - t^2)^{3/2}` against `delta_{l l'}`.
pub fn orthonormality_suite(lmax: u32, mmax: u32, norm_perturbation: f64) -> Result<SuiteReport> {
    let rule = specfun::jacobi_rule(specfun::default_order(lmax as usize))?;
    let scale = 1.0 + norm_perturbation;
    let mut tr = Tracker::new();
    for m in 0..=mmax.min(lmax) as usize {
        let cols: Vec<Vec<f64>> = rule
            .nodes()
            .iter()
            .map(|&t| specfun::assoc_legendre_column(m, lmax as usize, t))
            .collect();
        let n = lmax as usize - m + 1;
        for a in 0..n {
            for b in a..n {
                let v: f64 = rule.weights().iter().zip(&cols).map(|(w, c)| w * c[a] * c[b]).sum::<f64>() * scale * scale;
                let want = if a == b { 1.0 } else { 0.0 };
                tr.record(math::abs(v - want), || format!("l={} l'={} m={m}", m + a, m + b));
            }
        }
    }
    Ok(tr.finish("orthonormality"))
}

/// `|a P_l^m - b t P_{l-1}^m + c P_{l-2}^m|` relative to the largest term, at
/// 21 equispaced points of `[-1, 1]`, for `2 <= l <= lmax` and `m < l - 1`.
pub fn recurrence_suite(lmax: u32) -> SuiteReport {
    let mut tr = Tracker::new();
    for k in 0..=20 {
        let t = -1.0 + 0.1 * f64::from(k);
        for m in 0..lmax.saturating_sub(1) as usize {
            let col = specfun::assoc_legendre_column(m, lmax as usize, t);
            for ell in (m + 2).max(2)..=lmax as usize {
                let (a, b, c) = recurrence_coeffs(ell, m);
                let (p, p1, p2) = (col[ell - m], col[ell - m - 1], col[ell - m - 2]);
                let terms = [a * p, b * t * p1, c * p2];
                let mag = terms.iter().fold(0.0f64, |acc, v| acc.max(math::abs(*v)));
                let resid = math::abs(terms[0] - terms[1] + terms[2]);
                let dev = if mag > 0.0 { resid / mag } else { resid };
                tr.record(dev, || format!("l={ell} m={m} t={t:.1}"));
            }
        }
    }
    tr.finish("recurrence")
}

/// The `X_0` coupling integrals against `C5`, plus the identity `a/b = C5(l-1, m)`.
pub fn coupling_suite(lmax: u32, mmax: u32) -> Result<SuiteReport> {
    let audit = harmonics::x0_coupling_audit(lmax, mmax)?;
    let mut tr = Tracker::new();
    tr.checks = audit.pairs;
    tr.max = audit.max_deviation;
    let (l, l2, m) = audit.worst;
    tr.worst = format!("l={l} l'={l2} m={m}");
    for ell in 1..=lmax as usize {
        for m in 0..ell.min(mmax as usize + 1) {
            let (a, b, _) = recurrence_coeffs(ell, m);
            let dev = math::abs(a / b - c5(ell as i64 - 1, m as i64));
            tr.record(dev, || format!("ratio l={ell} m={m}"));
        }
    }
    Ok(tr.finish("coupling"))
}

pub fn run_audit(cfg: &AuditConfig) -> Result<AuditReport> {
    if cfg.lmax > 30 || cfg.mmax > 30 {
        return Err(Error::InvalidArgument(format!(
            "audit supports lmax, mmax <= 30 (got {}, {})",
            cfg.lmax, cfg.mmax
        )));
    }
    Ok(AuditReport {
        suites: alloc::vec![
            orthonormality_suite(cfg.lmax, cfg.mmax, cfg.norm_perturbation)?,
            recurrence_suite(cfg.recurrence_lmax),
            coupling_suite(cfg.lmax, cfg.mmax)?,
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_audit_passes() {
        let rep = run_audit(&AuditConfig { lmax: 12, mmax: 4, ..AuditConfig::default() }).unwrap();
        for s in &rep.suites {
            assert!(s.passed, "{s:?}");
            assert!(s.checks > 0);
        }
    }

    #[test]
    fn perturbed_norm_fails_orthonormality() {
        let cfg = AuditConfig { lmax: 8, mmax: 2, recurrence_lmax: 10, norm_perturbation: 1e-6 };
        let rep = run_audit(&cfg).unwrap();
        assert!(!rep.passed());
        assert!(!rep.suites[0].passed);
        assert!(rep.suites[1].passed && rep.suites[2].passed);
    }

    #[test]
    fn oversized_request_rejected() {
        assert!(run_audit(&AuditConfig { lmax: 31, ..AuditConfig::default() }).is_err());
    }
}

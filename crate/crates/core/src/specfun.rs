//! Special functions on `[-1, 1]` and Gauss quadrature for the weight
//! `(1 - t^2)^{3/2}`.
//!
//! Gegenbauer polynomials are evaluated by forward recurrence in the degree.
//! The normalized variant `C_n(t) / C_n(1)` is propagated directly, which
//! keeps values bounded by one on `[-1, 1]` and avoids the overflow of
//! `C_n(1)` for large `n` and parameter. Forward recurrence is stable over the
//! range used here (degrees up to a few hundred).

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg;
use crate::math;
use crate::{Error, Result};

/// Total mass of the weight: `int_{-1}^{1} (1 - t^2)^{3/2} dt = 3 pi / 8`.
pub const WEIGHT_MASS: f64 = 3.0 * PI / 8.0;

/// Gegenbauer polynomial `C_n^{(nu)}(t)`, defined by the generating function
/// `sum_n C_n^{(nu)}(t) r^n = (1 - 2 r t + r^2)^{-nu}`.
pub fn gegenbauer(nu: f64, n: usize, t: f64) -> f64 {
    debug_assert!(nu > 0.0);
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 2.0 * nu * t;
    for k in 2..=n {
        let k = k as f64;
        let next = (2.0 * t * (k + nu - 1.0) * cur - (k + 2.0 * nu - 2.0) * prev) / k;
        prev = cur;
        cur = next;
    }
    cur
}

/// Legendre polynomial of degree `ell` in dimension `dim`, normalized so that
/// it equals one at `t = 1`.
pub fn legendre_poly(dim: u32, ell: usize, t: f64) -> f64 {
    debug_assert!(dim >= 3);
    let lambda = (f64::from(dim) - 2.0) / 2.0;
    let mut out = 0.0;
    normalized_gegenbauer_seq(lambda, ell, t, |n, v| {
        if n == ell {
            out = v;
        }
    });
    out
}

// Calls `sink(n, C_n(t) / C_n(1))` for n = 0..=nmax.
fn normalized_gegenbauer_seq(lambda: f64, nmax: usize, t: f64, mut sink: impl FnMut(usize, f64)) {
    let mut prev = 1.0;
    sink(0, prev);
    if nmax == 0 {
        return;
    }
    let mut cur = t;
    sink(1, cur);
    for n in 2..=nmax {
        let nf = n as f64;
        let next =
            (2.0 * (nf + lambda - 1.0) * t * cur - (nf - 1.0) * prev) / (nf + 2.0 * lambda - 1.0);
        prev = cur;
        cur = next;
        sink(n, cur);
    }
}

/// `|S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2)`.
pub fn sphere_area(n: u32) -> f64 {
    let h = (f64::from(n) + 1.0) / 2.0;
    if n < 100 {
        2.0 * math::pow(PI, h) / math::tgamma(h)
    } else {
        math::exp(core::f64::consts::LN_2 + h * math::ln(PI) - math::lgamma(h))
    }
}

/// Normalization `N_{l,m}` of the dimension-6 associated Legendre function,
/// chosen so that the family is orthonormal against `(1 - t^2)^{3/2}`.
///
/// Factorial ratios are taken through `lgamma`, so the value stays finite far
/// beyond the point where `(l + m + 3)!` overflows.
pub fn norm_constant(ell: usize, m: usize) -> f64 {
    debug_assert!(m <= ell);
    let (l, m) = (ell as f64, m as f64);
    let log_ratio = math::lgamma(l + m + 4.0) - math::lgamma(l - m + 1.0) - math::lgamma(2.0 * m + 5.0);
    // |S^{2m+4}| / |S^{2m+5}| = Gamma(m + 3) / (sqrt(pi) Gamma(m + 5/2))
    let log_area = math::lgamma(m + 3.0) - math::lgamma(m + 2.5) - 0.5 * math::ln(PI);
    math::sqrt((2.0 * l + 4.0) * math::exp(log_ratio + log_area))
}

/// Normalized associated Legendre function `P_l^m(6; t)`; zero when `m > l`.
pub fn assoc_legendre(ell: usize, m: usize, t: f64) -> f64 {
    if m > ell {
        return 0.0;
    }
    norm_constant(ell, m) * envelope(m, t) * legendre_poly(2 * m as u32 + 6, ell - m, t)
}

/// `P_l^m(6; t)` for `l = m..=lmax` at a single point, in one recurrence pass.
/// Entry `k` of the result holds degree `m + k`.
pub fn assoc_legendre_column(m: usize, lmax: usize, t: f64) -> Vec<f64> {
    if m > lmax {
        return Vec::new();
    }
    let env = envelope(m, t);
    let mut out = Vec::with_capacity(lmax - m + 1);
    normalized_gegenbauer_seq(m as f64 + 2.0, lmax - m, t, |n, v| {
        out.push(norm_constant(m + n, m) * env * v);
    });
    out
}

fn envelope(m: usize, t: f64) -> f64 {
    if m == 0 {
        1.0
    } else {
        math::pow((1.0 - t * t).max(0.0), m as f64 / 2.0)
    }
}

/// Coefficients `(a, b, c)` of the three-term relation
/// `a P_l^m - b t P_{l-1}^m + c P_{l-2}^m = 0`, valid for `m <= l - 2`.
pub fn recurrence_coeffs(ell: usize, m: usize) -> (f64, f64, f64) {
    let (l, m) = (ell as f64, m as f64);
    let a = math::sqrt((l - m) * (l + m + 3.0) / ((2.0 * l + 4.0) * (l + m + 2.0)));
    let b = math::sqrt((2.0 * l + 2.0) / (l + m + 2.0));
    let c = math::sqrt((l - m - 1.0) / (2.0 * l));
    (a, b, c)
}

/// A Gauss rule on `(-1, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Number of nodes.
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// `sum_i w_i f(t_i)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.iter().map(|(t, w)| w * f(t)).sum()
    }
}

/// Gauss rule for the weight `(1 - t^2)^{3/2}`, exact for polynomials of
/// degree `<= 2 n - 1`.
///
/// Nodes come from the eigenvalues of the Jacobi matrix of the weight
/// (Golub-Welsch), polished by Newton steps on the orthonormal recurrence;
/// weights use the Christoffel formula `1 / sum_k p_k(t)^2`.
pub fn jacobi_rule(npoints: usize) -> Result<QuadratureRule> {
    // Monic recurrence of C^{(2)}: b_k = k (k + 3) / (4 (k + 1) (k + 2)).
    gauss_rule(npoints, WEIGHT_MASS, |k| {
        let k = k as f64;
        k * (k + 3.0) / (4.0 * (k + 1.0) * (k + 2.0))
    })
}

/// Plain Gauss-Legendre rule (unit weight).
pub fn legendre_rule(npoints: usize) -> Result<QuadratureRule> {
    gauss_rule(npoints, 2.0, |k| {
        let k = k as f64;
        k * k / (4.0 * k * k - 1.0)
    })
}

/// Node count that integrates every product of two degree-`lmax` Legendre
/// functions against the weight exactly, with margin.
pub fn default_order(lmax: usize) -> usize {
    2 * (lmax + 8)
}

// Symmetric weight on (-1, 1) with monic recurrence
// p_{k+1} = t p_k - b_k p_{k-1}.
fn gauss_rule(n: usize, mass: f64, b: impl Fn(usize) -> f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
    }
    let off: Vec<f64> = (1..n).map(|k| math::sqrt(b(k))).collect();
    let diag = alloc::vec![0.0; n];
    let mut nodes = linalg::tridiagonal_eigenvalues(&diag, &off)?;

    let mut weights = Vec::with_capacity(n);
    for t in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dp, _) = orthonormal_eval(*t, n, mass, &off);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            *t -= step;
            if math::abs(step) <= 4.0 * f64::EPSILON {
                break;
            }
        }
        let (_, _, sumsq) = orthonormal_eval(*t, n, mass, &off);
        weights.push(1.0 / sumsq);
    }

    // Exact symmetry of the weight: enforce it on the rule.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let t = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -t;
        nodes[j] = t;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    let ordered = nodes.windows(2).all(|w| w[0] < w[1]);
    let interior = nodes.iter().all(|&t| t > -1.0 && t < 1.0);
    if !ordered || !interior || weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::NoConvergence { index: 0, iterations: 0 });
    }
    Ok(QuadratureRule { nodes, weights })
}

// Orthonormal p_n(t), its derivative, and sum_{k<n} p_k(t)^2.
fn orthonormal_eval(t: f64, n: usize, mass: f64, off: &[f64]) -> (f64, f64, f64) {
    let mut p_prev = 0.0;
    let mut p = 1.0 / math::sqrt(mass);
    let mut d_prev = 0.0;
    let mut d = 0.0;
    let mut sumsq = 0.0;
    for k in 0..n {
        sumsq += p * p;
        let beta_next = if k < off.len() { off[k] } else { last_beta(off, k) };
        let beta_k = if k == 0 { 0.0 } else { off[k - 1] };
        let p_next = (t * p - beta_k * p_prev) / beta_next;
        let d_next = (p + t * d - beta_k * d_prev) / beta_next;
        p_prev = p;
        p = p_next;
        d_prev = d;
        d = d_next;
    }
    (p, d, sumsq)
}

// The top step only needs the zero set of p_n, so any positive scale works.
fn last_beta(off: &[f64], _k: usize) -> f64 {
    off.last().copied().unwrap_or(1.0)
}

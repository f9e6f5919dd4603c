//! Radial initial data, their Penrose transforms, and the deficit functional
//! evaluated by sphere-side quadrature.
//!
//! A radial datum `f(x) = phi(|x|)` corresponds to the zonal sphere function
//! `F(t) = phi(r) / (1 + t)^w` with `t = X_0`, `r = sqrt((1 - t)/(1 + t))`, and
//! weight `w = 2` for positions, `w = 3` for velocities.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::energy::{self, Component, SphereState};
use crate::harmonics::{CoeffField, MultiIndex};
use crate::specfun::{self, QuadratureRule};
use crate::{math, quadform, Error, Result};

/// Shape of a radial profile `phi(r)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ProfileKind {
    /// `4 (1 + r^2)^{-2}`, the position part of the maximiser.
    Maximiser,
    /// `amplitude * (1 + (r/scale)^2)^{-power}`.
    Rational { amplitude: f64, scale: f64, power: f64 },
    /// `amplitude * exp(-(r/width)^2)`.
    Gaussian { amplitude: f64, width: f64 },
    /// `amplitude * exp(1 - 1/(1 - (r/radius)^2))` inside `radius`, else 0.
    Bump { amplitude: f64, radius: f64 },
    /// Piecewise-linear through `(radii[i], values[i])`, zero past the last radius.
    Table { radii: Vec<f64>, values: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub kind: ProfileKind,
    pub component: Component,
}

impl RadialProfile {
    pub fn new(kind: ProfileKind, component: Component) -> Result<Self> {
        let bad = |what: &str| Err(Error::InvalidArgument(String::from(what)));
        match &kind {
            ProfileKind::Rational { scale, .. } if !(*scale > 0.0) => return bad("rational profile needs scale > 0"),
            ProfileKind::Gaussian { width, .. } if !(*width > 0.0) => return bad("gaussian profile needs width > 0"),
            ProfileKind::Bump { radius, .. } if !(*radius > 0.0) => return bad("bump profile needs radius > 0"),
            ProfileKind::Table { radii, values } => {
                if radii.len() != values.len() || radii.len() < 2 {
                    return bad("table profile needs matching radii and values, at least two samples");
                }
                if radii[0] != 0.0 || radii.windows(2).any(|w| !(w[0] < w[1])) {
                    return bad("table radii must start at 0 and increase strictly");
                }
            }
            _ => {}
        }
        Ok(RadialProfile { kind, component })
    }

    pub fn maximiser() -> Self {
        RadialProfile { kind: ProfileKind::Maximiser, component: Component::F0 }
    }

    fn weight(&self) -> i32 {
        match self.component {
            Component::F0 => 2,
            Component::F1 => 3,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::Maximiser => 4.0 / ((1.0 + r * r) * (1.0 + r * r)),
            ProfileKind::Rational { amplitude, scale, power } => {
                let s = r / scale;
                amplitude * math::pow(1.0 + s * s, -power)
            }
            ProfileKind::Gaussian { amplitude, width } => {
                let s = r / width;
                amplitude * math::exp(-s * s)
            }
            ProfileKind::Bump { amplitude, radius } => {
                let s = r / radius;
                if s >= 1.0 {
                    0.0
                } else {
                    amplitude * math::exp(1.0 - 1.0 / (1.0 - s * s))
                }
            }
            ProfileKind::Table { radii, values } => match radii.iter().position(|&x| x > r) {
                None => 0.0,
                Some(0) => values[0],
                Some(i) => {
                    let f = (r - radii[i - 1]) / (radii[i] - radii[i - 1]);
                    values[i - 1] + f * (values[i] - values[i - 1])
                }
            },
        }
    }

    /// `phi'(r)`.
    pub fn derivative(&self, r: f64) -> f64 {
        match &self.kind {
            ProfileKind::Maximiser => -16.0 * r / math::pow(1.0 + r * r, 3.0),
            ProfileKind::Rational { amplitude, scale, power } => {
                let s = r / scale;
                -amplitude * power * math::pow(1.0 + s * s, -power - 1.0) * 2.0 * r / (scale * scale)
            }
            ProfileKind::Gaussian { width, .. } => -2.0 * r / (width * width) * self.eval(r),
            ProfileKind::Bump { radius, .. } => {
                let s = r / radius;
                if s >= 1.0 {
                    0.0
                } else {
                    let d = 1.0 - s * s;
                    -2.0 * s / (radius * d * d) * self.eval(r)
                }
            }
            ProfileKind::Table { radii, values } => match radii.iter().position(|&x| x > r) {
                None | Some(0) => 0.0,
                Some(i) => (values[i] - values[i - 1]) / (radii[i] - radii[i - 1]),
            },
        }
    }

    /// The zonal sphere function `F(t)`.
    pub fn sphere_value(&self, t: f64) -> f64 {
        let r = math::sqrt((1.0 - t) / (1.0 + t));
        self.eval(r) / math::pow(1.0 + t, f64::from(self.weight()))
    }

    /// Boundedness of `F` near `t = -1`: `|phi(r)| r^{2w}` must not grow past
    /// the radius of the outermost quadrature node.
    pub fn check_decay(&self, rule: &QuadratureRule) -> Result<()> {
        let t0 = rule.nodes()[0];
        let r0 = math::sqrt((1.0 - t0) / (1.0 + t0));
        let k = 2.0 * f64::from(self.weight());
        let g = |r: f64| math::abs(self.eval(r)) * math::pow(r, k);
        let (near, far, farther) = (g(r0), g(10.0 * r0), g(100.0 * r0));
        if !(near.is_finite() && far.is_finite() && farther.is_finite()) {
            return Err(Error::Decay(format!("profile is not finite near r = {r0:e}")));
        }
        let bound = 1.01 * near + 1e-300;
        if far > bound || farther > bound {
            return Err(Error::Decay(format!(
                "|phi(r)| r^{k} grows from {near:e} at r = {r0:e} to {farther:e} at r = {:e}",
                100.0 * r0
            )));
        }
        Ok(())
    }
}

/// Zonal harmonic coefficients of the Penrose transform of `p`.
pub fn radial_to_zonal(p: &RadialProfile, lmax: u32, order: usize) -> Result<CoeffField> {
    let rule = specfun::jacobi_rule(order)?;
    p.check_decay(&rule)?;
    let s4 = math::sqrt(specfun::sphere_area(4));
    let mut coeffs = vec![0.0; lmax as usize + 1];
    for (t, w) in rule.iter() {
        let f = p.sphere_value(t);
        let col = specfun::assoc_legendre_column(0, lmax as usize, t);
        for (c, pl) in coeffs.iter_mut().zip(&col) {
            *c += w * f * pl;
        }
    }
    CoeffField::from_entries(lmax, coeffs.into_iter().enumerate().map(|(l, c)| (MultiIndex::zonal(l as u32), s4 * c)))
}

/// Sphere state of the radial datum `(f0, f1)`; either part may be absent.
pub fn radial_state(f0: Option<&RadialProfile>, f1: Option<&RadialProfile>, lmax: u32, order: usize) -> Result<SphereState> {
    let field = |p: Option<&RadialProfile>, c: Component| -> Result<CoeffField> {
        match p {
            None => Ok(CoeffField::new(lmax)),
            Some(p) if p.component != c => Err(Error::InvalidArgument(format!(
                "profile for {} supplied as {c}",
                p.component
            ))),
            Some(p) => radial_to_zonal(p, lmax, order),
        }
    };
    Ok(SphereState::new(field(f0, Component::F0)?, field(f1, Component::F1)?))
}

/// Flat-space energy `|S^4| int phi'(r)^2 r^4 dr` (positions) or
/// `|S^4| int phi(r)^2 r^4 dr` (velocities), with `r = tan(theta)` and
/// Gauss-Legendre in `theta`.
pub fn flat_energy(p: &RadialProfile, order: usize) -> Result<f64> {
    let rule = specfun::legendre_rule(order)?;
    let half = PI / 4.0;
    let sum: f64 = rule
        .iter()
        .map(|(x, w)| {
            let theta = half * (1.0 + x);
            let (s, c) = (math::sin(theta), math::cos(theta));
            let r = s / c;
            let v = match p.component {
                Component::F0 => p.derivative(r),
                Component::F1 => p.eval(r),
            };
            w * v * v * math::pow(r, 4.0) / (c * c)
        })
        .sum();
    Ok(specfun::sphere_area(4) * half * sum)
}

/// Node counts for the `(T, X_0)` product rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureOrders {
    pub n_t: usize,
    pub n_x: usize,
}

impl QuadratureOrders {
    /// Exact for the quartic integrand of any state of degree `<= lmax`.
    pub fn for_lmax(lmax: u32) -> Self {
        let l = lmax as usize;
        QuadratureOrders { n_t: (4 * l + 16).max(256), n_x: (2 * l + 8).max(128) }
    }

    pub fn doubled(self) -> Self {
        QuadratureOrders { n_t: 2 * self.n_t, n_x: 2 * self.n_x }
    }
}

/// Time-mode amplitudes `(F0(l), F1(l)/(l+2))` of a zonal state.
fn zonal_modes(x: &SphereState) -> Result<Vec<(f64, f64)>> {
    if let Some(k) = x.non_zonal_index() {
        return Err(Error::NonZonal(k));
    }
    let lmax = x.lmax() as usize;
    Ok((0..=lmax)
        .map(|l| {
            let k = MultiIndex::zonal(l as u32);
            (x.f0.get(&k), x.f1.get(&k) / (l as f64 + 2.0))
        })
        .collect())
}

/// `1/2 int_{[-pi,pi] x S^5} weight(T) U^2 h(U) (cos T + X_0)^2`, where `U` is the
/// sphere evolution and `h` picks the second factor.
fn spacetime_integral(x: &SphereState, orders: QuadratureOrders, quartic: bool) -> Result<f64> {
    let modes = zonal_modes(x)?;
    if orders.n_t == 0 || orders.n_x == 0 {
        return Err(Error::InvalidArgument(String::from("quadrature orders must be positive")));
    }
    let lmax = modes.len() - 1;
    let rule = specfun::jacobi_rule(orders.n_x)?;
    let s4 = specfun::sphere_area(4);
    let inv = 1.0 / math::sqrt(s4);
    let columns: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&t| specfun::assoc_legendre_column(0, lmax, t).into_iter().map(|p| p * inv).collect())
        .collect();
    let dt = 2.0 * PI / orders.n_t as f64;
    let mut total = 0.0;
    let mut amps = vec![0.0; lmax + 1];
    for i in 0..orders.n_t {
        let tt = -PI + dt * i as f64;
        for (l, (a, b)) in modes.iter().enumerate() {
            let w = (l + 2) as f64 * tt;
            amps[l] = a * math::cos(w) + b * math::sin(w);
        }
        let c2 = math::cos(2.0 * tt);
        let ct = math::cos(tt);
        let mut slice = 0.0;
        for ((t, w), col) in rule.iter().zip(&columns) {
            let u: f64 = amps.iter().zip(col).map(|(a, p)| a * p).sum();
            let other = if quartic { u * u } else { c2 * c2 };
            let cw = ct + t;
            slice += w * u * u * other * cw * cw;
        }
        total += slice;
    }
    Ok(0.5 * s4 * dt * total)
}

/// `|| S x ||_{L^4}^4` by product quadrature (zonal states only).
pub fn quartic_integral(x: &SphereState, orders: QuadratureOrders) -> Result<f64> {
    spacetime_integral(x, orders, true)
}

/// `int (S f*)^2 (S x)^2` by product quadrature (zonal states only).
pub fn crossed_integral(x: &SphereState, orders: QuadratureOrders) -> Result<f64> {
    spacetime_integral(x, orders, false)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeficitReport {
    pub h_norm_sq: f64,
    pub l4_fourth_power: f64,
    pub deficit: f64,
    pub orders: QuadratureOrders,
    /// Relative change of the quartic integral when both orders are doubled.
    pub quadrature_residual: f64,
}

/// The deficit `|x|_H^2 / (8 pi) - ||S x||_{L^4}^2`.
pub fn deficit(x: &SphereState, orders: QuadratureOrders) -> Result<DeficitReport> {
    let h = energy::h_norm_sq(x);
    let q4 = quartic_integral(x, orders)?;
    let q4_fine = quartic_integral(x, orders.doubled())?;
    let residual = if q4_fine == 0.0 { math::abs(q4) } else { math::abs(q4 - q4_fine) / math::abs(q4_fine) };
    Ok(DeficitReport {
        h_norm_sq: h,
        l4_fourth_power: q4,
        deficit: h / (8.0 * PI) - math::sqrt(q4),
        orders,
        quadrature_residual: residual,
    })
}

fn deficit_value(x: &SphereState, orders: QuadratureOrders) -> Result<f64> {
    Ok(energy::h_norm_sq(x) / (8.0 * PI) - math::sqrt(quartic_integral(x, orders)?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorPoint {
    pub epsilon: f64,
    pub deficit: f64,
    /// `deficit - epsilon^2 Q(g) / 2`.
    pub remainder: f64,
    /// `8 pi deficit / (epsilon^2 |g|_H^2)`.
    pub sandwich_ratio: f64,
    /// `deficit / (epsilon^2 Q(g))`, tending to `1/2`.
    pub hessian_ratio: f64,
    /// The remainder is below the quadrature noise floor.
    pub dropped: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorReport {
    pub q_form: f64,
    pub h_norm_sq: f64,
    pub points: Vec<TaylorPoint>,
    /// Least-squares slope of `log |remainder|` against `log epsilon`.
    pub slope: Option<f64>,
}

impl TaylorReport {
    /// `8 pi Q(g) / |g|_H^2`.
    pub fn q_ratio(&self) -> f64 {
        8.0 * PI * self.q_form / self.h_norm_sq
    }

    /// Small-`epsilon` limit of the sandwich ratio, half of [`Self::q_ratio`].
    pub fn limiting_sandwich_ratio(&self) -> f64 {
        0.5 * self.q_ratio()
    }
}

/// Deficit along `f* + epsilon g` against the quadratic form.
pub fn taylor_experiment(g: &SphereState, epsilons: &[f64], orders: Option<QuadratureOrders>) -> Result<TaylorReport> {
    if let Some(k) = g.non_zonal_index() {
        return Err(Error::NonZonal(k));
    }
    let q = quadform::q_form(g)?;
    if g.is_zero() {
        return Err(Error::InvalidArgument(String::from("perturbation must be nonzero")));
    }
    let orders = orders.unwrap_or_else(|| QuadratureOrders::for_lmax(g.lmax()));
    let hg = energy::h_norm_sq(g);
    let star = energy::fstar(g.lmax());
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let x = star.axpy(eps, g);
        let phi = deficit_value(&x, orders)?;
        let remainder = phi - 0.5 * eps * eps * q;
        let floor = 64.0 * f64::EPSILON * energy::h_norm_sq(&x) / (8.0 * PI);
        points.push(TaylorPoint {
            epsilon: eps,
            deficit: phi,
            remainder,
            sandwich_ratio: 8.0 * PI * phi / (eps * eps * hg),
            hessian_ratio: phi / (eps * eps * q),
            dropped: !(math::abs(remainder) > floor),
        });
    }
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| !p.dropped)
        .map(|p| (math::ln(p.epsilon), math::ln(math::abs(p.remainder))))
        .collect();
    let slope = (fit.len() >= 2).then(|| {
        let n = fit.len() as f64;
        let mx = fit.iter().map(|p| p.0).sum::<f64>() / n;
        let my = fit.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = fit.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = fit.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    });
    Ok(TaylorReport { q_form: q, h_norm_sq: hg, points, slope })
}

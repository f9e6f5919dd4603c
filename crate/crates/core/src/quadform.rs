//! The deficit quadratic form `Q` in harmonic coefficients.
//!
//! [`q_form`] uses the tridiagonal closed form valid on tilde-orthogonal
//! states; [`q_form_via_spacetime`] assembles the same number from the second
//! variation of the deficit, with the crossed space-time integral taken from
//! closed-form coefficient sums. [`q_form_general`] evaluates the second
//! variation on arbitrary states by exact trigonometric Parseval sums.
//!
//! The rescaled coefficients `a`, `b` of [`reduced_coeffs`] describe
//! `Q - C/(8 pi) |.|_H^2` in the variables `H(l) = G(l) sqrt((l+1)(l+3))`;
//! they are stored in units of `1/pi`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::energy::{self, Component, SphereState};
use crate::harmonics::{c5, CoeffField, MultiIndex};
use crate::{math, Error, Result};

/// Numerator of `alpha`, `l^4 + 8l^3 + 11l^2 - 20l - 12 + 6 m1^2 + 18 m1`.
pub fn alpha_numerator(ell: i64, m1: i64) -> i64 {
    let l = ell;
    l.pow(4) + 8 * l.pow(3) + 11 * l * l - 20 * l - 12 + 6 * m1 * m1 + 18 * m1
}

pub fn alpha(ell: u32, m1: u32) -> f64 {
    let l = f64::from(ell);
    alpha_numerator(i64::from(ell), i64::from(m1)) as f64 / ((l + 1.0) * (l + 3.0))
}

/// Off-diagonal coefficient coupling degrees `l` and `l + 1`; zero when `m1 > l`.
pub fn beta(ell: u32, m1: u32) -> f64 {
    if m1 > ell {
        return 0.0;
    }
    let (l, m) = (f64::from(ell), f64::from(m1));
    (l - 1.0) * (l + 6.0) * math::sqrt((l + 1.0 - m) * (l + 4.0 + m) / ((l + 2.0) * (l + 3.0)))
}

pub fn alpha_beta(ell: u32, m1: u32) -> Result<(f64, f64)> {
    if ell < 2 || m1 > ell {
        return Err(Error::InvalidArgument(format!(
            "alpha/beta need l >= 2 and m1 <= l (got l={ell}, m1={m1})"
        )));
    }
    Ok((alpha(ell, m1), beta(ell, m1)))
}

/// Lowest degree carried by the `m1` block after tilde-orthogonality.
pub fn tilde_floor(c: Component, m1: u32) -> u32 {
    match c {
        Component::F0 => m1.max(2),
        Component::F1 if m1 == 0 => 2,
        Component::F1 => m1.max(1),
    }
}

/// Diagonal and `l <-> l+1` coefficients of `Q` for one component, in the
/// original coefficients `F(l)`.
fn q_entries(c: Component, ell: u32, m1: u32) -> (f64, f64) {
    let l = f64::from(ell);
    let k = 1.0 / (4.0 * PI);
    match (c, ell) {
        (_, 0) => (0.0, 0.0),
        (Component::F0, 1) => (0.0, 0.0),
        (Component::F1, 1) => (if m1 == 1 { k / 3.0 } else { 0.0 }, 0.0),
        (Component::F0, _) => (k * alpha(ell, m1), k * beta(ell, m1)),
        (Component::F1, _) => (
            k * alpha(ell, m1) / ((l + 2.0) * (l + 2.0)),
            k * beta(ell, m1) / ((l + 2.0) * (l + 3.0)),
        ),
    }
}

/// Tridiagonal matrix of `Q` on the `m1` block, degrees `tilde_floor..=lmax`.
/// The off-diagonal entries are halved so that `x^T Q x` reproduces the form.
pub fn q_block(c: Component, m1: u32, lmax: u32) -> (Vec<f64>, Vec<f64>) {
    let lo = tilde_floor(c, m1);
    let diag = (lo..=lmax).map(|l| q_entries(c, l, m1).0).collect();
    let off = (lo..lmax).map(|l| 0.5 * q_entries(c, l, m1).1).collect();
    (diag, off)
}

fn component_q(c: Component, f: &CoeffField) -> f64 {
    let mut sum = 0.0;
    for (k, &v) in f.iter() {
        let (d, o) = q_entries(c, k.ell, k.m1());
        let up = MultiIndex { ell: k.ell + 1, m: k.m };
        sum += v * (d * v + o * f.get(&up));
    }
    sum
}

/// `Q(x, x)` for a tilde-orthogonal state.
pub fn q_form(x: &SphereState) -> Result<f64> {
    energy::check_tilde_orthogonal(x)?;
    Ok(component_q(Component::F0, &x.f0) + component_q(Component::F1, &x.f1))
}

/// Closed-form sum `S` with `I = (pi/4) S` for one component, expressed in the
/// time-mode amplitudes `u(l)` (`F0(l)` or `F1(l)/(l+2)`).
fn crossed_component_sum(amp: &CoeffField, with_base_row: bool) -> f64 {
    let mut s = 0.0;
    for (k, &v) in amp.iter() {
        let (ell, m1) = (i64::from(k.ell), i64::from(k.m1()));
        let up = amp.get(&MultiIndex { ell: k.ell + 1, m: k.m });
        if k.ell >= 2 {
            let (l, m) = (ell as f64, m1 as f64);
            let diag = (2.0 * l * l + 8.0 * l - m * m - 3.0 * m + 4.0) / (2.0 * (l + 1.0) * (l + 3.0));
            s += diag * v * v + 2.0 * c5(ell, m1) * v * up;
        } else if with_base_row && k.ell == 1 && m1 == 1 {
            s += 0.5 * v * v + 2.0 * c5(1, 1) * v * up;
        }
    }
    s
}

fn velocity_amplitudes(f1: &CoeffField) -> CoeffField {
    let mut g = CoeffField::new(f1.lmax());
    for (k, &v) in f1.iter() {
        g.set(*k, v / (f64::from(k.ell) + 2.0)).expect("same index set");
    }
    g
}

/// `int (S f*)^2 (S x)^2` over space-time for a tilde-orthogonal state, from
/// closed-form coefficient sums.
pub fn crossed_sum(x: &SphereState) -> Result<f64> {
    energy::check_tilde_orthogonal(x)?;
    let s0 = crossed_component_sum(&x.f0, false);
    let s1 = crossed_component_sum(&velocity_amplitudes(&x.f1), true);
    Ok(PI / 4.0 * (s0 + s1))
}

/// Real trigonometric polynomial `a_0 + sum a_n cos(nT) + b_n sin(nT)`.
#[derive(Clone, Debug, Default)]
struct Trig {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Trig {
    fn grow(&mut self, n: usize) {
        if self.a.len() <= n {
            self.a.resize(n + 1, 0.0);
            self.b.resize(n + 1, 0.0);
        }
    }

    fn add_cos(&mut self, n: i64, c: f64) {
        let k = n.unsigned_abs() as usize;
        self.grow(k);
        self.a[k] += c;
    }

    fn add_sin(&mut self, n: i64, c: f64) {
        if n == 0 {
            return;
        }
        let k = n.unsigned_abs() as usize;
        self.grow(k);
        self.b[k] += c * n.signum() as f64;
    }

    fn times_cos(&self, j: i64) -> Trig {
        let mut out = Trig::default();
        for (n, (&a, &b)) in self.a.iter().zip(&self.b).enumerate() {
            let n = n as i64;
            out.add_cos(n + j, 0.5 * a);
            out.add_cos(n - j, 0.5 * a);
            out.add_sin(n + j, 0.5 * b);
            out.add_sin(n - j, 0.5 * b);
        }
        out
    }

    fn axpy(&mut self, c: f64, other: &Trig) {
        self.grow(other.a.len().saturating_sub(1));
        for n in 0..other.a.len() {
            self.a[n] += c * other.a[n];
            self.b[n] += c * other.b[n];
        }
    }

    /// `int_{-pi}^{pi} f(T)^2 dT`.
    fn square_integral(&self) -> f64 {
        let head = self.a.first().map_or(0.0, |a0| 2.0 * PI * a0 * a0);
        let tail: f64 = self.a.iter().zip(&self.b).skip(1).map(|(a, b)| a * a + b * b).sum();
        head + PI * tail
    }
}

/// `int (S f*)^2 (S x)^2` for any state, by exact Parseval sums over each
/// `(l, m)` row of `(cos T + X_0) U`.
pub fn crossed_fourier(x: &SphereState) -> f64 {
    let g1 = velocity_amplitudes(&x.f1);
    let mut rows: alloc::collections::BTreeMap<[i32; 4], alloc::collections::BTreeMap<u32, Trig>> =
        alloc::collections::BTreeMap::new();
    let mut mode = |k: &MultiIndex, cos_amp: f64, sin_amp: f64| {
        let freq = i64::from(k.ell) + 2;
        let e = rows.entry(k.m).or_default().entry(k.ell).or_default();
        e.add_cos(freq, cos_amp);
        e.add_sin(freq, sin_amp);
    };
    for (k, &v) in x.f0.iter() {
        mode(k, v, 0.0);
    }
    for (k, &v) in g1.iter() {
        mode(k, 0.0, v);
    }
    let mut total = 0.0;
    for (m, modes) in &rows {
        let m1 = i64::from(m[0]);
        let lo = *modes.keys().next().expect("non-empty");
        let hi = *modes.keys().next_back().expect("non-empty") + 1;
        for ell in lo.saturating_sub(1)..=hi {
            if i64::from(ell) < m1 {
                continue;
            }
            let l = i64::from(ell);
            let mut w = Trig::default();
            if let Some(u) = modes.get(&ell) {
                w.axpy(1.0, &u.times_cos(1));
            }
            if let Some(u) = ell.checked_sub(1).and_then(|d| modes.get(&d)) {
                w.axpy(c5(l - 1, m1), u);
            }
            if let Some(u) = modes.get(&(ell + 1)) {
                w.axpy(c5(l, m1), u);
            }
            total += w.times_cos(2).square_integral();
        }
    }
    0.5 * total
}

fn second_variation(x: &SphereState, crossed: f64) -> f64 {
    let star = energy::fstar(x.lmax());
    let n_star = energy::h_norm_sq(&star);
    let pairing = energy::h_inner(&star, x);
    let n_x = energy::h_norm_sq(x);
    16.0 * PI / n_star * ((2.0 * pairing * pairing + n_star * n_x) / (64.0 * PI * PI) - 3.0 * crossed)
}

/// `Q(x, x)` from the second variation of the deficit, using [`crossed_sum`].
pub fn q_form_via_spacetime(x: &SphereState) -> Result<f64> {
    let crossed = crossed_sum(x)?;
    Ok(second_variation(x, crossed))
}

/// Second variation of the deficit at `f*` for an arbitrary state.
pub fn q_form_general(x: &SphereState) -> f64 {
    second_variation(x, crossed_fourier(x))
}

/// Rescaled row coefficients at one `(l, m1)`, for the coercivity constant `C`
/// (in units of `1/(8 pi)`). `a` and `b` are in units of `1/pi`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockCoeffs {
    pub ell: u32,
    pub m1: u32,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub constant_c: f64,
}

/// `(l+1-m1)(l+4+m1) / ((l+1)(l+4))`, the square of the `m1` factor in `b`.
pub fn b_shape_sq(ell: u32, m1: u32) -> BigRational {
    let (l, m) = (BigInt::from(ell), BigInt::from(m1));
    let one = BigInt::from(1);
    let four = BigInt::from(4);
    BigRational::new((&l + &one - &m) * (&l + &four + &m), (&l + &one) * (&l + &four))
}

/// `pi * a(l, m1; C)` as an exact rational.
pub fn a_scaled(ell: u32, m1: u32, c: &BigRational) -> BigRational {
    let l = BigInt::from(ell);
    let p1 = &l + BigInt::from(1);
    let p2 = &l + BigInt::from(2);
    let p3 = &l + BigInt::from(3);
    let num = BigInt::from(alpha_numerator(i64::from(ell), i64::from(m1)));
    let first = BigRational::new(num, BigInt::from(4) * &p1 * &p1 * &p3 * &p3);
    let second = c * BigRational::new(&p2 * &p2, BigInt::from(8) * &p1 * &p3);
    first - second
}

/// `pi * b(l, m1; C) / s(l, m1)`, the rational factor of `b`.
pub fn b_scaled_unit(ell: u32, c: &BigRational) -> BigRational {
    let l = BigInt::from(ell);
    let num = (&l - BigInt::from(1)) * (&l + BigInt::from(6));
    let den = BigInt::from(4) * (&l + BigInt::from(2)) * (&l + BigInt::from(3));
    BigRational::new(num, den) - c / BigRational::from_integer(BigInt::from(8))
}

/// Row coefficients for `l >= 2`; identical for both components.
pub fn reduced_coeffs(ell: u32, m1: u32, c: f64) -> Result<BlockCoeffs> {
    let (alpha, beta) = alpha_beta(ell, m1)?;
    let (l, m) = (f64::from(ell), f64::from(m1));
    let p1p3 = (l + 1.0) * (l + 3.0);
    let num = alpha_numerator(i64::from(ell), i64::from(m1)) as f64;
    let a = num / (4.0 * p1p3 * p1p3) - c * (l + 2.0) * (l + 2.0) / (8.0 * p1p3);
    let s = math::sqrt((l + 1.0 - m) * (l + 4.0 + m) / ((l + 1.0) * (l + 4.0)));
    let b = s * ((l - 1.0) * (l + 6.0) / (4.0 * (l + 2.0) * (l + 3.0)) - c / 8.0);
    Ok(BlockCoeffs { ell, m1, alpha, beta, a: a / PI, b: b / PI, constant_c: c })
}

/// The extra `F1` row at `l = 1`, `m1 = 1`: `(a~, b~)` in units of `1/pi`,
/// where `b~` couples it to the `l = 2` row.
pub fn reduced_coeffs_f1_base(c: f64) -> (f64, f64) {
    let a = 3.0 / 32.0 - 9.0 * c / 64.0;
    let b = -(c / 8.0) * math::sqrt(3.0 / 5.0);
    (a / PI, b / PI)
}

/// `pi * a~` as an exact rational.
pub fn a_base_scaled(c: &BigRational) -> BigRational {
    BigRational::new(BigInt::from(3), BigInt::from(32)) - c * BigRational::new(BigInt::from(9), BigInt::from(64))
}

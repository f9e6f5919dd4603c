//! Diagonal-dominance certificates for `Q - C/(8 pi) |.|_H^2` and finite
//! truncation spectral gaps.
//!
//! In the rescaled variables the form is tridiagonal in `l` for each fixed `m`,
//! with diagonal `a(l, m1)` and off-diagonal `b(l, m1)` (see
//! [`crate::quadform::reduced_coeffs`]). It is nonnegative once every row
//! satisfies `a(l) >= (|b(l)| + |b(l-1)|) / 2`, by completing squares.
//!
//! All margins are stored multiplied by `pi`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::energy::{gram_block, Component};
use crate::interval::Interval;
use crate::poly::{Poly, RatFunc};
use crate::quadform::{a_base_scaled, a_scaled, alpha_numerator, b_scaled_unit, b_shape_sq, q_block, tilde_floor};
use crate::{linalg, math, Error, Result};

pub type Block = Component;

/// Default last explicitly checked degree.
pub const DEFAULT_LCUT: u32 = 50;

/// A row margin `pi * (a - (|b| + |b'|) / 2)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Margin {
    Exact(BigRational),
    Interval(Interval),
}

impl Margin {
    /// `Some(sign)` when the sign is decided, `None` when an interval
    /// straddles zero.
    pub fn sign(&self) -> Option<Ordering> {
        match self {
            Margin::Exact(q) => Some(q.cmp(&BigRational::zero())),
            Margin::Interval(i) if i.is_positive() => Some(Ordering::Greater),
            Margin::Interval(i) if i.is_negative() => Some(Ordering::Less),
            Margin::Interval(_) => None,
        }
    }

    /// Margin in natural units (divided by `pi`).
    pub fn value(&self) -> f64 {
        let scaled = match self {
            Margin::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Margin::Interval(i) => 0.5 * (i.lo() + i.hi()),
        };
        scaled / PI
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowKind {
    /// First row of its `m` block: `a >= |b| / 2`.
    Bottom,
    /// `a >= (|b(l)| + |b(l-1)|) / 2`.
    Interior,
    /// The `F1` row at `l = 1`, `m1 = 1`.
    Base,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub ell: u32,
    pub m1: u32,
    pub kind: RowKind,
    pub margin: Margin,
}

/// Exact checks behind covering all `m1 >= 2` rows, and `m1 = 1` rows past
/// `Lcut`, by the zonal rows.
#[derive(Clone, Debug, PartialEq)]
pub struct Reduction {
    /// `pi (a(l, m1) - a(l, 0)) (4 (l+1)^2 (l+3)^2) = 6 m1^2 + 18 m1 >= 0`.
    pub a_increases: bool,
    /// `1 - s(l, m1)^2 = m1 (m1 + 3) / ((l+1)(l+4)) >= 0`, so `|b(l, m1)| <= |b(l, 0)|`.
    pub b_decreases: bool,
}

impl Reduction {
    pub fn holds(&self) -> bool {
        self.a_increases && self.b_decreases
    }
}

/// How a polynomial was shown positive on the tail.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// All coefficients in `l` nonnegative, leading one positive.
    AllCoeffsPositive,
    /// The same after substituting `l = shift + k`, `k >= 0`.
    ShiftedAllCoeffsPositive { shift: u32 },
    Failed,
}

impl Criterion {
    pub fn holds(&self) -> bool {
        !matches!(self, Criterion::Failed)
    }

    pub fn name(&self) -> &'static str {
        match self {
            Criterion::AllCoeffsPositive => "all-coeffs-positive",
            Criterion::ShiftedAllCoeffsPositive { .. } => "shifted-all-coeffs-positive",
            Criterion::Failed => "failed",
        }
    }
}

fn positivity_from(p: &Poly, from: u32) -> Criterion {
    if p.all_coeffs_nonnegative() {
        Criterion::AllCoeffsPositive
    } else if p.shift(i64::from(from)).all_coeffs_nonnegative() {
        Criterion::ShiftedAllCoeffsPositive { shift: from }
    } else {
        Criterion::Failed
    }
}

/// Symbolic proof that every zonal row with `l >= from_ell` has a positive
/// margin.
#[derive(Clone, Debug, PartialEq)]
pub struct TailCertificate {
    pub constant_c: BigRational,
    pub from_ell: u32,
    /// `pi * (a(l) - (b(l) + b(l-1)) / 2)` assembled from the row formulas.
    pub margin: RatFunc,
    /// `T(l)` in the closed form `T(l) / (4 (l+1)^2 (l+3)^2)`.
    pub numerator: Poly,
    /// Cross-multiplied difference between `margin` and the closed form.
    pub identity_residual: Poly,
    /// Coprime integer coefficients of `T`, ascending.
    pub poly: Vec<BigInt>,
    pub criterion: Criterion,
    /// Positivity of `8 (l+2)(l+3) pi b(l)` for `l >= from_ell - 1`, which
    /// removes the absolute values.
    pub b_sign: Criterion,
}

impl TailCertificate {
    pub fn holds(&self) -> bool {
        self.identity_residual.is_zero() && self.criterion.holds() && self.b_sign.holds()
    }
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn lin(c: i64) -> Poly {
    Poly::linear(c)
}

/// Tail certificate for the zonal rows `l >= from_ell` (`from_ell >= 3`).
pub fn tail_certificate(c: &BigRational, from_ell: u32) -> TailCertificate {
    let cp = Poly::constant(c.clone());
    // pi a(l, 0)
    let a_num = Poly::from_ints(&[-12, -20, 11, 8, 1]);
    let sq13 = lin(1).mul(&lin(3)).pow(2);
    let a = RatFunc::new(a_num, sq13.scale(&rat(4, 1))).sub(&RatFunc::new(
        cp.mul(&lin(2).pow(2)),
        lin(1).mul(&lin(3)).scale(&rat(8, 1)),
    ));
    // pi b(l, 0)
    let b = RatFunc::new(lin(-1).mul(&lin(6)), lin(2).mul(&lin(3)).scale(&rat(4, 1)))
        .sub(&RatFunc::poly(cp.scale(&rat(1, 8))));
    let half = rat(1, 2);
    let margin = a.sub(&b.add(&b.shift(-1)).scale(&half));

    let numerator = Poly::from_ints(&[15, 4, 1]).sub(&lin(1).mul(&lin(3)).scale(&(c * &half)));
    let closed = RatFunc::new(numerator.clone(), sq13.scale(&rat(4, 1)));
    let identity_residual = margin.identity_residual(&closed);

    let b_cleared = lin(-1).mul(&lin(6)).scale(&rat(2, 1)).sub(&lin(2).mul(&lin(3)).mul(&cp));
    TailCertificate {
        constant_c: c.clone(),
        from_ell,
        poly: numerator.primitive(),
        criterion: positivity_from(&numerator, from_ell),
        b_sign: positivity_from(&b_cleared, from_ell.saturating_sub(1)),
        margin,
        numerator,
        identity_residual,
    }
}

fn check_reduction() -> Reduction {
    // both sides are polynomials of degree <= 4 in l and <= 2 in m1, so
    // agreement on a 5 x 3 grid is an identity
    let a_increases = (0..5i64).all(|l| {
        (0..3i64).all(|m| alpha_numerator(l, m) - alpha_numerator(l, 0) == 6 * m * m + 18 * m)
    });
    let b_decreases = (0..5u32).all(|l| {
        (0..3u32).all(|m| {
            let lhs = BigRational::one() - b_shape_sq(l + 3, m);
            let (lf, mf) = (i64::from(l + 3), i64::from(m));
            lhs == rat(mf * (mf + 3), (lf + 1) * (lf + 4))
        })
    });
    Reduction { a_increases, b_decreases }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Certified,
    Falsified,
    Inconclusive,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Certified => "certified",
            Verdict::Falsified => "falsified",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RationalCertificate {
    pub block: Block,
    pub constant_c: BigRational,
    pub lmin: u32,
    pub lcut: u32,
    pub rows: Vec<Row>,
    pub reduction: Reduction,
    pub tail: TailCertificate,
    pub verdict: Verdict,
}

impl RationalCertificate {
    /// Rows whose margin is negative, or undecided.
    pub fn failing_rows(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| r.margin.sign() != Some(Ordering::Greater) && r.margin.sign() != Some(Ordering::Equal))
    }

    pub fn row(&self, ell: u32, m1: u32) -> Option<&Row> {
        self.rows.iter().find(|r| r.ell == ell && r.m1 == m1)
    }
}

fn zonal_margin(ell: u32, c: &BigRational, bottom: bool) -> BigRational {
    let half = rat(1, 2);
    let mut m = a_scaled(ell, 0, c) - b_scaled_unit(ell, c).abs() * &half;
    if !bottom {
        m -= b_scaled_unit(ell - 1, c).abs() * &half;
    }
    m
}

fn b_interval(ell: u32, m1: u32, c: &BigRational) -> Interval {
    Interval::from_rational(&b_shape_sq(ell, m1)).sqrt() * Interval::from_rational(&b_scaled_unit(ell, c))
}

/// `pi * b~`, the coupling of the `F1` base row to `l = 2`.
fn b_base_interval(c: &BigRational) -> Interval {
    -(Interval::from_rational(&(c * rat(1, 8))) * Interval::from_rational(&rat(3, 5)).sqrt())
}

/// Diagonal-dominance certificate for one block at coercivity constant `C`
/// (in units of `1/(8 pi)`), with rows up to `lcut` checked one by one.
pub fn dominance_check(block: Block, c: &BigRational, lcut: u32) -> Result<RationalCertificate> {
    if lcut < 3 {
        return Err(Error::InvalidArgument(format!("Lcut must be at least 3 (got {lcut})")));
    }
    if !(c.is_positive() && c < &BigRational::one()) {
        return Err(Error::InvalidArgument(format!("C must lie in (0, 1) (got {c})")));
    }
    let half = Interval::point(0.5);
    let mut rows = Vec::new();
    let lmin = tilde_floor(block, 0);

    if block == Component::F1 {
        let a = Interval::from_rational(&a_base_scaled(c));
        rows.push(Row { ell: 1, m1: 1, kind: RowKind::Base, margin: Margin::Interval(a - half * b_base_interval(c).abs()) });
    }
    for ell in lmin..=lcut {
        let bottom = ell == lmin;
        let kind = if bottom { RowKind::Bottom } else { RowKind::Interior };
        rows.push(Row { ell, m1: 0, kind, margin: Margin::Exact(zonal_margin(ell, c, bottom)) });
    }
    let floor1 = tilde_floor(block, 1);
    for ell in 2..=lcut {
        let a = Interval::from_rational(&a_scaled(ell, 1, c));
        let mut m = a - half * b_interval(ell, 1, c).abs();
        let kind = if ell > floor1 {
            let below = if ell > 2 { b_interval(ell - 1, 1, c) } else { b_base_interval(c) };
            m = m - half * below.abs();
            RowKind::Interior
        } else {
            RowKind::Bottom
        };
        rows.push(Row { ell, m1: 1, kind, margin: Margin::Interval(m) });
    }

    let reduction = check_reduction();
    let tail = tail_certificate(c, lcut + 1);
    let signs: Vec<Option<Ordering>> = rows.iter().map(|r| r.margin.sign()).collect();
    let verdict = if signs.contains(&Some(Ordering::Less)) || !tail.identity_residual.is_zero() {
        Verdict::Falsified
    } else if signs.contains(&None) || !tail.holds() || !reduction.holds() {
        Verdict::Inconclusive
    } else {
        Verdict::Certified
    };
    Ok(RationalCertificate { block, constant_c: c.clone(), lmin, lcut, rows, reduction, tail, verdict })
}

/// Bracket `[lower, upper]` around the largest certifiable constant.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantBracket {
    pub lower: BigRational,
    pub upper: BigRational,
    pub iterations: u32,
}

impl ConstantBracket {
    pub fn value(&self) -> f64 {
        ((&self.lower + &self.upper) / BigRational::from_integer(BigInt::from(2)))
            .to_f64()
            .unwrap_or(f64::NAN)
    }
}

/// Bisection over dyadic `C` for the largest constant certified by
/// [`dominance_check`] on every block in `blocks`.
pub fn max_dominant_constant_for(blocks: &[Block], tol: f64, lcut: u32) -> Result<ConstantBracket> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive (got {tol})")));
    }
    let certified = |c: &BigRational| -> Result<bool> {
        for &b in blocks {
            if dominance_check(b, c, lcut)?.verdict != Verdict::Certified {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut lo = BigRational::zero();
    let mut hi = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut iterations = 0;
    while (&hi - &lo).to_f64().unwrap_or(0.0) > tol {
        let mid = (&lo + &hi) / &two;
        if certified(&mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(ConstantBracket { lower: lo, upper: hi, iterations })
}

pub fn max_dominant_constant(tol: f64) -> Result<ConstantBracket> {
    max_dominant_constant_for(&[Component::F0, Component::F1], tol, DEFAULT_LCUT)
}

/// Smallest eigenvalue of `Q` against the energy Gram on one `m1` block.
#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub block: Block,
    pub m1: u32,
    pub lmax: u32,
    /// Number of degrees in the truncated block.
    pub dimension: usize,
    /// `8 pi` times the smallest generalized eigenvalue.
    pub lambda_min: f64,
    /// `|Q x - lambda G x| / (|Q x| + |lambda G x|)` for the computed eigenvector.
    pub residual: f64,
}

pub fn spectral_gap(block: Block, m1: u32, lmax: u32) -> Result<GapReport> {
    if lmax < 4 {
        return Err(Error::InvalidArgument(format!("spectral gap needs lmax >= 4 (got {lmax})")));
    }
    let lo_deg = tilde_floor(block, m1);
    if lo_deg > lmax {
        return Err(Error::InvalidArgument(format!("block m1={m1} is empty below lmax={lmax}")));
    }
    let (qd, qo) = q_block(block, m1, lmax);
    let (gd, go) = gram_block(block, m1, lo_deg, lmax);
    linalg::tridiagonal_ldlt(&gd, &go)?;
    let count = |s: f64| linalg::pencil_count_below(&qd, &qo, &gd, &go, s);

    let mut hi = qd.iter().zip(&gd).map(|(q, g)| q / g).fold(f64::INFINITY, f64::min);
    let mut lo = -1.0;
    while count(lo) > 0 {
        lo *= 2.0;
    }
    while count(hi) == 0 {
        hi = 2.0 * hi.abs() + 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);

    let shifted_d: Vec<f64> = qd.iter().zip(&gd).map(|(q, g)| q - lo * g).collect();
    let shifted_o: Vec<f64> = qo.iter().zip(&go).map(|(q, g)| q - lo * g).collect();
    let mut x = vec![1.0; qd.len()];
    for _ in 0..6 {
        let rhs = linalg::tridiagonal_apply(&gd, &go, &x);
        x = linalg::tridiagonal_solve(&shifted_d, &shifted_o, &rhs);
        let n = math::sqrt(x.iter().map(|v| v * v).sum());
        x.iter_mut().for_each(|v| *v /= n);
    }
    let qx = linalg::tridiagonal_apply(&qd, &qo, &x);
    let gx = linalg::tridiagonal_apply(&gd, &go, &x);
    let norm = |v: &[f64]| math::sqrt(v.iter().map(|a| a * a).sum());
    let r: Vec<f64> = qx.iter().zip(&gx).map(|(q, g)| q - lambda * g).collect();
    let residual = norm(&r) / (norm(&qx) + math::abs(lambda) * norm(&gx));

    Ok(GapReport { block, m1, lmax, dimension: qd.len(), lambda_min: 8.0 * PI * lambda, residual })
}

/// Human-readable one-line summary of a certificate.
pub fn summary(cert: &RationalCertificate) -> String {
    format!(
        "{} C={} rows={} tail={} verdict={}",
        cert.block,
        cert.constant_c,
        cert.rows.len(),
        cert.tail.criterion.name(),
        cert.verdict.name()
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{h_norm_sq, SphereState};
    use crate::harmonics::{CoeffField, MultiIndex};
    use crate::poly::coeff_strings;
    use crate::quadform::q_form;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c3685() -> BigRational {
        rat(36, 85)
    }

    #[test]
    fn f0_certified_at_36_85() {
        let cert = dominance_check(Component::F0, &c3685(), 50).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.row(2, 0).unwrap().margin, Margin::Exact(BigRational::zero()));
        assert!(cert.rows.iter().filter(|r| !(r.ell == 2 && r.m1 == 0)).all(|r| r.margin.sign() == Some(Ordering::Greater)));
        assert_eq!(coeff_strings(&cert.tail.poly), ["1221", "268", "67"]);
        assert_eq!(cert.tail.criterion, Criterion::AllCoeffsPositive);
        assert!(cert.reduction.holds());
    }

    #[test]
    fn f1_certified_at_36_85() {
        let cert = dominance_check(Component::F1, &c3685(), 50).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        let base = cert.row(1, 1).unwrap();
        assert_eq!(base.kind, RowKind::Base);
        let want = (93.0 / 2720.0 - (36.0 / 85.0) / 16.0 * 0.6f64.sqrt()) / PI;
        assert!((base.margin.value() - want).abs() < 1e-15);
        assert!((base.margin.value() - 0.004_356_6).abs() < 5e-7);
        let Margin::Interval(iv) = cert.row(2, 1).unwrap().margin.clone() else { panic!() };
        let exact = 64.0 / 1275.0 - 2.0 * 7f64.sqrt() / 255.0 - 9.0 * 15f64.sqrt() / 1700.0;
        assert!(iv.lo() <= exact && exact <= iv.hi() && iv.width() < 1e-15);
        assert!((exact / PI - 0.002_846_0).abs() < 1e-7);
    }

    #[test]
    fn falsified_just_above_36_85() {
        let c = c3685() + rat(1, 1000);
        let cert = dominance_check(Component::F0, &c, 50).unwrap();
        assert_eq!(cert.verdict, Verdict::Falsified);
        let first = cert.failing_rows().next().unwrap();
        assert_eq!((first.ell, first.m1), (2, 0));
    }

    #[test]
    fn strictly_positive_just_below() {
        let c = c3685() - rat(1, 1_000_000);
        for b in [Component::F0, Component::F1] {
            let cert = dominance_check(b, &c, 50).unwrap();
            assert_eq!(cert.verdict, Verdict::Certified);
            assert!(cert.rows.iter().all(|r| r.margin.sign() == Some(Ordering::Greater)));
        }
    }

    #[test]
    fn preconditions() {
        assert!(dominance_check(Component::F0, &c3685(), 2).is_err());
        assert!(dominance_check(Component::F0, &rat(1, 1), 10).is_err());
        assert!(dominance_check(Component::F0, &rat(0, 1), 10).is_err());
    }

    #[test]
    fn tail_examples() {
        let t = tail_certificate(&c3685(), 3);
        assert!(t.holds());
        let three = rat(3, 1);
        // (1/(4 * 4 * 6)) (36/24 - 18/85)
        let want = rat(1, 96) * (rat(36, 24) - rat(18, 85));
        assert_eq!(t.margin.eval(&three), want);
        assert_eq!(zonal_margin(3, &c3685(), false), want);
        // cleared form equals 85(l^2+4l+15) - 18(l+1)(l+3) up to scale
        let cleared = Poly::from_ints(&[15, 4, 1]).scale(&rat(85, 1)).sub(&Poly::from_ints(&[3, 4, 1]).scale(&rat(18, 1)));
        assert_eq!(cleared, Poly::from_ints(&[1221, 268, 67]));
    }

    #[test]
    fn tail_identity_for_general_constants() {
        for (p, q) in [(1, 4), (1, 2), (9, 10), (7, 3), (19, 10)] {
            let t = tail_certificate(&rat(p, q), 4);
            assert!(t.identity_residual.is_zero(), "{p}/{q}");
            for ell in 4..40 {
                let l = rat(ell, 1);
                let direct = a_scaled(ell as u32, 0, &rat(p, q))
                    - (b_scaled_unit(ell as u32, &rat(p, q)) + b_scaled_unit(ell as u32 - 1, &rat(p, q))) * rat(1, 2);
                assert_eq!(t.margin.eval(&l), direct);
            }
        }
        // beyond C = 2 the leading coefficient turns negative
        assert_eq!(tail_certificate(&rat(21, 10), 4).criterion, Criterion::Failed);
    }

    #[test]
    fn tail_agrees_with_explicit_rows() {
        let c = rat(2, 5);
        let t = tail_certificate(&c, 3);
        for ell in 3..200u32 {
            assert_eq!(t.margin.eval(&rat(i64::from(ell), 1)), zonal_margin(ell, &c, false));
        }
    }

    #[test]
    fn bisection_finds_36_85() {
        let b = max_dominant_constant_for(&[Component::F0], 1e-10, 20).unwrap();
        assert!((b.value() - 36.0 / 85.0).abs() <= 1e-10);
        assert!(b.lower <= c3685() && c3685() <= b.upper);
        assert!(max_dominant_constant_for(&[Component::F0], 0.0, 20).is_err());
    }

    fn random_block_state(rng: &mut ChaCha8Rng, block: Block, m1: u32, lmax: u32) -> SphereState {
        let mut f = CoeffField::new(lmax);
        let m = [m1 as i32, 0, 0, 0];
        for ell in tilde_floor(block, m1)..=lmax {
            let decay = 1.0 / (1.0 + f64::from(ell)).powi(if block == Component::F0 { 2 } else { 1 });
            f.set(MultiIndex { ell, m }, rng.gen_range(-1.0..1.0) * decay).unwrap();
        }
        match block {
            Component::F0 => SphereState::from_f0(f),
            Component::F1 => SphereState::from_f1(f),
        }
    }

    #[test]
    fn certificate_soundness_on_random_trial_vectors() {
        let c = c3685();
        let cf = 36.0 / 85.0;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for block in [Component::F0, Component::F1] {
            assert_eq!(dominance_check(block, &c, 20).unwrap().verdict, Verdict::Certified);
            for _ in 0..200 {
                let m1 = rng.gen_range(0..5);
                let lmax = rng.gen_range(4..=60);
                let x = random_block_state(&mut rng, block, m1, lmax);
                let h = h_norm_sq(&x);
                let excess = q_form(&x).unwrap() - cf / (8.0 * PI) * h;
                assert!(excess >= -1e-10 * h, "{block} m1={m1}: {excess}");
            }
        }
    }

    #[test]
    fn spectral_gap_monotone_and_above_dominance() {
        for block in [Component::F0, Component::F1] {
            for m1 in [0u32, 1, 2, 5] {
                let mut prev = f64::INFINITY;
                for lmax in [10u32, 20, 40, 80] {
                    let g = spectral_gap(block, m1, lmax).unwrap();
                    assert!(g.lambda_min <= prev + 1e-12, "{block} {m1} {lmax}");
                    assert!(g.lambda_min >= 36.0 / 85.0 - 1e-9);
                    assert!(g.residual < 1e-8, "{g:?}");
                    prev = g.lambda_min;
                }
            }
        }
        assert!(spectral_gap(Component::F0, 0, 3).is_err());
        assert!(spectral_gap(Component::F0, 9, 5).is_err());
    }

    /// Cyclic Jacobi sweeps on a dense symmetric matrix; returns eigenvalues.
    fn jacobi_eigenvalues(mut a: std::vec::Vec<f64>, n: usize) -> std::vec::Vec<f64> {
        for _ in 0..100 {
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[p * n + q];
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let (c, s) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                    for k in 0..n {
                        let (akp, akq) = (a[k * n + p], a[k * n + q]);
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i * n + i]).collect()
    }

    #[test]
    fn spectral_gap_matches_dense_oracle() {
        for (block, m1) in [(Component::F0, 0u32), (Component::F1, 1), (Component::F1, 0), (Component::F0, 3)] {
            let lmax = 12;
            let (qd, qo) = q_block(block, m1, lmax);
            let (gd, go) = gram_block(block, m1, tilde_floor(block, m1), lmax);
            let n = qd.len();
            let dense = |d: &[f64], o: &[f64]| {
                let mut m = vec![0.0; n * n];
                for i in 0..n {
                    m[i * n + i] = d[i];
                    if i + 1 < n {
                        m[i * n + i + 1] = o[i];
                        m[(i + 1) * n + i] = o[i];
                    }
                }
                m
            };
            let (q, g) = (dense(&qd, &qo), dense(&gd, &go));
            // L with G = L L^T, then M = L^{-1} Q L^{-T}
            let mut l = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let s = g[i * n + j] - (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum::<f64>();
                    l[i * n + j] = if i == j { s.sqrt() } else { s / l[j * n + j] };
                }
            }
            let solve_lower = |b: &[f64]| {
                let mut y = vec![0.0; n];
                for i in 0..n {
                    y[i] = (b[i] - (0..i).map(|k| l[i * n + k] * y[k]).sum::<f64>()) / l[i * n + i];
                }
                y
            };
            let mut x = vec![0.0; n * n];
            for j in 0..n {
                let col = solve_lower(&(0..n).map(|i| q[i * n + j]).collect::<std::vec::Vec<_>>());
                for i in 0..n {
                    x[i * n + j] = col[i];
                }
            }
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                let row = solve_lower(&x[i * n..(i + 1) * n]);
                for j in 0..n {
                    m[i * n + j] = row[j];
                }
            }
            let lam = jacobi_eigenvalues(m, n).into_iter().fold(f64::INFINITY, f64::min);
            let rep = spectral_gap(block, m1, lmax).unwrap();
            assert!((rep.lambda_min - 8.0 * PI * lam).abs() < 1e-10, "{block} {m1}: {} vs {}", rep.lambda_min, 8.0 * PI * lam);
        }
    }
}

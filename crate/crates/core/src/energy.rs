//! Energy inner product on Penrose-transformed data, the maximiser `f*` and
//! its tangent space, and the two orthogonality notions used by the deficit
//! analysis.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::f64::consts::PI;

use crate::harmonics::{c5, CoeffField, MultiIndex};
use crate::{linalg, math, specfun, Error, Result};

/// Position (`F0`) or velocity (`F1`) component of a sphere state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    F0,
    F1,
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Component::F0 => "F0",
            Component::F1 => "F1",
        })
    }
}

/// Penrose transform `(F0, F1)` of wave initial data, in harmonic coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SphereState {
    pub f0: CoeffField,
    pub f1: CoeffField,
}

impl SphereState {
    /// Pairs two fields, padding both to the larger truncation degree.
    pub fn new(f0: CoeffField, f1: CoeffField) -> Self {
        let lmax = f0.lmax().max(f1.lmax());
        SphereState { f0: f0.with_lmax(lmax), f1: f1.with_lmax(lmax) }
    }

    pub fn zero(lmax: u32) -> Self {
        SphereState { f0: CoeffField::new(lmax), f1: CoeffField::new(lmax) }
    }

    pub fn from_f0(f0: CoeffField) -> Self {
        let lmax = f0.lmax();
        SphereState::new(f0, CoeffField::new(lmax))
    }

    pub fn from_f1(f1: CoeffField) -> Self {
        let lmax = f1.lmax();
        SphereState::new(CoeffField::new(lmax), f1)
    }

    pub fn lmax(&self) -> u32 {
        self.f0.lmax()
    }

    pub fn component(&self, c: Component) -> &CoeffField {
        match c {
            Component::F0 => &self.f0,
            Component::F1 => &self.f1,
        }
    }

    pub fn add(&self, other: &SphereState) -> SphereState {
        SphereState::new(self.f0.add(&other.f0), self.f1.add(&other.f1))
    }

    pub fn sub(&self, other: &SphereState) -> SphereState {
        SphereState::new(self.f0.sub(&other.f0), self.f1.sub(&other.f1))
    }

    pub fn axpy(&self, a: f64, other: &SphereState) -> SphereState {
        SphereState::new(self.f0.axpy(a, &other.f0), self.f1.axpy(a, &other.f1))
    }

    pub fn scale(&self, c: f64) -> SphereState {
        SphereState::new(self.f0.scale(c), self.f1.scale(c))
    }

    pub fn is_zonal(&self) -> bool {
        self.f0.is_zonal() && self.f1.is_zonal()
    }

    /// First non-zonal index, if any.
    pub fn non_zonal_index(&self) -> Option<MultiIndex> {
        self.f0.support().chain(self.f1.support()).find(|k| !k.is_zonal()).copied()
    }

    pub fn is_zero(&self) -> bool {
        self.f0.iter().chain(self.f1.iter()).all(|(_, v)| *v == 0.0)
    }
}

/// Energy-Gram weights for one component: `(diag(l), off(l))` where `off(l)`
/// couples degrees `l` and `l + 1` (before multiplying by `C5`).
fn gram_weights(c: Component, ell: u32) -> (f64, f64) {
    let l = f64::from(ell);
    match c {
        Component::F0 => ((l + 2.0) * (l + 2.0), (l + 2.0) * (l + 3.0)),
        Component::F1 => (1.0, 1.0),
    }
}

fn component_inner(c: Component, x: &CoeffField, y: &CoeffField) -> f64 {
    let mut sum = 0.0;
    for (k, &v) in x.iter() {
        let ell = i64::from(k.ell);
        let m1 = i64::from(k.m1());
        let (d, o) = gram_weights(c, k.ell);
        let mut acc = d * y.get(k);
        let up = MultiIndex { ell: k.ell + 1, m: k.m };
        acc += c5(ell, m1) * o * y.get(&up);
        if let Some(down) = k.ell.checked_sub(1).and_then(|l| k.at_degree(l)) {
            let (_, o_down) = gram_weights(c, down.ell);
            acc += c5(ell - 1, m1) * o_down * y.get(&down);
        }
        sum += v * acc;
    }
    sum
}

/// Energy inner product `<x | y>_H` of two sphere states.
pub fn h_inner(x: &SphereState, y: &SphereState) -> f64 {
    component_inner(Component::F0, &x.f0, &y.f0) + component_inner(Component::F1, &x.f1, &y.f1)
}

pub fn h_norm_sq(x: &SphereState) -> f64 {
    h_inner(x, x)
}

/// The energy Gram matrix of one component restricted to a fixed `m1`, on
/// degrees `lmin..=lmax`, as a symmetric tridiagonal `(diag, off)`.
pub fn gram_block(c: Component, m1: u32, lmin: u32, lmax: u32) -> (Vec<f64>, Vec<f64>) {
    let lmin = lmin.max(m1);
    let diag = (lmin..=lmax).map(|l| gram_weights(c, l).0).collect();
    let off = (lmin..lmax)
        .map(|l| c5(i64::from(l), i64::from(m1)) * gram_weights(c, l).1)
        .collect();
    (diag, off)
}

/// The maximiser `f* = (4 (1 + |x|^2)^{-2}, 0)`, whose transform is the pair of
/// constants `F0 = 1`, `F1 = 0`.
pub fn fstar(lmax: u32) -> SphereState {
    let mut f0 = CoeffField::new(lmax);
    f0.set(MultiIndex::zonal(0), math::pow(PI, 1.5))
        .expect("degree 0 fits every truncation");
    SphereState::from_f0(f0)
}

/// The `F0` indices `l = 0, 1` and the zonal `F1` indices `l = 0, 1` are the
/// coordinates fixed by tilde-orthogonality.
fn is_tilde_constrained(c: Component, k: &MultiIndex) -> bool {
    match c {
        Component::F0 => k.ell <= 1,
        Component::F1 => k.ell <= 1 && k.is_zonal(),
    }
}

/// Removes the coefficients constrained by tilde-orthogonality.
pub fn project_tilde(x: &SphereState) -> SphereState {
    let strip = |c: Component, f: &CoeffField| {
        let mut out = f.clone();
        let drop: Vec<MultiIndex> = f.support().filter(|k| is_tilde_constrained(c, k)).copied().collect();
        for k in drop {
            out.remove(&k);
        }
        out
    };
    SphereState::new(strip(Component::F0, &x.f0), strip(Component::F1, &x.f1))
}

/// `Ok` iff every tilde-constrained coefficient is zero; otherwise names the
/// first offender.
pub fn check_tilde_orthogonal(x: &SphereState) -> Result<()> {
    for c in [Component::F0, Component::F1] {
        for (k, &v) in x.component(c).iter() {
            if v != 0.0 && is_tilde_constrained(c, k) {
                return Err(Error::NotTildeOrthogonal { component: c, index: *k, value: v });
            }
        }
    }
    Ok(())
}

pub fn is_tilde_orthogonal(x: &SphereState) -> bool {
    check_tilde_orthogonal(x).is_ok()
}

/// Coordinate of the monomial `1` on `Y_{0,0}`.
pub fn constant_coefficient() -> f64 {
    math::sqrt(specfun::sphere_area(4)) / specfun::norm_constant(0, 0)
}

/// Coordinate of `X_0` on `Y_{1,0}`.
pub fn x0_coefficient() -> f64 {
    let t = 0.5;
    math::sqrt(specfun::sphere_area(4)) / (specfun::assoc_legendre(1, 0, t) / t)
}

/// Coordinate of each `X_j`, `j = 1..5`, on its degree-one harmonic.
pub fn xj_coefficient() -> f64 {
    let t: f64 = 0.5;
    let profile = specfun::assoc_legendre(1, 1, t) / math::sqrt(1.0 - t * t);
    math::sqrt(specfun::sphere_area(4) / 5.0) / profile
}

/// The five degree-one indices with `m1 = 1`, carrying `X_1, ..., X_5`.
pub fn xj_indices() -> [MultiIndex; 5] {
    [[1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, -1], [1, 1, 1, 0], [1, 1, 1, 1]]
        .map(|m| MultiIndex { ell: 1, m })
}

/// Spanning set of the tangent space of the maximiser orbit at `f*`: the
/// transforms of `(1 + X_0)^2 (a_0 X_0 + ... + a_5 X_5 + a_6)` in `f0` and of
/// `(1 + X_0)^3 (b_0 X_0 + b_1)` in `f1`.
///
/// `states()[0]` is `f*` itself.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentBasis {
    states: Vec<SphereState>,
}

impl TangentBasis {
    pub const DIM: usize = 9;

    pub fn new(lmax: u32) -> Self {
        let lmax = lmax.max(1);
        let unit = |k: MultiIndex, v: f64| {
            let mut f = CoeffField::new(lmax);
            f.set(k, v).expect("degree <= 1 fits");
            f
        };
        let one = constant_coefficient();
        let x0 = x0_coefficient();
        let xj = xj_coefficient();
        let mut states = vec![
            SphereState::from_f0(unit(MultiIndex::zonal(0), one)),
            SphereState::from_f0(unit(MultiIndex::zonal(1), x0)),
        ];
        states.extend(xj_indices().into_iter().map(|k| SphereState::from_f0(unit(k, xj))));
        states.push(SphereState::from_f1(unit(MultiIndex::zonal(0), one)));
        states.push(SphereState::from_f1(unit(MultiIndex::zonal(1), x0)));
        TangentBasis { states }
    }

    pub fn states(&self) -> &[SphereState] {
        &self.states
    }

    /// Row-major `9 x 9` energy Gram matrix.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.states.len();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = h_inner(&self.states[i], &self.states[j]);
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    }
}

/// Decomposition `x = c f* + tangent + perp` with `perp` energy-orthogonal to
/// the tangent space.
#[derive(Clone, Debug, PartialEq)]
pub struct OrthDecomposition {
    pub c: f64,
    pub tangent: SphereState,
    pub perp: SphereState,
}

/// Energy-orthogonal projection onto the tangent space and its complement.
pub fn project_orth(x: &SphereState) -> Result<OrthDecomposition> {
    let basis = TangentBasis::new(x.lmax());
    let rhs: Vec<f64> = basis.states().iter().map(|b| h_inner(b, x)).collect();
    let coeffs = linalg::cholesky_solve(&basis.gram(), TangentBasis::DIM, &rhs)?;
    let lmax = x.lmax().max(1);
    let mut tangent = SphereState::zero(lmax);
    for (a, b) in coeffs.iter().zip(basis.states()).skip(1) {
        tangent = tangent.axpy(*a, b);
    }
    // basis[0] is f* itself
    let perp = x.sub(&basis.states()[0].scale(coeffs[0])).sub(&tangent);
    Ok(OrthDecomposition { c: coeffs[0], tangent, perp })
}

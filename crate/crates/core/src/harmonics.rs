//! Index lattice of the harmonic basis on `S^5`, coefficient fields, and the
//! multiplication-by-`X_0` operator.
//!
//! A basis function `Y_{l,m}` is indexed by its degree `l` and a 4-tuple
//! `m = (m1, m2, m3, m4)` with `l >= m1 >= m2 >= m3 >= |m4|`. Every coupling in
//! this crate depends on `m` only through `m1`, and never mixes different `m`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::math;
use crate::specfun::{self, QuadratureRule};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    pub ell: u32,
    pub m: [i32; 4],
}

impl MultiIndex {
    pub fn new(ell: u32, m: [i32; 4]) -> Result<Self> {
        let idx = MultiIndex { ell, m };
        if idx.is_valid() {
            Ok(idx)
        } else {
            Err(Error::InvalidArgument(format!(
                "{idx} violates l >= m1 >= m2 >= m3 >= |m4|"
            )))
        }
    }

    /// The zonal index `(l, 0, 0, 0, 0)`.
    pub const fn zonal(ell: u32) -> Self {
        MultiIndex { ell, m: [0; 4] }
    }

    pub fn is_valid(&self) -> bool {
        let [m1, m2, m3, m4] = self.m;
        i64::from(self.ell) >= i64::from(m1) && m1 >= m2 && m2 >= m3 && m3 >= m4.abs()
    }

    pub fn m1(&self) -> u32 {
        self.m[0] as u32
    }

    pub fn is_zonal(&self) -> bool {
        self.m == [0; 4]
    }

    /// Same `m` at another degree, if that degree admits it.
    pub fn at_degree(&self, ell: u32) -> Option<Self> {
        (ell >= self.m1()).then_some(MultiIndex { ell, m: self.m })
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.m;
        write!(f, "({}; {a},{b},{c},{d})", self.ell)
    }
}

/// The lattice `N(l)` in lexicographic order.
pub fn index_set(ell: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for m1 in 0..=ell as i32 {
        for m2 in 0..=m1 {
            for m3 in 0..=m2 {
                for m4 in -m3..=m3 {
                    out.push(MultiIndex { ell, m: [m1, m2, m3, m4] });
                }
            }
        }
    }
    out
}

/// Dimension of the degree-`l` harmonics on `S^5`, `(l+1)(l+2)^2(l+3)/12`.
pub fn harmonic_dimension(ell: u32) -> u64 {
    let l = u64::from(ell);
    (l + 1) * (l + 2) * (l + 2) * (l + 3) / 12
}

/// Coupling coefficient `C5(l, m1)`: the matrix element of `X_0` between
/// `Y_{l,m}` and `Y_{l+1,m}`. Zero outside `0 <= m1 <= l`.
pub fn c5(ell: i64, m1: i64) -> f64 {
    if m1 < 0 || m1 > ell {
        return 0.0;
    }
    let (l, m) = (ell as f64, m1 as f64);
    0.5 * math::sqrt((l - m + 1.0) * (l + m + 4.0) / ((l + 2.0) * (l + 3.0)))
}

/// A finitely supported coefficient map `(l, m) -> value` truncated at `lmax`.
///
/// Absent keys read as zero. Explicitly stored zeros are kept, so the support
/// (key set) behaves predictably under `add` and `scale`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoeffField {
    lmax: u32,
    entries: BTreeMap<MultiIndex, f64>,
}

impl CoeffField {
    pub fn new(lmax: u32) -> Self {
        CoeffField { lmax, entries: BTreeMap::new() }
    }

    pub fn unit(index: MultiIndex, lmax: u32) -> Result<Self> {
        let mut f = CoeffField::new(lmax);
        f.set(index, 1.0)?;
        Ok(f)
    }

    pub fn from_entries(lmax: u32, entries: impl IntoIterator<Item = (MultiIndex, f64)>) -> Result<Self> {
        let mut f = CoeffField::new(lmax);
        for (k, v) in entries {
            f.set(k, v)?;
        }
        Ok(f)
    }

    pub fn lmax(&self) -> u32 {
        self.lmax
    }

    /// Raises the truncation degree; lowering is a no-op.
    pub fn with_lmax(mut self, lmax: u32) -> Self {
        self.lmax = self.lmax.max(lmax);
        self
    }

    pub fn get(&self, index: &MultiIndex) -> f64 {
        self.entries.get(index).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, index: MultiIndex, value: f64) -> Result<()> {
        if !index.is_valid() {
            return Err(Error::InvalidArgument(format!("invalid multi-index {index}")));
        }
        if index.ell > self.lmax {
            return Err(Error::InvalidArgument(format!(
                "index {index} exceeds truncation degree {}",
                self.lmax
            )));
        }
        self.entries.insert(index, value);
        Ok(())
    }

    pub fn remove(&mut self, index: &MultiIndex) -> Option<f64> {
        self.entries.remove(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.entries.keys()
    }

    pub fn is_zonal(&self) -> bool {
        self.entries.keys().all(MultiIndex::is_zonal)
    }

    pub fn add(&self, other: &CoeffField) -> CoeffField {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &CoeffField) -> CoeffField {
        self.axpy(-1.0, other)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &CoeffField) -> CoeffField {
        let mut out = self.clone();
        out.lmax = self.lmax.max(other.lmax);
        for (k, v) in &other.entries {
            *out.entries.entry(*k).or_insert(0.0) += a * v;
        }
        out
    }

    pub fn scale(&self, c: f64) -> CoeffField {
        CoeffField {
            lmax: self.lmax,
            entries: self.entries.iter().map(|(k, v)| (*k, c * v)).collect(),
        }
    }

    /// Plain `l^2` pairing of coefficients.
    pub fn dot(&self, other: &CoeffField) -> f64 {
        self.entries.iter().map(|(k, v)| v * other.get(k)).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |a, v| a.max(math::abs(*v)))
    }

    /// Entries grouped by `m`, each group keyed by degree.
    pub fn by_m(&self) -> BTreeMap<[i32; 4], BTreeMap<u32, f64>> {
        let mut out: BTreeMap<[i32; 4], BTreeMap<u32, f64>> = BTreeMap::new();
        for (k, v) in &self.entries {
            out.entry(k.m).or_default().insert(k.ell, *v);
        }
        out
    }
}

/// Multiplication by `X_0` in coefficient space:
/// `(X_0 f)(l, m) = C5(l-1, m1) f(l-1, m) + C5(l, m1) f(l+1, m)`.
///
/// The output truncation grows by one degree, so no boundary term is lost and
/// the operator is exactly symmetric for the `l^2` pairing.
pub fn mult_x0(f: &CoeffField) -> CoeffField {
    let mut out = CoeffField::new(f.lmax + 1);
    for (k, &v) in &f.entries {
        let m1 = i64::from(k.m1());
        let ell = i64::from(k.ell);
        let up = MultiIndex { ell: k.ell + 1, m: k.m };
        *out.entries.entry(up).or_insert(0.0) += c5(ell, m1) * v;
        if let Some(down) = k.ell.checked_sub(1).and_then(|l| k.at_degree(l)) {
            *out.entries.entry(down).or_insert(0.0) += c5(ell - 1, m1) * v;
        }
    }
    out
}

/// Result of comparing quadrature values of `int t P_l^m P_l'^m (1-t^2)^{3/2}`
/// against `C5(min(l, l'), m) [|l - l'| = 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingAudit {
    pub lmax: u32,
    pub mmax: u32,
    pub pairs: usize,
    pub max_deviation: f64,
    /// `(l, l', m1)` where the deviation is largest.
    pub worst: (u32, u32, u32),
    pub tolerance: f64,
    pub passed: bool,
}

pub const COUPLING_TOLERANCE: f64 = 1e-9;

/// Integral `int t P_l^m(t) P_l'^m(t) (1 - t^2)^{3/2} dt` under `rule`.
pub fn coupling_integral(ell: u32, ell2: u32, m1: u32, rule: &QuadratureRule) -> f64 {
    rule.integrate(|t| {
        t * specfun::assoc_legendre(ell as usize, m1 as usize, t)
            * specfun::assoc_legendre(ell2 as usize, m1 as usize, t)
    })
}

pub fn x0_coupling_audit(lmax: u32, mmax: u32) -> Result<CouplingAudit> {
    if lmax > 30 || mmax > 30 {
        return Err(Error::InvalidArgument(format!(
            "coupling audit supports lmax, mmax <= 30 (got {lmax}, {mmax})"
        )));
    }
    let rule = specfun::jacobi_rule(specfun::default_order(lmax as usize))?;
    let mut max_dev = 0.0;
    let mut worst = (0, 0, 0);
    let mut pairs = 0;
    for m1 in 0..=mmax.min(lmax) {
        // columns[i][k] = P_{m1+k}^{m1}(t_i)
        let columns: Vec<Vec<f64>> = rule
            .nodes()
            .iter()
            .map(|&t| specfun::assoc_legendre_column(m1 as usize, lmax as usize, t))
            .collect();
        let n = (lmax - m1 + 1) as usize;
        for a in 0..n {
            for b in a..n {
                let integral: f64 = rule
                    .iter()
                    .zip(&columns)
                    .map(|((t, w), col)| w * t * col[a] * col[b])
                    .sum();
                let (l, l2) = (m1 + a as u32, m1 + b as u32);
                let expected = if l2 == l + 1 { c5(i64::from(l), i64::from(m1)) } else { 0.0 };
                let dev = math::abs(integral - expected);
                pairs += 1;
                if dev > max_dev {
                    max_dev = dev;
                    worst = (l, l2, m1);
                }
            }
        }
    }
    Ok(CouplingAudit {
        lmax,
        mmax,
        pairs,
        max_deviation: max_dev,
        worst,
        tolerance: COUPLING_TOLERANCE,
        passed: max_dev <= COUPLING_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::vec;
    use std::vec::Vec;

    fn brute_force_count(ell: i32) -> usize {
        let mut n = 0;
        for m1 in -ell - 1..=ell + 1 {
            for m2 in -ell - 1..=ell + 1 {
                for m3 in -ell - 1..=ell + 1 {
                    for m4 in -ell - 1..=ell + 1 {
                        if ell >= m1 && m1 >= m2 && m2 >= m3 && m3 >= m4.abs() {
                            n += 1;
                        }
                    }
                }
            }
        }
        n
    }

    fn binom(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn index_set_examples() {
        assert_eq!(index_set(0), vec![MultiIndex::zonal(0)]);
        assert_eq!(index_set(1).len(), 6);
        for ell in 0..=20u32 {
            let set = index_set(ell);
            assert_eq!(set.len(), brute_force_count(ell as i32), "l={ell}");
            assert_eq!(set.len() as u64, harmonic_dimension(ell));
            let l = u64::from(ell);
            assert_eq!(set.len() as u64, binom(l + 5, 5) - binom(l + 3, 5));
            assert!(set.windows(2).all(|w| w[0] < w[1]));
            assert!(set.iter().all(MultiIndex::is_valid));
        }
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(2, [3, 0, 0, 0]).is_err());
        assert!(MultiIndex::new(3, [2, 2, 1, -1]).is_ok());
        assert!(MultiIndex::new(3, [2, 1, 1, -2]).is_err());
        assert_eq!(MultiIndex::zonal(3).at_degree(1), Some(MultiIndex::zonal(1)));
        let idx = MultiIndex::new(3, [2, 0, 0, 0]).unwrap();
        assert_eq!(idx.at_degree(1), None);
    }

    #[test]
    fn c5_examples() {
        assert!((c5(0, 0) - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        assert!((c5(1, 1) - 0.5 * 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(c5(2, 5), 0.0);
        assert_eq!(c5(2, -1), 0.0);
        assert!((c5(3, 2) - 0.5 * (2.0 * 9.0 / 30.0f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mult_x0_examples() {
        let e0 = CoeffField::unit(MultiIndex::zonal(0), 3).unwrap();
        let y = mult_x0(&e0);
        assert_eq!(y.lmax(), 4);
        assert_eq!(y.len(), 1);
        assert!((y.get(&MultiIndex::zonal(1)) - (1.0f64 / 6.0).sqrt()).abs() < 1e-15);
        // mean of X_0^2 over S^5
        assert!((y.norm_sq() - 1.0 / 6.0).abs() < 1e-15);
        assert!(mult_x0(&CoeffField::new(5)).is_empty());
    }

    #[test]
    fn mult_x0_respects_m_blocks() {
        let top = MultiIndex::new(3, [3, 1, 0, 0]).unwrap();
        let y = mult_x0(&CoeffField::unit(top, 3).unwrap());
        // l = 2 cannot carry m1 = 3
        assert_eq!(y.support().copied().collect::<Vec<_>>(), vec![MultiIndex::new(4, [3, 1, 0, 0]).unwrap()]);
    }

    #[test]
    fn mult_x0_norm_at_most_one() {
        // power iteration on X_0^2 per m1 block at lmax = 60
        for m1 in [0i32, 1, 5, 30] {
            let idx = |l: u32| MultiIndex { ell: l, m: [m1, 0, 0, 0] };
            let mut f = CoeffField::new(60);
            for l in m1 as u32..=60 {
                f.set(idx(l), 1.0 + 0.1 * f64::from(l)).unwrap();
            }
            let mut rate = 0.0;
            for _ in 0..200 {
                let g = mult_x0(&mult_x0(&f));
                // project back onto the truncation
                let g = CoeffField::from_entries(60, g.iter().filter(|(k, _)| k.ell <= 60).map(|(k, v)| (*k, *v))).unwrap();
                rate = g.norm_sq().sqrt() / f.norm_sq().sqrt();
                f = g.scale(1.0 / g.norm_sq().sqrt());
            }
            assert!(rate <= 1.0 + 1e-12, "m1={m1}: {rate}");
            if m1 == 0 {
                assert!(rate > 0.9);
            }
        }
    }

    #[test]
    fn coupling_audit_examples() {
        let rule = specfun::jacobi_rule(40).unwrap();
        let v = coupling_integral(3, 4, 2, &rule);
        assert!((v - 0.387298).abs() < 1e-6);
        assert!((v - c5(3, 2)).abs() < 1e-12);
        assert!(coupling_integral(3, 5, 2, &rule).abs() < 1e-12);
        assert!(coupling_integral(2, 2, 0, &rule).abs() < 1e-12);

        let audit = x0_coupling_audit(12, 5).unwrap();
        assert!(audit.passed, "{audit:?}");
        assert!(x0_coupling_audit(31, 0).is_err());
    }

    fn field_strategy() -> impl Strategy<Value = CoeffField> {
        prop::collection::vec((0u32..8, 0i32..4, -1.0f64..1.0), 0..20).prop_map(|raw| {
            let mut f = CoeffField::new(8);
            for (ell, m1, v) in raw {
                if m1 as u32 <= ell {
                    f.set(MultiIndex { ell, m: [m1, 0, 0, 0] }, v).unwrap();
                }
            }
            f
        })
    }

    proptest! {
        #[test]
        fn mult_x0_is_symmetric(f in field_strategy(), g in field_strategy()) {
            let lhs = mult_x0(&f).dot(&g);
            let rhs = f.dot(&mult_x0(&g));
            prop_assert!((lhs - rhs).abs() <= 1e-14 * (1.0 + lhs.abs()));
        }

        #[test]
        fn mult_x0_support_stays_in_input_m(f in field_strategy()) {
            let ms: Vec<[i32; 4]> = f.support().map(|k| k.m).collect();
            for k in mult_x0(&f).support() {
                prop_assert!(ms.contains(&k.m));
                prop_assert!(k.is_valid());
            }
        }

        #[test]
        fn add_and_scale_keep_support(f in field_strategy(), g in field_strategy(), c in -2.0f64..2.0) {
            let s = f.add(&g);
            let mut keys: Vec<_> = f.support().chain(g.support()).copied().collect();
            keys.sort();
            keys.dedup();
            prop_assert_eq!(s.support().copied().collect::<Vec<_>>(), keys);
            let scaled = f.scale(c);
            prop_assert_eq!(scaled.support().collect::<Vec<_>>(), f.support().collect::<Vec<_>>());
        }
    }
}

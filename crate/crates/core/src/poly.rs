//! Univariate polynomials and rational functions with exact rational
//! coefficients, enough to carry the symbolic tail argument of a dominance
//! certificate.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients in ascending degree; never has trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<BigRational>,
}

impl Poly {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Poly::new(vec![c])
    }

    /// The linear polynomial `x + c`.
    pub fn linear(c: i64) -> Self {
        Poly::from_ints(&[c, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let z = BigRational::zero();
        Poly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + o.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::from_ints(&[1]), |acc, _| acc.mul(self))
    }

    /// `p(x + k)`.
    pub fn shift(&self, k: i64) -> Poly {
        let lin = Poly::linear(k);
        let mut out = Poly::zero();
        for c in self.coeffs.iter().rev() {
            out = out.mul(&lin).add(&Poly::constant(c.clone()));
        }
        out
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Positive rational multiple with coprime integer coefficients and the
    /// same sign pattern.
    pub fn primitive(&self) -> Vec<BigInt> {
        let lcm = self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &lcm).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|c| c / &g).collect()
    }

    /// Every coefficient nonnegative and the leading one positive, so `p > 0`
    /// on `x > 0` and `p >= 0` at `x = 0`.
    pub fn all_coeffs_nonnegative(&self) -> bool {
        self.leading().is_some_and(Signed::is_positive) && self.coeffs.iter().all(|c| !c.is_negative())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match i {
                0 => write!(f, "{a}")?,
                _ if a.is_one() => {}
                _ => write!(f, "{a}*")?,
            }
            match i {
                0 => {}
                1 => f.write_str("l")?,
                _ => write!(f, "l^{i}")?,
            }
        }
        Ok(())
    }
}

/// Decimal strings of the coefficients in ascending degree.
pub fn coeff_strings(c: &[BigInt]) -> Vec<String> {
    c.iter().map(ToString::to_string).collect()
}

/// `num / den` with polynomial numerator and denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunc {
    pub num: Poly,
    pub den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        RatFunc { num, den }
    }

    pub fn poly(p: Poly) -> Self {
        RatFunc::new(p, Poly::from_ints(&[1]))
    }

    pub fn add(&self, o: &RatFunc) -> RatFunc {
        if self.den == o.den {
            return RatFunc::new(self.num.add(&o.num), self.den.clone());
        }
        RatFunc::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn sub(&self, o: &RatFunc) -> RatFunc {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn mul(&self, o: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn scale(&self, c: &BigRational) -> RatFunc {
        RatFunc::new(self.num.scale(c), self.den.clone())
    }

    pub fn shift(&self, k: i64) -> RatFunc {
        RatFunc::new(self.num.shift(k), self.den.shift(k))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.num.eval(x) / self.den.eval(x)
    }

    /// `self - other` cross-multiplied: the zero polynomial iff the two agree.
    pub fn identity_residual(&self, other: &RatFunc) -> Poly {
        self.num.mul(&other.den).sub(&other.num.mul(&self.den))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn arithmetic_and_display() {
        let p = Poly::linear(1).mul(&Poly::linear(3));
        assert_eq!(p, Poly::from_ints(&[3, 4, 1]));
        assert_eq!(p.to_string(), "l^2 + 4*l + 3");
        assert_eq!(Poly::from_ints(&[-1, 0, -2]).to_string(), "-2*l^2 - 1");
        assert_eq!(p.sub(&p), Poly::zero());
        assert_eq!(Poly::zero().to_string(), "0");
        assert_eq!(p.shift(-1), Poly::from_ints(&[0, 2, 1]));
        assert_eq!(p.eval(&r(1, 2)), r(21, 4));
        assert_eq!(Poly::linear(2).pow(2), Poly::from_ints(&[4, 4, 1]));
    }

    #[test]
    fn primitive_form() {
        let p = Poly::new(vec![r(1221, 340), r(268, 340), r(67, 340)]);
        assert_eq!(coeff_strings(&p.primitive()), ["1221", "268", "67"]);
        let q = Poly::new(vec![r(-1, 2), r(1, 3)]);
        assert_eq!(coeff_strings(&q.primitive()), ["-3", "2"]);
        assert!(p.all_coeffs_nonnegative());
        assert!(!q.all_coeffs_nonnegative());
    }

    #[test]
    fn rational_identity() {
        // 1/(l+1) - 1/(l+2) = 1/((l+1)(l+2))
        let a = RatFunc::new(Poly::from_ints(&[1]), Poly::linear(1));
        let b = RatFunc::new(Poly::from_ints(&[1]), Poly::linear(2));
        let c = RatFunc::new(Poly::from_ints(&[1]), Poly::linear(1).mul(&Poly::linear(2)));
        assert!(a.sub(&b).identity_residual(&c).is_zero());
        assert!(!a.identity_residual(&c).is_zero());
    }

    proptest! {
        #[test]
        fn shift_matches_eval(c in prop::collection::vec(-20i64..20, 0..6), k in -5i64..5, x in -10i64..10) {
            let p = Poly::from_ints(&c);
            let xr = r(x, 1);
            prop_assert_eq!(p.shift(k).eval(&xr), p.eval(&(&xr + r(k, 1))));
        }

        #[test]
        fn mul_matches_eval(a in prop::collection::vec(-20i64..20, 0..5), b in prop::collection::vec(-20i64..20, 0..5), x in -10i64..10) {
            let (p, q) = (Poly::from_ints(&a), Poly::from_ints(&b));
            let xr = r(x, 3);
            prop_assert_eq!(p.mul(&q).eval(&xr), p.eval(&xr) * q.eval(&xr));
        }
    }
}

//! Closed intervals with outward rounding.
//!
//! Every operation rounds its float result to nearest and then widens by one
//! ulp in each direction, which encloses the exact result of the operation on
//! the endpoint reals.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

use crate::math;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

fn down(x: f64) -> f64 {
    if x == 0.0 {
        -f64::from_bits(1)
    } else {
        x.next_down()
    }
}

fn up(x: f64) -> f64 {
    if x == 0.0 {
        f64::from_bits(1)
    } else {
        x.next_up()
    }
}

impl Interval {
    /// # Panics
    /// If `lo > hi` or either bound is NaN.
    pub fn new(lo: f64, hi: f64) -> Self {
        assert!(lo <= hi, "empty interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    /// A point known exactly as an `f64`.
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Tight enclosure of an exact rational.
    pub fn from_rational(q: &BigRational) -> Self {
        let mid = q.to_f64().unwrap_or(f64::NAN);
        assert!(mid.is_finite(), "rational {q} out of f64 range");
        let mut lo = mid;
        let mut hi = mid;
        while BigRational::from_f64(lo).is_some_and(|l| &l > q) {
            lo = down(lo);
        }
        while BigRational::from_f64(hi).is_some_and(|h| &h < q) {
            hi = up(hi);
        }
        Interval { lo, hi }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_positive(&self) -> bool {
        self.lo > 0.0
    }

    pub fn is_negative(&self) -> bool {
        self.hi < 0.0
    }

    /// Enclosure of the square root.
    ///
    /// # Panics
    /// If the interval has negative part.
    pub fn sqrt(self) -> Self {
        assert!(self.lo >= 0.0, "sqrt of [{}, {}]", self.lo, self.hi);
        Interval { lo: down(math::sqrt(self.lo)).max(0.0), hi: up(math::sqrt(self.hi)) }
    }

    pub fn abs(self) -> Self {
        if self.lo >= 0.0 {
            self
        } else if self.hi <= 0.0 {
            -self
        } else {
            Interval { lo: 0.0, hi: self.hi.max(-self.lo) }
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.lo > 0.0 || self.hi < 0.0, "reciprocal of interval containing zero");
        Interval { lo: down(1.0 / self.hi), hi: up(1.0 / self.lo) }
    }

    pub fn scale(self, c: f64) -> Self {
        self * Interval::point(c)
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, o: Interval) -> Interval {
        Interval { lo: down(self.lo + o.lo), hi: up(self.hi + o.hi) }
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, o: Interval) -> Interval {
        Interval { lo: down(self.lo - o.hi), hi: up(self.hi - o.lo) }
    }
}

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }
}

impl Mul for Interval {
    type Output = Interval;
    fn mul(self, o: Interval) -> Interval {
        let p = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = p.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Interval { lo: down(lo), hi: up(hi) }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

//! Closed real intervals with dyadic endpoints and outward rounding.
//!
//! Every operation returns an interval containing the exact result for all
//! inputs in the operand intervals. Results are rounded outward to the larger
//! working precision of the operands.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::dyadic::{Dyadic, Rounding};
use crate::error::CoreError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

impl Interval {
    /// Builds `[lo, hi]`. Panics if `lo > hi`.
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi, prec }
    }

    fn rounded(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        Interval { lo: lo.round(prec, Rounding::Down), hi: hi.round(prec, Rounding::Up), prec }
    }

    pub fn point(x: Dyadic, prec: u32) -> Self {
        Interval { lo: x.clone(), hi: x, prec }
    }

    pub fn zero(prec: u32) -> Self {
        Interval::point(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Interval::point(Dyadic::one(), prec)
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        Interval::point(Dyadic::from_int(n), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Interval::point(Dyadic::from_i64(n), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Interval {
            lo: Dyadic::from_rational(q, prec, Rounding::Down),
            hi: Dyadic::from_rational(q, prec, Rounding::Up),
            prec,
        }
    }

    /// `[mid - rad, mid + rad]`.
    pub fn ball(mid: &Dyadic, rad: &Dyadic, prec: u32) -> Self {
        let r = rad.abs();
        Interval::rounded(mid.sub(&r), mid.add(&r), prec)
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Interval::rounded(self.lo.clone(), self.hi.clone(), prec)
    }

    pub fn mid(&self) -> Dyadic {
        self.lo.add(&self.hi).mul_pow2(-1)
    }

    pub fn width(&self) -> Dyadic {
        self.hi.sub(&self.lo)
    }

    /// Largest absolute value in the interval.
    pub fn mag(&self) -> Dyadic {
        let a = self.lo.abs();
        let b = self.hi.abs();
        if a > b {
            a
        } else {
            b
        }
    }

    /// Smallest absolute value in the interval.
    pub fn mig(&self) -> Dyadic {
        if self.contains_zero() {
            Dyadic::zero()
        } else if self.lo.is_positive() {
            self.lo.clone()
        } else {
            self.hi.abs()
        }
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        &self.lo.to_rational() <= q && q <= &self.hi.to_rational()
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Integers contained in the interval, as `(ceil(lo), floor(hi))`.
    pub fn integer_range(&self) -> (BigInt, BigInt) {
        (self.lo.ceil(), self.hi.floor())
    }

    /// The unique integer in the interval, if exactly one exists.
    pub fn unique_integer(&self) -> Option<BigInt> {
        let (a, b) = self.integer_range();
        if a == b {
            Some(a)
        } else {
            None
        }
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certified `self < other`.
    pub fn lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    /// Certified `self > other`.
    pub fn gt(&self, other: &Interval) -> bool {
        other.lt(self)
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() },
            prec: self.prec.max(other.prec),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo > other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi < other.hi { self.hi.clone() } else { other.hi.clone() };
        if lo <= hi {
            Some(Interval { lo, hi, prec: self.prec.max(other.prec) })
        } else {
            None
        }
    }

    /// Widens by `rad` on both sides.
    pub fn inflate(&self, rad: &Dyadic) -> Interval {
        let r = rad.abs();
        Interval::rounded(self.lo.sub(&r), self.hi.add(&r), self.prec)
    }

    pub fn mul_pow2(&self, k: i64) -> Interval {
        Interval { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k), prec: self.prec }
    }

    pub fn scale_int(&self, n: &BigInt) -> Interval {
        let a = self.lo.mul_int(n);
        let b = self.hi.mul_int(n);
        if a <= b {
            Interval::rounded(a, b, self.prec)
        } else {
            Interval::rounded(b, a, self.prec)
        }
    }

    pub fn abs(&self) -> Interval {
        if self.contains_zero() {
            Interval { lo: Dyadic::zero(), hi: self.mag(), prec: self.prec }
        } else if self.lo.is_positive() {
            self.clone()
        } else {
            -self
        }
    }

    pub fn sqr(&self) -> Interval {
        let a = self.mig();
        let b = self.mag();
        Interval::rounded(a.mul(&a), b.mul(&b), self.prec)
    }

    pub fn pow(&self, n: u64) -> Interval {
        let mut result = Interval::one(self.prec);
        let mut base = self.clone();
        let mut e = n;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first { base.clone() } else { &result * &base };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        if n % 2 == 0 && n > 0 {
            let lo = if result.lo.is_negative() { Dyadic::zero() } else { result.lo.clone() };
            return Interval { lo, hi: result.hi, prec: result.prec };
        }
        result
    }

    pub fn recip(&self) -> Result<Interval, CoreError> {
        if self.contains_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let one = Dyadic::one();
        Ok(Interval {
            lo: one.div(&self.hi, self.prec, Rounding::Down),
            hi: one.div(&self.lo, self.prec, Rounding::Up),
            prec: self.prec,
        })
    }

    pub fn div(&self, other: &Interval) -> Result<Interval, CoreError> {
        if other.contains_zero() {
            return Err(CoreError::DivisionByZero);
        }
        let prec = self.prec.max(other.prec);
        let mut lo: Option<Dyadic> = None;
        let mut hi: Option<Dyadic> = None;
        for a in [&self.lo, &self.hi] {
            for b in [&other.lo, &other.hi] {
                let d = a.div(b, prec, Rounding::Down);
                let u = a.div(b, prec, Rounding::Up);
                if lo.as_ref().map_or(true, |l| &d < l) {
                    lo = Some(d);
                }
                if hi.as_ref().map_or(true, |h| &u > h) {
                    hi = Some(u);
                }
            }
        }
        Ok(Interval { lo: lo.unwrap(), hi: hi.unwrap(), prec })
    }

    /// Square root; the negative part of the interval is clipped.
    pub fn sqrt(&self) -> Result<Interval, CoreError> {
        if self.hi.is_negative() {
            return Err(CoreError::Invalid("square root of a negative interval".into()));
        }
        let lo = if self.lo.is_negative() { Dyadic::zero() } else { self.lo.clone() };
        Ok(Interval {
            lo: lo.sqrt(self.prec, Rounding::Down),
            hi: self.hi.sqrt(self.prec, Rounding::Up),
            prec: self.prec,
        })
    }

    /// Fractional-part shift: returns `self - k` for an integer `k` with the
    /// midpoint of the result in `[-1/2, 1/2)`, together with `k`.
    pub fn reduce_mod_one(&self) -> (Interval, BigInt) {
        let k = self.mid().add(&Dyadic::new(BigInt::one(), -1)).floor();
        let kd = Dyadic::from_int(&k);
        (
            Interval { lo: self.lo.sub(&kd), hi: self.hi.sub(&kd), prec: self.prec },
            k,
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Approximate `log2` of the width; `i64::MIN` for point intervals.
    pub fn width_log2(&self) -> i64 {
        let w = self.width();
        if w.is_zero() {
            i64::MIN
        } else {
            w.magnitude()
        }
    }

    pub fn min_with(&self, other: &Interval) -> Interval {
        Interval {
            lo: if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi < other.hi { self.hi.clone() } else { other.hi.clone() },
            prec: self.prec.max(other.prec),
        }
    }

    pub fn max_with(&self, other: &Interval) -> Interval {
        Interval {
            lo: if self.lo > other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() },
            prec: self.prec.max(other.prec),
        }
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval::rounded(self.lo.add(&rhs.lo), self.hi.add(&rhs.hi), self.prec.max(rhs.prec))
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval::rounded(self.lo.sub(&rhs.hi), self.hi.sub(&rhs.lo), self.prec.max(rhs.prec))
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let prec = self.prec.max(rhs.prec);
        if self.is_point() && rhs.is_point() {
            let p = self.lo.mul(&rhs.lo);
            return Interval::rounded(p.clone(), p, prec);
        }
        let c = [
            self.lo.mul(&rhs.lo),
            self.lo.mul(&rhs.hi),
            self.hi.mul(&rhs.lo),
            self.hi.mul(&rhs.hi),
        ];
        let mut lo = &c[0];
        let mut hi = &c[0];
        for x in &c[1..] {
            if x < lo {
                lo = x;
            }
            if x > hi {
                hi = x;
            }
        }
        Interval::rounded(lo.clone(), hi.clone(), prec)
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg(), prec: self.prec }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Interval> for Interval {
            type Output = Interval;
            fn $m(self, rhs: &Interval) -> Interval {
                (&self).$m(rhs)
            }
        }
        impl $tr<Interval> for &Interval {
            type Output = Interval;
            fn $m(self, rhs: Interval) -> Interval {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        -&self
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Sum of a slice of intervals at the given precision.
pub fn sum(items: &[Interval], prec: u32) -> Interval {
    items.iter().fold(Interval::zero(prec), |acc, x| &acc + x)
}

impl Interval {
    /// Half-width as a dyadic.
    pub fn radius(&self) -> Dyadic {
        self.width().mul_pow2(-1)
    }

    /// Returns `true` if the width is at most `2^-bits`.
    pub fn width_below_pow2(&self, bits: i64) -> bool {
        let w = self.width();
        w.is_zero() || w <= Dyadic::pow2(-bits)
    }

    pub fn is_zero_point(&self) -> bool {
        self.lo.is_zero() && self.hi.is_zero()
    }
}

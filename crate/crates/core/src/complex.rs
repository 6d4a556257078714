//! Rectangular complex enclosures built from real intervals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;

use crate::dyadic::Dyadic;
use crate::error::CoreError;
use crate::interval::Interval;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        ComplexInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        let p = re.prec();
        ComplexInterval { re, im: Interval::zero(p) }
    }

    pub fn zero(prec: u32) -> Self {
        ComplexInterval::real(Interval::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        ComplexInterval::real(Interval::one(prec))
    }

    pub fn from_int(n: &BigInt, prec: u32) -> Self {
        ComplexInterval::real(Interval::from_int(n, prec))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        ComplexInterval {
            re: Interval::point(Dyadic::from_f64(re), prec),
            im: Interval::point(Dyadic::from_f64(im), prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        ComplexInterval { re: self.re.with_prec(prec), im: self.im.with_prec(prec) }
    }

    pub fn conj(&self) -> Self {
        ComplexInterval { re: self.re.clone(), im: -&self.im }
    }

    pub fn scale(&self, x: &Interval) -> Self {
        ComplexInterval { re: &self.re * x, im: &self.im * x }
    }

    pub fn scale_int(&self, n: &BigInt) -> Self {
        ComplexInterval { re: self.re.scale_int(n), im: self.im.scale_int(n) }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        ComplexInterval { re: self.re.mul_pow2(k), im: self.im.mul_pow2(k) }
    }

    /// `|z|^2`.
    pub fn norm_sqr(&self) -> Interval {
        &self.re.sqr() + &self.im.sqr()
    }

    /// `|z|`.
    pub fn abs(&self) -> Interval {
        self.norm_sqr().sqrt().expect("norm is non-negative")
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.re.overlaps(&other.re) && self.im.overlaps(&other.im)
    }

    pub fn contains(&self, other: &Self) -> bool {
        self.re.contains_interval(&other.re) && self.im.contains_interval(&other.im)
    }

    pub fn hull(&self, other: &Self) -> Self {
        ComplexInterval { re: self.re.hull(&other.re), im: self.im.hull(&other.im) }
    }

    pub fn recip(&self) -> Result<Self, CoreError> {
        let n = self.norm_sqr();
        let inv = n.recip()?;
        Ok(ComplexInterval { re: &self.re * &inv, im: -(&self.im * &inv) })
    }

    pub fn div(&self, other: &Self) -> Result<Self, CoreError> {
        let n = other.norm_sqr();
        let num = self * &other.conj();
        Ok(ComplexInterval { re: num.re.div(&n)?, im: num.im.div(&n)? })
    }

    pub fn sqr(&self) -> Self {
        let re = &self.re.sqr() - &self.im.sqr();
        let im = (&self.re * &self.im).mul_pow2(1);
        ComplexInterval { re, im }
    }

    pub fn pow(&self, n: u64) -> Self {
        let mut result = ComplexInterval::one(self.prec());
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        result
    }

    /// Largest width of the two coordinate intervals, as `log2` bound.
    pub fn width_log2(&self) -> i64 {
        self.re.width_log2().max(self.im.width_log2())
    }

    pub fn width_below_pow2(&self, bits: i64) -> bool {
        self.re.width_below_pow2(bits) && self.im.width_below_pow2(bits)
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Add for &ComplexInterval {
    type Output = ComplexInterval;
    fn add(self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &ComplexInterval {
    type Output = ComplexInterval;
    fn sub(self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &ComplexInterval {
    type Output = ComplexInterval;
    fn mul(self, rhs: &ComplexInterval) -> ComplexInterval {
        let re = &(&self.re * &rhs.re) - &(&self.im * &rhs.im);
        let im = &(&self.re * &rhs.im) + &(&self.im * &rhs.re);
        ComplexInterval { re, im }
    }
}

impl Neg for &ComplexInterval {
    type Output = ComplexInterval;
    fn neg(self) -> ComplexInterval {
        ComplexInterval { re: -&self.re, im: -&self.im }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for ComplexInterval {
            type Output = ComplexInterval;
            fn $m(self, rhs: ComplexInterval) -> ComplexInterval {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ComplexInterval> for ComplexInterval {
            type Output = ComplexInterval;
            fn $m(self, rhs: &ComplexInterval) -> ComplexInterval {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for ComplexInterval {
    type Output = ComplexInterval;
    fn neg(self) -> ComplexInterval {
        -&self
    }
}

impl fmt::Display for ComplexInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.to_f64();
        if b < 0.0 {
            write!(f, "{a:.12} - {:.12}i", -b)
        } else {
            write!(f, "{a:.12} + {b:.12}i")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn c(a: i64, b: i64) -> ComplexInterval {
        ComplexInterval::new(Interval::from_i64(a, 64), Interval::from_i64(b, 64))
    }

    #[test]
    fn product_and_quotient() {
        let z = &c(1, 2) * &c(3, -1);
        assert_eq!(z, c(5, 5));
        let q = c(5, 5).div(&c(3, -1)).unwrap();
        assert!(q.re.contains_rational(&BigRational::from_integer(1.into())));
        assert!(q.im.contains_rational(&BigRational::from_integer(2.into())));
    }

    #[test]
    fn powers_of_i_cycle() {
        let i = c(0, 1);
        assert_eq!(i.pow(4), c(1, 0));
        assert_eq!(i.pow(7), c(0, -1));
    }
}

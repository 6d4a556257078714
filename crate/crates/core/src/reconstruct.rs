//! Recovering small-denominator rationals from certified enclosures.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::CoreError;
use crate::interval::Interval;

/// Continued-fraction convergents `p/q` of an exact rational, in order.
pub fn convergents_of(x: &BigRational) -> Vec<BigRational> {
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::new();
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let p2 = &a * &p0 + &p1;
        let q2 = &a * &q0 + &q1;
        out.push(BigRational::new(p2.clone(), q2.clone()));
        p1 = p0;
        q1 = q0;
        p0 = p2;
        q0 = q2;
        num = den;
        den = r;
    }
    out
}

/// The unique rational with denominator at most `bound` inside `x`, if any.
///
/// Requires `width(x) < 1 / (2 bound^2)`, which makes such a rational unique.
pub fn rational_reconstruct(x: &Interval, bound: &BigInt) -> Result<BigRational, CoreError> {
    if !bound.is_positive() {
        return Err(CoreError::Invalid("denominator bound must be positive".into()));
    }
    let width = x.width().to_rational();
    let limit = BigRational::new(BigInt::one(), BigInt::from(2) * bound * bound);
    if width >= limit {
        return Err(CoreError::WidthTooLarge);
    }
    let mid = x.mid().to_rational();
    for c in convergents_of(&mid) {
        if c.denom() > bound {
            break;
        }
        if x.contains_rational(&c) {
            return Ok(c);
        }
    }
    Err(CoreError::NoRational)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    #[test]
    fn recovers_one_half() {
        let x = Interval::new(Dyadic::from_f64(0.4999999), Dyadic::from_f64(0.5000001), 64);
        let r = rational_reconstruct(&x, &BigInt::from(10)).unwrap();
        assert_eq!(r, BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn recovers_one_third() {
        let x = Interval::new(Dyadic::from_f64(0.3333333328), Dyadic::from_f64(0.3333333338), 64);
        let r = rational_reconstruct(&x, &BigInt::from(100)).unwrap();
        assert_eq!(r, BigRational::new(1.into(), 3.into()));
    }

    #[test]
    fn wide_enclosure_is_rejected() {
        let x = Interval::new(Dyadic::from_f64(0.3), Dyadic::from_f64(0.4), 64);
        assert_eq!(rational_reconstruct(&x, &BigInt::from(10)), Err(CoreError::WidthTooLarge));
    }

    #[test]
    fn negative_values() {
        let q = BigRational::new((-22).into(), 7.into());
        let x = Interval::from_rational(&q, 80);
        assert_eq!(rational_reconstruct(&x, &BigInt::from(1000)).unwrap(), q);
        assert!(convergents_of(&q).last() == Some(&q));
    }
}

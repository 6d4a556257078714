//! Arbitrary-precision dyadic numbers `m * 2^e` with directed rounding.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for inexact operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rounding {
    /// Toward negative infinity.
    Down,
    /// Toward positive infinity.
    Up,
}

/// The exact value `mant * 2^exp`, kept with an odd mantissa (or zero).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn floor_shift(m: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return m.clone();
    }
    m.div_floor(&(BigInt::one() << shift))
}

fn ceil_shift(m: &BigInt, shift: u64) -> BigInt {
    -floor_shift(&-m, shift)
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: &BigInt) -> Self {
        Dyadic::new(n.clone(), 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic { mant: BigInt::one(), exp: k }
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite f64");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1i64 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        Dyadic::new(BigInt::from(m) * sign, e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        if self.mant.is_zero() {
            0
        } else if self.mant.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Bit length of the mantissa.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// Position of the most significant bit: `|x| < 2^magnitude()`.
    pub fn magnitude(&self) -> i64 {
        self.exp + self.bits() as i64
    }

    pub fn neg(&self) -> Self {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    /// Rounds to at most `prec` significant bits in direction `r`.
    pub fn round(&self, prec: u32, r: Rounding) -> Self {
        let b = self.bits();
        if b <= prec as u64 {
            return self.clone();
        }
        let shift = b - prec as u64;
        let m = match r {
            Rounding::Down => floor_shift(&self.mant, shift),
            Rounding::Up => ceil_shift(&self.mant, shift),
        };
        Dyadic::new(m, self.exp + shift as i64)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Dyadic::new(&self.mant * n, self.exp)
    }

    /// Quotient rounded to `prec` bits in direction `r`. Panics on division by zero.
    pub fn div(&self, other: &Self, prec: u32, r: Rounding) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let k = (prec as i64 + other.bits() as i64 - self.bits() as i64 + 2).max(0);
        let num = &self.mant << k as u64;
        let q = match r {
            Rounding::Down => num.div_floor(&other.mant),
            Rounding::Up => -((-num).div_floor(&other.mant)),
        };
        Dyadic::new(q, self.exp - other.exp - k).round(prec, r)
    }

    /// Square root rounded to `prec` bits. Panics on negative input.
    pub fn sqrt(&self, prec: u32, r: Rounding) -> Self {
        assert!(!self.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut k = (2 * prec as i64 + 4 - self.bits() as i64).max(0);
        if (self.exp - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let m = &self.mant << k as u64;
        let e = self.exp - k;
        let mut s = m.sqrt();
        if r == Rounding::Up && &s * &s != m {
            s += 1;
        }
        Dyadic::new(s, e / 2).round(prec, r)
    }

    pub fn from_rational(q: &BigRational, prec: u32, r: Rounding) -> Self {
        Dyadic::from_int(q.numer()).div(&Dyadic::from_int(q.denom()), prec, r)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << self.exp as u64)
        } else {
            BigRational::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            floor_shift(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn ceil(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            ceil_shift(&self.mant, (-self.exp) as u64)
        }
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 || self.is_zero()
    }

    /// Nearest `f64` (approximately; for reporting only).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let b = self.bits() as i64;
        let shift = (b - 62).max(0);
        let m = if shift > 0 { &self.mant >> shift as u64 } else { self.mant.clone() };
        let f = m.to_f64().unwrap_or(0.0);
        let e = self.exp + shift;
        let e = e.clamp(-2000, 2000) as i32;
        if e > 1000 {
            f * 2f64.powi(1000) * 2f64.powi(e - 1000)
        } else if e < -1000 {
            f * 2f64.powi(-1000) * 2f64.powi(e + 1000)
        } else {
            f * 2f64.powi(e)
        }
    }

    /// Stable textual form `mant*2^exp`, used in serialized certificates.
    pub fn to_exact_string(&self) -> String {
        format!("{}p{}", self.mant, self.exp)
    }

    pub fn parse_exact(s: &str) -> Option<Self> {
        let (m, e) = s.split_once('p')?;
        let mant = m.parse::<BigInt>().ok()?;
        let exp = e.parse::<i64>().ok()?;
        Some(Dyadic::new(mant, exp))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (ma, mb) = (self.magnitude(), other.magnitude());
        if ma != mb {
            return if sa > 0 { ma.cmp(&mb) } else { mb.cmp(&ma) };
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_brackets_value() {
        let x = Dyadic::new(BigInt::from(0b1011011), -3);
        let lo = x.round(3, Rounding::Down);
        let hi = x.round(3, Rounding::Up);
        assert!(lo <= x && x <= hi);
        assert_eq!(lo, Dyadic::from_i64(10));
        assert_eq!(hi, Dyadic::from_i64(12));
    }

    #[test]
    fn negative_rounding_is_directed() {
        let x = Dyadic::from_i64(-7);
        assert_eq!(x.round(2, Rounding::Down), Dyadic::from_i64(-8));
        assert_eq!(x.round(2, Rounding::Up), Dyadic::from_i64(-6));
    }

    #[test]
    fn division_brackets_one_third() {
        let one = Dyadic::one();
        let three = Dyadic::from_i64(3);
        let lo = one.div(&three, 64, Rounding::Down).to_rational();
        let hi = one.div(&three, 64, Rounding::Up).to_rational();
        let third = BigRational::new(1.into(), 3.into());
        assert!(lo < third && third < hi);
    }

    #[test]
    fn sqrt_two_brackets() {
        let two = Dyadic::from_i64(2);
        let lo = two.sqrt(80, Rounding::Down);
        let hi = two.sqrt(80, Rounding::Up);
        assert!(lo.mul(&lo) < two && two < hi.mul(&hi));
    }

    #[test]
    fn f64_round_trip() {
        for x in [1.5, -0.1, 3e-300, 1e300, 7.0] {
            assert_eq!(Dyadic::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn exact_string_round_trip() {
        let x = Dyadic::new(BigInt::from(-12345), -77);
        assert_eq!(Dyadic::parse_exact(&x.to_exact_string()), Some(x));
    }
}

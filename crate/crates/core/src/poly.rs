//! Dense univariate polynomials over the integers and the rationals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::complex::ComplexInterval;
use crate::error::CoreError;
use crate::interval::Interval;
use crate::matrix::IntegerMatrix;

/// Integer polynomial with ascending coefficients and no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        trim(&mut coeffs);
        IntPolynomial { coeffs }
    }

    /// Ascending coefficients.
    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPolynomial::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        IntPolynomial::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        IntPolynomial::new(vec![c])
    }

    /// `t^k`.
    pub fn monomial(k: usize) -> Self {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        IntPolynomial { coeffs: c }
    }

    /// `t - r`.
    pub fn linear_root(r: &BigInt) -> Self {
        IntPolynomial::new(vec![-r, BigInt::one()])
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree, with the zero polynomial treated as degree 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        IntPolynomial::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        IntPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        IntPolynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return IntPolynomial::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPolynomial::new(out)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut r = IntPolynomial::one();
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn derivative(&self) -> Self {
        IntPolynomial::new(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect(),
        )
    }

    /// `p(c t)`.
    pub fn scale_variable(&self, c: &BigInt) -> Self {
        let mut pw = BigInt::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            out.push(a * &pw);
            pw *= c;
        }
        IntPolynomial::new(out)
    }

    /// `p(-t)`.
    pub fn negate_variable(&self) -> Self {
        self.scale_variable(&BigInt::from(-1))
    }

    /// `t^deg p(1/t)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPolynomial::new(c)
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_interval(&self, x: &Interval) -> Interval {
        let mut acc = Interval::zero(x.prec());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &Interval::from_int(c, x.prec());
        }
        acc
    }

    pub fn eval_complex(&self, z: &ComplexInterval) -> ComplexInterval {
        let prec = z.prec();
        let mut acc = ComplexInterval::zero(prec);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + &ComplexInterval::from_int(c, prec);
        }
        acc
    }

    /// Division by a monic divisor, exact over the integers.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        assert!(divisor.is_monic(), "divisor must be monic");
        let dd = divisor.deg();
        if self.is_zero() || self.deg() < dd {
            return (IntPolynomial::zero(), self.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigInt::zero(); self.deg() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        (IntPolynomial::new(quot), IntPolynomial::new(rem))
    }

    /// Exact quotient when `divisor` divides `self` over the integers.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let (q, r) = RatPolynomial::from_int(self).div_rem(&RatPolynomial::from_int(divisor));
        if !r.is_zero() {
            return None;
        }
        q.to_integer()
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.exact_div(self).is_some()
    }

    /// Squarefree over the rationals: `gcd(p, p') = 1`.
    pub fn is_squarefree(&self) -> bool {
        let p = RatPolynomial::from_int(self);
        p.gcd(&p.derivative()).deg() == 0
    }

    /// Resultant via the Sylvester matrix and fraction-free elimination.
    pub fn resultant(&self, other: &Self) -> BigInt {
        let (m, n) = (self.deg(), other.deg());
        if self.is_zero() || other.is_zero() {
            return BigInt::zero();
        }
        if m == 0 && n == 0 {
            return BigInt::one();
        }
        let size = m + n;
        let mut s = IntegerMatrix::zero(size);
        for i in 0..n {
            for (k, c) in self.coeffs.iter().rev().enumerate() {
                s.set(i, i + k, c.clone());
            }
        }
        for i in 0..m {
            for (k, c) in other.coeffs.iter().rev().enumerate() {
                s.set(n + i, i + k, c.clone());
            }
        }
        s.det()
    }

    pub fn discriminant(&self) -> BigInt {
        let n = self.deg();
        let r = self.resultant(&self.derivative());
        let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 1 { -BigInt::one() } else { BigInt::one() };
        sign * r / self.leading()
    }

    /// The `k`-th cyclotomic polynomial.
    pub fn cyclotomic(k: u64) -> Self {
        assert!(k >= 1, "cyclotomic index must be positive");
        let mut p = IntPolynomial::monomial(k as usize).sub(&IntPolynomial::one());
        for j in 1..k {
            if k % j == 0 {
                p = p.div_rem_monic(&IntPolynomial::cyclotomic(j)).0;
            }
        }
        p
    }

    /// All integer roots of a polynomial with nonzero constant term, by divisor search.
    pub fn integer_roots(&self) -> Vec<BigInt> {
        let mut roots = Vec::new();
        if self.is_zero() {
            return roots;
        }
        let shift = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if shift > 0 {
            roots.push(BigInt::zero());
        }
        let c0 = self.coeff(shift).abs();
        if let Some(c0) = num_traits::ToPrimitive::to_u64(&c0) {
            if c0 <= 1 << 40 {
                let mut d = 1u64;
                while d * d <= c0 {
                    if c0 % d == 0 {
                        for q in [d, c0 / d] {
                            for s in [1i64, -1] {
                                let r = BigInt::from(q) * s;
                                if self.eval(&r).is_zero() && !roots.contains(&r) {
                                    roots.push(r);
                                }
                            }
                        }
                    }
                    d += 1;
                }
            }
        }
        roots.sort();
        roots
    }

    /// Cauchy bound: every complex root has modulus below this integer.
    pub fn root_bound(&self) -> BigInt {
        let lc = self.leading().abs();
        let m = self.coeffs[..self.coeffs.len().saturating_sub(1)]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        BigInt::one() + m.div_ceil(&lc)
    }
}

fn fmt_terms<T: fmt::Display>(f: &mut fmt::Formatter<'_>, terms: Vec<(usize, T, bool, bool)>) -> fmt::Result {
    // (power, |coeff|, negative, coeff_is_one)
    if terms.is_empty() {
        return write!(f, "0");
    }
    for (idx, (k, c, neg, unit)) in terms.into_iter().enumerate() {
        if idx == 0 {
            if neg {
                write!(f, "-")?;
            }
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        match (k, unit) {
            (0, _) => write!(f, "{c}")?,
            (1, true) => write!(f, "t")?,
            (1, false) => write!(f, "{c}*t")?,
            (_, true) => write!(f, "t^{k}")?,
            (_, false) => write!(f, "{c}*t^{k}")?,
        }
    }
    Ok(())
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.abs(), c.is_negative(), c.abs().is_one()))
            .collect();
        fmt_terms(f, terms)
    }
}

impl std::str::FromStr for IntPolynomial {
    type Err = CoreError;

    /// Parses ascending coefficient lists such as `[-1,1,0,1]` or sums like `t^3 + t - 1`.
    fn from_str(s: &str) -> Result<Self, CoreError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(inner) = compact.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let coeffs: Result<Vec<BigInt>, _> = inner.split(',').map(|x| x.parse::<BigInt>()).collect();
            return coeffs
                .map(IntPolynomial::new)
                .map_err(|_| CoreError::Invalid(format!("bad coefficient list {s:?}")));
        }
        let bad = || CoreError::Invalid(format!("cannot parse polynomial {s:?}"));
        let mut coeffs: Vec<BigInt> = Vec::new();
        let normalized = compact.replace('-', "+-");
        for term in normalized.split('+').filter(|t| !t.is_empty()) {
            let (neg, body) = match term.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, term),
            };
            let (c, k) = if let Some(pos) = body.find('t') {
                let cpart = body[..pos].trim_end_matches('*');
                let c = if cpart.is_empty() { BigInt::one() } else { cpart.parse::<BigInt>().map_err(|_| bad())? };
                let rest = &body[pos + 1..];
                let k = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                };
                (c, k)
            } else {
                (body.parse::<BigInt>().map_err(|_| bad())?, 0)
            };
            if coeffs.len() <= k {
                coeffs.resize(k + 1, BigInt::zero());
            }
            coeffs[k] += if neg { -c } else { c };
        }
        Ok(IntPolynomial::new(coeffs))
    }
}

/// Polynomial with rational coefficients, ascending, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatPolynomial {
    coeffs: Vec<BigRational>,
}

impl RatPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        trim(&mut coeffs);
        RatPolynomial { coeffs }
    }

    pub fn from_int(p: &IntPolynomial) -> Self {
        RatPolynomial { coeffs: p.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect() }
    }

    pub fn zero() -> Self {
        RatPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPolynomial { coeffs: vec![BigRational::one()] }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        RatPolynomial::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn neg(&self) -> Self {
        RatPolynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RatPolynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RatPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPolynomial::new(out)
    }

    pub fn derivative(&self) -> Self {
        RatPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lc = self.leading();
        RatPolynomial { coeffs: self.coeffs.iter().map(|c| c / &lc).collect() }
    }

    /// Euclidean division over the rationals. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let dd = divisor.deg();
        if self.is_zero() || self.deg() < dd {
            return (RatPolynomial::zero(), self.clone());
        }
        let lc = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![BigRational::zero(); self.deg() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lc;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= &c * dc;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (RatPolynomial::new(quot), RatPolynomial::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic greatest common divisor (zero if both are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Inverse of `self` modulo `m`, when they are coprime.
    pub fn inverse_mod(&self, m: &Self) -> Option<Self> {
        let (mut r0, mut r1) = (m.clone(), self.rem(m));
        let (mut s0, mut s1) = (RatPolynomial::zero(), RatPolynomial::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = s0.sub(&q.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.deg() != 0 || r0.is_zero() {
            return None;
        }
        let inv = r0.coeff(0).recip();
        Some(s0.scale(&inv).rem(m))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()))
    }

    /// Integer polynomial `D * self` where `D` clears all denominators.
    pub fn clear_denominators(&self) -> (IntPolynomial, BigInt) {
        let d = self.denominator_lcm();
        let coeffs = self.coeffs.iter().map(|c| (c * BigRational::from_integer(d.clone())).to_integer()).collect();
        (IntPolynomial::new(coeffs), d)
    }

    pub fn to_integer(&self) -> Option<IntPolynomial> {
        if self.coeffs.iter().all(|c| c.is_integer()) {
            Some(IntPolynomial::new(self.coeffs.iter().map(|c| c.to_integer()).collect()))
        } else {
            None
        }
    }

    /// Lagrange interpolation through distinct abscissae.
    pub fn interpolate(points: &[(BigRational, BigRational)]) -> Self {
        // Newton divided differences.
        let n = points.len();
        let xs: Vec<BigRational> = points.iter().map(|p| p.0.clone()).collect();
        let mut dd: Vec<BigRational> = points.iter().map(|p| p.1.clone()).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&xs[i] - &xs[i - level]);
            }
        }
        let mut result = RatPolynomial::zero();
        for i in (0..n).rev() {
            let lin = RatPolynomial::new(vec![-xs[i].clone(), BigRational::one()]);
            result = result.mul(&lin).add(&RatPolynomial::new(vec![dd[i].clone()]));
        }
        result
    }
}

impl fmt::Display for RatPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.abs(), c.is_negative(), c.abs().is_one()))
            .collect();
        fmt_terms(f, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: IntPolynomial = "t^3 + t - 1".parse().unwrap();
        assert_eq!(p, IntPolynomial::from_i64(&[-1, 1, 0, 1]));
        assert_eq!(p.to_string(), "t^3 + t - 1");
        let q: IntPolynomial = "[1,-1,0,1]".parse().unwrap();
        assert_eq!(q.to_string(), "t^3 - t + 1");
        assert_eq!("-2*t^2+3".parse::<IntPolynomial>().unwrap(), IntPolynomial::from_i64(&[3, 0, -2]));
    }

    #[test]
    fn cyclotomic_values() {
        assert_eq!(IntPolynomial::cyclotomic(1), IntPolynomial::from_i64(&[-1, 1]));
        assert_eq!(IntPolynomial::cyclotomic(6), IntPolynomial::from_i64(&[1, -1, 1]));
        assert_eq!(IntPolynomial::cyclotomic(12), IntPolynomial::from_i64(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn discriminants_of_cubics() {
        assert_eq!(IntPolynomial::from_i64(&[1, -1, 0, 1]).discriminant(), BigInt::from(-23));
        assert_eq!(IntPolynomial::from_i64(&[-1, 1, 0, 1]).discriminant(), BigInt::from(-31));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = RatPolynomial::from_int(&IntPolynomial::from_i64(&[4, -3, 0, 2]));
        let pts: Vec<_> = (0..4)
            .map(|i| {
                let x = BigRational::from_integer(BigInt::from(i * 2 - 3));
                (x.clone(), p.eval(&x))
            })
            .collect();
        assert_eq!(RatPolynomial::interpolate(&pts), p);
    }

    #[test]
    fn inverse_mod_is_inverse() {
        let m = RatPolynomial::from_int(&IntPolynomial::from_i64(&[-1, 1, 0, 1]));
        let a = RatPolynomial::from_int(&IntPolynomial::from_i64(&[2, 0, 3]));
        let inv = a.inverse_mod(&m).unwrap();
        assert_eq!(a.mul(&inv).rem(&m), RatPolynomial::one());
    }

    #[test]
    fn integer_roots_found() {
        let p = IntPolynomial::from_i64(&[-6, 11, -6, 1]);
        assert_eq!(p.integer_roots(), vec![BigInt::from(1), BigInt::from(2), BigInt::from(3)]);
    }
}

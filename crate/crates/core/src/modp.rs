//! Polynomials and matrices over a prime field `Z/p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::CoreError;
use crate::matrix::IntegerMatrix;
use crate::poly::IntPolynomial;
use crate::primes::{factorize, inv_mod, mul_mod};

/// Reduces an integer into `[0, p)`.
pub fn reduce(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits in u64")
}

/// Polynomial over `Z/p`, ascending coefficients, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPoly {
    p: u64,
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(p: u64, coeffs: Vec<u64>) -> Self {
        let mut c: Vec<u64> = coeffs.into_iter().map(|x| x % p).collect();
        while c.last() == Some(&0) {
            c.pop();
        }
        ModPoly { p, coeffs: c }
    }

    pub fn from_int(poly: &IntPolynomial, p: u64) -> Self {
        ModPoly::new(p, poly.coeffs().iter().map(|c| reduce(c, p)).collect())
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// `t`.
    pub fn x(p: u64) -> Self {
        ModPoly::new(p, vec![0, 1])
    }

    pub fn one(p: u64) -> Self {
        ModPoly::new(p, vec![1])
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let p = self.p;
        ModPoly::new(
            p,
            (0..n)
                .map(|i| {
                    let a = self.coeffs.get(i).copied().unwrap_or(0);
                    let b = other.coeffs.get(i).copied().unwrap_or(0);
                    (a + p - b) % p
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return ModPoly::new(self.p, Vec::new());
        }
        let p = self.p;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, p)) % p;
            }
        }
        ModPoly::new(p, out)
    }

    pub fn derivative(&self) -> Self {
        let p = self.p;
        ModPoly::new(
            p,
            self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect(),
        )
    }

    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lc) => {
                let inv = inv_mod(lc, self.p).expect("nonzero leading coefficient");
                ModPoly::new(self.p, self.coeffs.iter().map(|&c| mul_mod(c, inv, self.p)).collect())
            }
        }
    }

    /// Euclidean division. Panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let p = self.p;
        let dd = divisor.deg();
        if self.is_zero() || self.deg() < dd {
            return (ModPoly::new(p, Vec::new()), self.clone());
        }
        let inv = inv_mod(*divisor.coeffs.last().unwrap(), p).unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; self.deg() - dd + 1];
        for k in (0..quot.len()).rev() {
            let c = mul_mod(rem[k + dd], inv, p);
            if c == 0 {
                continue;
            }
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = (rem[k + j] + p - mul_mod(c, dc, p)) % p;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (ModPoly::new(p, quot), ModPoly::new(p, rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u64, m: &Self) -> Self {
        let mut result = ModPoly::one(self.p).rem(m);
        let mut base = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).rem(m);
            }
            base = base.mul(&base).rem(m);
            e >>= 1;
        }
        result
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = (mul_mod(acc, x, self.p) + c) % self.p;
        }
        acc
    }
}

/// Degrees of the irreducible factors of `poly` modulo `p`, sorted ascending.
///
/// Uses distinct-degree factorization; requires `poly` squarefree modulo `p`.
pub fn factor_pattern_mod_p(poly: &IntPolynomial, p: u64) -> Result<Vec<usize>, CoreError> {
    if reduce(&poly.leading(), p) == 0 {
        return Err(CoreError::LeadingCoefficientVanishes(p));
    }
    let f = ModPoly::from_int(poly, p).monic();
    if f.deg() == 0 {
        return Ok(Vec::new());
    }
    if f.gcd(&f.derivative()).deg() > 0 || f.derivative().is_zero() {
        return Err(CoreError::NotSquarefree(p));
    }
    let mut pattern = Vec::new();
    let mut rest = f;
    let x = ModPoly::x(p);
    let mut h = x.clone();
    let mut i = 0usize;
    while rest.deg() > 0 {
        i += 1;
        if 2 * i > rest.deg() {
            pattern.push(rest.deg());
            break;
        }
        h = h.pow_mod(p, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            for _ in 0..g.deg() / i {
                pattern.push(i);
            }
            rest = rest.div_rem(&g).0;
            h = h.rem(&rest);
        }
    }
    pattern.sort_unstable();
    Ok(pattern)
}

/// Square matrix over `Z/p`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModPMatrix {
    dim: usize,
    p: u64,
    entries: Vec<u64>,
}

impl ModPMatrix {
    pub fn from_int(m: &IntegerMatrix, p: u64) -> Self {
        ModPMatrix { dim: m.dim(), p, entries: m.entries().iter().map(|x| reduce(x, p)).collect() }
    }

    pub fn identity(dim: usize, p: u64) -> Self {
        let mut entries = vec![0u64; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1 % p;
        }
        ModPMatrix { dim, p, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.dim + j]
    }

    pub fn is_identity(&self) -> bool {
        *self == ModPMatrix::identity(self.dim, self.p)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.dim;
        let p = self.p;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    out[idx] = (out[idx] + mul_mod(a, other.entries[k * n + j], p)) % p;
                }
            }
        }
        ModPMatrix { dim: n, p, entries: out }
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        let n = self.dim;
        let p = self.p;
        (0..n)
            .map(|i| (0..n).fold(0u64, |acc, j| (acc + mul_mod(self.entries[i * n + j], v[j], p)) % p))
            .collect()
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = ModPMatrix::identity(self.dim, self.p);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }
}

/// Default iteration cap for multiplicative orders.
pub const DEFAULT_PERIOD_CAP: u64 = 10_000_000;

/// Least `m >= 1` with `A^m = I` modulo `p`.
///
/// Tries order-finding on the divisors of `p - 1` first and otherwise iterates
/// powers up to `cap`.
pub fn matrix_period_mod_p(a: &IntegerMatrix, p: u64, cap: u64) -> Result<u64, CoreError> {
    if reduce(&a.det(), p) == 0 {
        return Err(CoreError::SingularModP(p));
    }
    let m = ModPMatrix::from_int(a, p);
    if p > 2 && m.pow(p - 1).is_identity() {
        let mut order = p - 1;
        for (q, _) in factorize(p - 1) {
            while order % q == 0 && m.pow(order / q).is_identity() {
                order /= q;
            }
        }
        if order > cap {
            return Err(CoreError::PeriodCapExceeded(cap));
        }
        return Ok(order);
    }
    matrix_period_by_iteration(a, p, cap)
}

/// Multiplicative order by direct iteration; the reference implementation.
pub fn matrix_period_by_iteration(a: &IntegerMatrix, p: u64, cap: u64) -> Result<u64, CoreError> {
    if reduce(&a.det(), p) == 0 {
        return Err(CoreError::SingularModP(p));
    }
    let m = ModPMatrix::from_int(a, p);
    let mut cur = m.clone();
    for k in 1..=cap {
        if cur.is_identity() {
            return Ok(k);
        }
        cur = cur.mul(&m);
    }
    Err(CoreError::PeriodCapExceeded(cap))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_of_split_quadratic() {
        let p = IntPolynomial::from_i64(&[2, -3, 1]);
        assert_eq!(factor_pattern_mod_p(&p, 5).unwrap(), vec![1, 1]);
    }

    #[test]
    fn repeated_root_is_rejected() {
        let p = IntPolynomial::from_i64(&[1, -2, 1]);
        assert_eq!(factor_pattern_mod_p(&p, 7), Err(CoreError::NotSquarefree(7)));
    }

    #[test]
    fn period_of_rotation() {
        let r = IntegerMatrix::from_i64_rows(&[&[0, -1], &[1, 0]]);
        assert_eq!(matrix_period_mod_p(&r, 13, 100).unwrap(), 4);
        assert_eq!(matrix_period_mod_p(&r, 7, 100).unwrap(), 4);
    }
}

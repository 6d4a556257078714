//! Dense square matrices over the integers with exact arithmetic.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::CoreError;
use crate::poly::IntPolynomial;

/// Square integer matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn zero(dim: usize) -> Self {
        IntegerMatrix { dim, entries: vec![BigInt::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = IntegerMatrix::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::one();
        }
        m
    }

    pub fn scalar(dim: usize, c: i64) -> Self {
        let mut m = IntegerMatrix::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigInt::from(c);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>]) -> Result<Self, CoreError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(CoreError::DimensionMismatch("empty matrix".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(CoreError::DimensionMismatch(format!(
                    "row of length {} in a {dim}x{dim} matrix",
                    r.len()
                )));
            }
            entries.extend(r.iter().cloned());
        }
        Ok(IntegerMatrix { dim, entries })
    }

    /// Convenience constructor for small literal matrices; panics if not square.
    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<BigInt>> =
            rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        IntegerMatrix::from_rows(&rows).expect("square literal matrix")
    }

    /// Companion matrix of a monic polynomial, with the negated coefficients in the first row:
    /// first row `(-c_{d-1}, ..., -c_0)` and ones on the subdiagonal.
    pub fn companion(p: &IntPolynomial) -> Result<Self, CoreError> {
        let d = p.degree().ok_or_else(|| CoreError::Invalid("zero polynomial".into()))?;
        if d == 0 || !p.leading().is_one() {
            return Err(CoreError::Invalid("companion matrix needs a monic polynomial of positive degree".into()));
        }
        let mut m = IntegerMatrix::zero(d);
        for j in 0..d {
            m.set(0, j, -p.coeff(d - 1 - j));
        }
        for i in 1..d {
            m.set(i, i - 1, BigInt::one());
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn is_identity(&self) -> bool {
        *self == IntegerMatrix::identity(self.dim)
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_default()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut t = IntegerMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn neg(&self) -> Self {
        IntegerMatrix { dim: self.dim, entries: self.entries.iter().map(|x| -x).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        IntegerMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn add_scalar(&self, c: &BigInt) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.entries[i * self.dim + i] += c;
        }
        m
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = IntegerMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn mul_vec_i64(&self, v: &[i64]) -> Vec<BigInt> {
        let v: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.mul_vec(&v)
    }

    /// Exact `self^n` by binary powering.
    pub fn pow(&self, n: u64) -> Self {
        let mut result = IntegerMatrix::identity(self.dim);
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k * n + k].is_zero() {
                let Some(r) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    a.swap(k * n + j, r * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                    a[i * n + j] = v / &prev;
                }
            }
            prev = a[k * n + k].clone();
        }
        sign * prev
    }

    pub fn is_sl(&self) -> bool {
        self.det().is_one()
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs().is_one()
    }

    /// Exact inverse of a matrix with determinant ±1, via the adjugate.
    pub fn inverse_unimodular(&self) -> Result<Self, CoreError> {
        let det = self.det();
        if !det.abs().is_one() {
            return Err(CoreError::NotUnimodular);
        }
        let adj = self.adjugate();
        Ok(IntegerMatrix { dim: self.dim, entries: adj.entries.into_iter().map(|x| x * &det).collect() })
    }

    /// Classical adjugate via the coefficients of `adj(tI - A)` evaluated at `t = 0`.
    pub fn adjugate(&self) -> Self {
        let coeffs = self.adjugate_polynomial();
        // adj(-A) = constant coefficient; adj(A) = (-1)^{d-1} adj(-A).
        let c0 = coeffs[0].clone();
        if (self.dim - 1) % 2 == 1 {
            c0.neg()
        } else {
            c0
        }
    }

    /// Characteristic polynomial `det(tI - A)` by the division-free Berkowitz algorithm.
    pub fn char_poly(&self) -> IntPolynomial {
        let n = self.dim;
        // Coefficient vector in descending order, starting from the 1x1 leading block.
        let mut poly: Vec<BigInt> = vec![BigInt::one(), -self.get(0, 0)];
        for r in 1..n {
            // Partition the leading (r+1)x(r+1) block as [[M, c], [s, a]] with a = A[r][r].
            let a = self.get(r, r);
            let s: Vec<BigInt> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let c: Vec<BigInt> = (0..r).map(|i| self.get(i, r).clone()).collect();
            // Toeplitz column: 1, -a, -s c, -s M c, -s M^2 c, ...
            let mut col = Vec::with_capacity(r + 2);
            col.push(BigInt::one());
            col.push(-a);
            let mut v = c.clone();
            for _ in 0..r {
                let dot: BigInt = s.iter().zip(&v).map(|(x, y)| x * y).sum();
                col.push(-dot);
                let mut nv = vec![BigInt::zero(); r];
                for (i, nvi) in nv.iter_mut().enumerate() {
                    for (j, vj) in v.iter().enumerate() {
                        let m = self.get(i, j);
                        if !m.is_zero() && !vj.is_zero() {
                            *nvi += m * vj;
                        }
                    }
                }
                v = nv;
            }
            // New polynomial = Toeplitz(col) * poly, with r+2 output coefficients.
            let mut next = vec![BigInt::zero(); r + 2];
            for (i, out) in next.iter_mut().enumerate() {
                for (j, pj) in poly.iter().enumerate() {
                    if i >= j {
                        let k = i - j;
                        if k < col.len() {
                            *out += &col[k] * pj;
                        }
                    }
                }
            }
            poly = next;
        }
        poly.reverse();
        IntPolynomial::new(poly)
    }

    /// Integer matrices `B_0, ..., B_{d-1}` with `adj(tI - A) = sum_k B_k t^k`.
    pub fn adjugate_polynomial(&self) -> Vec<IntegerMatrix> {
        let n = self.dim;
        let cp = self.char_poly();
        // Descending recurrence: C_0 = I, C_k = A C_{k-1} + c_{n-k} I, adj = sum C_k t^{n-1-k}.
        let mut desc = Vec::with_capacity(n);
        let mut cur = IntegerMatrix::identity(n);
        desc.push(cur.clone());
        for k in 1..n {
            cur = self.mul(&cur).add_scalar(&cp.coeff(n - k));
            desc.push(cur.clone());
        }
        desc.reverse();
        desc
    }

    /// Integer polynomial `w^T adj(tI - A) v`.
    pub fn bilinear_adjugate(&self, w: &[BigInt], v: &[BigInt]) -> IntPolynomial {
        let coeffs: Vec<BigInt> = self
            .adjugate_polynomial()
            .iter()
            .map(|b| {
                let bv = b.mul_vec(v);
                w.iter().zip(&bv).map(|(x, y)| x * y).sum()
            })
            .collect();
        IntPolynomial::new(coeffs)
    }

    pub fn conjugate_by(&self, y: &IntegerMatrix) -> Result<Self, CoreError> {
        let yi = y.inverse_unimodular()?;
        Ok(y.mul(self).mul(&yi))
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i).clone()).sum()
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Parses `[[a,b],[c,d]]` (whitespace allowed) into a matrix.
impl std::str::FromStr for IntegerMatrix {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self, CoreError> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = compact
            .strip_prefix("[[")
            .and_then(|t| t.strip_suffix("]]"))
            .ok_or_else(|| CoreError::Invalid(format!("matrix literal must look like [[..],[..]]: {s}")))?;
        let rows: Result<Vec<Vec<BigInt>>, CoreError> = inner
            .split("],[")
            .map(|row| {
                row.split(',')
                    .map(|x| x.parse::<BigInt>().map_err(|_| CoreError::Invalid(format!("bad matrix entry {x:?}"))))
                    .collect()
            })
            .collect();
        IntegerMatrix::from_rows(&rows?)
    }
}

/// Determinant by cofactor expansion; exponential, used only as a test oracle.
pub fn det_by_minors(m: &IntegerMatrix) -> BigInt {
    fn rec(rows: &[Vec<BigInt>]) -> BigInt {
        let n = rows.len();
        if n == 1 {
            return rows[0][0].clone();
        }
        let mut total = BigInt::zero();
        for j in 0..n {
            if rows[0][j].is_zero() {
                continue;
            }
            let minor: Vec<Vec<BigInt>> = rows[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect())
                .collect();
            let term = &rows[0][j] * rec(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }
    rec(&m.rows())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_matches_minors() {
        let m = IntegerMatrix::from_i64_rows(&[&[2, -1, 0, 3], &[1, 0, 4, -2], &[0, 5, 1, 1], &[-3, 2, 2, 0]]);
        assert_eq!(m.det(), det_by_minors(&m));
    }

    #[test]
    fn det_with_zero_pivot() {
        let m = IntegerMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]);
        assert_eq!(m.det(), BigInt::from(-1));
    }

    #[test]
    fn parse_round_trip() {
        let m = IntegerMatrix::from_i64_rows(&[&[-3, -14, -12], &[4, 11, 6], &[-2, -4, -1]]);
        let parsed: IntegerMatrix = m.to_string().parse().unwrap();
        assert_eq!(parsed, m);
    }
}

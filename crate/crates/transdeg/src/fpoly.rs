//! Dense univariate polynomials over a prime field `F_q` with `q < 2^32` of the
//! form `c 2^k + 1`, with NTT multiplication, Newton division and a half-GCD.

use rand::Rng;
use transdeg_core::primes::{factorize, is_prime, pow_mod};

/// Products below this size use schoolbook multiplication.
const NAIVE_MUL: usize = 48;
/// Euclidean steps below this degree skip the half-GCD.
const NAIVE_GCD: usize = 128;

/// An NTT-friendly prime field with a primitive `2^k`-th root of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    pub q: u64,
    pub two_adicity: u32,
    root: u64,
    /// `floor(2^64 / q)` for Barrett reduction.
    barrett: u64,
}

impl PrimeField {
    /// Requires `q` prime, `q < 2^32` and `2^k | q - 1` with `k >= 1`.
    pub fn new(q: u64) -> Option<Self> {
        if q >= 1 << 32 || q < 3 || !is_prime(q) {
            return None;
        }
        let two_adicity = (q - 1).trailing_zeros();
        let factors = factorize(q - 1);
        let generator = (2..q).find(|&g| factors.iter().all(|&(p, _)| pow_mod(g, (q - 1) / p, q) != 1))?;
        let root = pow_mod(generator, (q - 1) >> two_adicity, q);
        Some(PrimeField { q, two_adicity, root, barrett: (u128::from(u64::MAX) / u128::from(q)) as u64 })
    }

    /// A random prime `c 2^k + 1` in `(2^31, 2^32)` with `k >= min_adicity`.
    pub fn random(rng: &mut impl Rng, min_adicity: u32) -> Self {
        loop {
            let lo = (1u64 << 31) >> min_adicity;
            let hi = (1u64 << 32) >> min_adicity;
            let c = rng.gen_range(lo + 1..hi);
            let q = (c << min_adicity) + 1;
            if let Some(f) = PrimeField::new(q) {
                return f;
            }
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        s - self.q * u64::from(s >= self.q)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        a + self.q * u64::from(a < b) - b
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let t = a * b;
        let quot = ((u128::from(t) * u128::from(self.barrett)) >> 64) as u64;
        let r = t - quot * self.q;
        r - self.q * u64::from(r >= self.q)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.q)
    }

    pub fn inv(&self, a: u64) -> u64 {
        assert!(a % self.q != 0, "inverse of zero");
        pow_mod(a, self.q - 2, self.q)
    }

    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.q as i64) as u64
    }
}

/// Montgomery arithmetic on `u32` residues, used inside transforms.
#[derive(Clone, Copy, Debug)]
struct Montgomery {
    q: u32,
    /// `q^{-1} mod 2^32`.
    q_inv: u32,
    /// `2^64 mod q`.
    r2: u32,
}

impl Montgomery {
    fn new(q: u64) -> Self {
        let q = q as u32;
        let mut inv: u32 = 1;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u32.wrapping_sub(q.wrapping_mul(inv)));
        }
        Montgomery { q, q_inv: inv, r2: ((1u128 << 64) % u128::from(q)) as u32 }
    }

    #[inline(always)]
    fn redc(&self, t: u64) -> u32 {
        let m = (t as u32).wrapping_mul(self.q_inv);
        let mq = (u64::from(m) * u64::from(self.q)) >> 32;
        let (r, borrow) = (t >> 32).overflowing_sub(mq);
        (if borrow { r.wrapping_add(u64::from(self.q)) } else { r }) as u32
    }

    #[inline(always)]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.redc(u64::from(a) * u64::from(b))
    }

    fn to_mont(&self, a: u64) -> u32 {
        self.mul(a as u32, self.r2)
    }

    fn from_mont(&self, a: u32) -> u64 {
        u64::from(self.redc(u64::from(a)))
    }

    #[inline(always)]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = u64::from(a) + u64::from(b);
        (if s >= u64::from(self.q) { s - u64::from(self.q) } else { s }) as u32
    }

    #[inline(always)]
    fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a.wrapping_add(self.q).wrapping_sub(b)
        }
    }
}

impl PrimeField {
    /// Twiddle factors for every level of a length-`n` transform, level `len`
    /// occupying `[len/2 - 1, len - 1)`, in Montgomery form.
    fn twiddles(&self, mont: &Montgomery, n: usize, invert: bool) -> Vec<u32> {
        let log_n = n.trailing_zeros();
        assert!(log_n <= self.two_adicity, "transform longer than the field supports");
        let mut out = Vec::with_capacity(n);
        let mut len = 2;
        while len <= n {
            let mut w = self.pow(self.root, 1u64 << (self.two_adicity - len.trailing_zeros()));
            if invert {
                w = self.inv(w);
            }
            let w = mont.to_mont(w);
            let mut cur = mont.to_mont(1);
            for _ in 0..len / 2 {
                out.push(cur);
                cur = mont.mul(cur, w);
            }
            len <<= 1;
        }
        out
    }

    fn ntt(mont: &Montgomery, a: &mut [u32], tw: &[u32]) {
        let n = a.len();
        let mut j = 0;
        for i in 1..n {
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
            if i < j {
                a.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let level = &tw[half - 1..len - 1];
            for chunk in a.chunks_exact_mut(len) {
                let (lo, hi) = chunk.split_at_mut(half);
                for ((x, y), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(level) {
                    let u = *x;
                    let v = mont.mul(*y, w);
                    *x = mont.add(u, v);
                    *y = mont.sub(u, v);
                }
            }
            len <<= 1;
        }
    }

    /// Cyclic convolution of length `size`, truncated to `out_len`.
    fn convolve(&self, a: &[u64], b: &[u64], out_len: usize) -> Vec<u64> {
        let size = out_len.next_power_of_two();
        let mont = Montgomery::new(self.q);
        let load = |x: &[u64]| {
            let mut v: Vec<u32> = x.iter().map(|&c| mont.to_mont(c)).collect();
            v.resize(size, 0);
            v
        };
        let forward = self.twiddles(&mont, size, false);
        let mut fa = load(a);
        Self::ntt(&mont, &mut fa, &forward);
        if std::ptr::eq(a, b) {
            for x in fa.iter_mut() {
                *x = mont.mul(*x, *x);
            }
        } else {
            let mut fb = load(b);
            Self::ntt(&mont, &mut fb, &forward);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = mont.mul(*x, *y);
            }
        }
        Self::ntt(&mont, &mut fa, &self.twiddles(&mont, size, true));
        let n_inv = mont.to_mont(self.inv(size as u64 % self.q));
        fa.truncate(out_len);
        fa.into_iter().map(|x| mont.from_mont(mont.mul(x, n_inv))).collect()
    }
}

/// Polynomial with coefficients in `[0, q)`, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldPoly {
    pub coeffs: Vec<u64>,
}

impl FieldPoly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FieldPoly { coeffs }
    }

    pub fn zero() -> Self {
        FieldPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: u64) -> Self {
        FieldPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg_or_neg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn eval(&self, f: &PrimeField, x: u64) -> u64 {
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, f: &PrimeField, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        FieldPoly::new((0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn sub(&self, f: &PrimeField, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        FieldPoly::new((0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect())
    }

    pub fn scale(&self, f: &PrimeField, c: u64) -> Self {
        FieldPoly::new(self.coeffs.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn monic(&self, f: &PrimeField) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(f, f.inv(self.leading()))
    }

    pub fn mul(&self, f: &PrimeField, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return FieldPoly::zero();
        }
        let (n, m) = (self.coeffs.len(), o.coeffs.len());
        if n.min(m) <= NAIVE_MUL {
            let mut out = vec![0u64; n + m - 1];
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (j, &b) in o.coeffs.iter().enumerate() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
            return FieldPoly::new(out);
        }
        FieldPoly::new(f.convolve(&self.coeffs, &o.coeffs, n + m - 1))
    }

    pub fn pow(&self, f: &PrimeField, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = FieldPoly::constant(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base);
            }
        }
        acc
    }

    /// Quotient by `x^k`, discarding the remainder.
    pub fn shift_down(&self, k: usize) -> Self {
        if k >= self.coeffs.len() {
            return FieldPoly::zero();
        }
        FieldPoly::new(self.coeffs[k..].to_vec())
    }

    fn truncate(&self, k: usize) -> Self {
        FieldPoly::new(self.coeffs[..k.min(self.coeffs.len())].to_vec())
    }

    fn reversed(&self, len: usize) -> Self {
        let mut c: Vec<u64> = (0..len).map(|i| self.coeff(i)).collect();
        c.reverse();
        FieldPoly::new(c)
    }

    /// Power series inverse modulo `x^k`, requiring a nonzero constant term.
    fn inverse_series(&self, f: &PrimeField, k: usize) -> Self {
        let mut g = FieldPoly::constant(f.inv(self.coeff(0)));
        let mut len = 1;
        while len < k {
            len = (2 * len).min(k);
            let h = self.truncate(len).mul(f, &g).truncate(len);
            let two_minus = FieldPoly::constant(2).sub(f, &h);
            g = g.mul(f, &two_minus).truncate(len);
        }
        g
    }

    pub fn div_rem(&self, f: &PrimeField, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let (n, m) = (self.deg_or_neg(), d.deg_or_neg());
        if n < m {
            return (FieldPoly::zero(), self.clone());
        }
        let qlen = (n - m + 1) as usize;
        if qlen <= 256 || (m as usize) <= NAIVE_MUL {
            let inv = f.inv(d.leading());
            let mut r = self.coeffs.clone();
            let mut q = vec![0u64; qlen];
            let m = m as usize;
            for i in (0..qlen).rev() {
                let c = f.mul(r[i + m], inv);
                q[i] = c;
                if c != 0 {
                    for (j, &dj) in d.coeffs.iter().enumerate() {
                        r[i + j] = f.sub(r[i + j], f.mul(c, dj));
                    }
                }
            }
            r.truncate(m);
            return (FieldPoly::new(q), FieldPoly::new(r));
        }
        let rev_a = self.reversed(n as usize + 1).truncate(qlen);
        let rev_d = d.reversed(m as usize + 1);
        let q_rev = rev_a.mul(f, &rev_d.inverse_series(f, qlen)).truncate(qlen);
        let q = q_rev.reversed(qlen);
        let r = self.sub(f, &q.mul(f, d));
        (q, r)
    }

    pub fn rem(&self, f: &PrimeField, d: &Self) -> Self {
        self.div_rem(f, d).1
    }

    pub fn exact_div(&self, f: &PrimeField, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(f, d);
        r.is_zero().then_some(q)
    }

    pub fn derivative(&self, f: &PrimeField) -> Self {
        FieldPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.mul(c, i as u64 % f.q)).collect())
    }
}

type Mat = [[FieldPoly; 2]; 2];

fn identity() -> Mat {
    [[FieldPoly::constant(1), FieldPoly::zero()], [FieldPoly::zero(), FieldPoly::constant(1)]]
}

fn mat_mul(f: &PrimeField, x: &Mat, y: &Mat) -> Mat {
    let e = |i: usize, j: usize| x[i][0].mul(f, &y[0][j]).add(f, &x[i][1].mul(f, &y[1][j]));
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn apply(f: &PrimeField, m: &Mat, a: &FieldPoly, b: &FieldPoly) -> (FieldPoly, FieldPoly) {
    (m[0][0].mul(f, a).add(f, &m[0][1].mul(f, b)), m[1][0].mul(f, a).add(f, &m[1][1].mul(f, b)))
}

/// Matrix `M` with `M (a, b) = (a', b')`, consecutive remainders of `a, b`
/// with `deg a' >= ceil(deg a / 2) > deg b'`. Requires `deg a > deg b`.
fn half_gcd(f: &PrimeField, a: &FieldPoly, b: &FieldPoly) -> Mat {
    let n = a.deg_or_neg();
    let m = ((n + 1) / 2) as usize;
    if b.deg_or_neg() < m as isize {
        return identity();
    }
    let r = half_gcd(f, &a.shift_down(m), &b.shift_down(m));
    let (a1, b1) = apply(f, &r, a, b);
    if b1.deg_or_neg() < m as isize {
        return r;
    }
    let (q, rem) = a1.div_rem(f, &b1);
    let step: Mat = [[FieldPoly::zero(), FieldPoly::constant(1)], [FieldPoly::constant(1), FieldPoly::zero().sub(f, &q)]];
    let r = mat_mul(f, &step, &r);
    let (a2, b2) = (b1, rem);
    if b2.deg_or_neg() < m as isize {
        return r;
    }
    let k = 2 * m - a2.deg_or_neg() as usize;
    let s = half_gcd(f, &a2.shift_down(k), &b2.shift_down(k));
    mat_mul(f, &s, &r)
}

/// Monic gcd by the half-GCD algorithm.
pub fn gcd(f: &PrimeField, a: &FieldPoly, b: &FieldPoly) -> FieldPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    if a.deg_or_neg() < b.deg_or_neg() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.deg_or_neg() < NAIVE_GCD as isize {
            let r = a.rem(f, &b);
            a = b;
            b = r;
            continue;
        }
        if a.deg_or_neg() == b.deg_or_neg() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
            continue;
        }
        let m = half_gcd(f, &a, &b);
        let (a1, b1) = apply(f, &m, &a, &b);
        a = a1;
        b = b1;
        if b.is_zero() {
            break;
        }
        let r = a.rem(f, &b);
        a = b;
        b = r;
    }
    a.monic(f)
}

/// Monic gcd by plain Euclid, for cross-checks.
pub fn gcd_euclid(f: &PrimeField, a: &FieldPoly, b: &FieldPoly) -> FieldPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_zero() {
        let r = a.rem(f, &b);
        a = b;
        b = r;
    }
    a.monic(f)
}

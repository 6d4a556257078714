//! Certified isolation of all complex roots of a squarefree integer polynomial.
//!
//! Approximations come from Durand-Kerner iteration. Certification uses the
//! Gershgorin discs of the Weierstrass matrix `diag(z) - W 1^T`, whose
//! eigenvalues are exactly the roots: when the discs are pairwise disjoint,
//! each one contains exactly one root.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::complex::ComplexInterval;
use crate::dyadic::Dyadic;
use crate::error::CoreError;
use crate::interval::Interval;
use crate::poly::IntPolynomial;

/// Pairwise disjoint root enclosures with a reality classification.
#[derive(Clone, Debug)]
pub struct RootEnclosures {
    pub roots: Vec<ComplexInterval>,
    /// `true` for roots certified real; every other root is certified non-real.
    pub real: Vec<bool>,
    pub prec: u32,
}

impl RootEnclosures {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn real_count(&self) -> usize {
        self.real.iter().filter(|&&r| r).count()
    }

    /// Index of the root whose enclosure is the complex conjugate of root `i`.
    pub fn conjugate_index(&self, i: usize) -> Option<usize> {
        if self.real[i] {
            return Some(i);
        }
        let c = self.roots[i].conj();
        (0..self.roots.len()).find(|&j| j != i && self.roots[j].overlaps(&c))
    }
}

fn to_c64(p: &IntPolynomial) -> Option<Vec<Complex64>> {
    p.coeffs().iter().map(|c| c.to_f64().filter(|x| x.is_finite()).map(|x| Complex64::new(x, 0.0))).collect()
}

fn horner64(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Floating-point Durand-Kerner starting values.
fn float_approximations(p: &IntPolynomial) -> Vec<Complex64> {
    let d = p.deg();
    let radius = p.root_bound().to_f64().unwrap_or(1e300).min(1e150);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..d).map(|k| seed.powu(k as u32 + 1) * (radius / 2.0).max(1.0)).collect();
    let Some(c) = to_c64(p) else {
        return z;
    };
    let lc = c[d];
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..d {
            let mut den = lc;
            for j in 0..d {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                z[i] += Complex64::new(1e-3, 1e-3);
                continue;
            }
            let w = horner64(&c, z[i]) / den;
            if w.is_finite() {
                z[i] -= w;
                delta = delta.max(w.norm() / z[i].norm().max(1.0));
            }
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

fn c_point(z: &ComplexInterval, prec: u32) -> ComplexInterval {
    ComplexInterval::new(
        Interval::point(z.re.mid().round(prec, crate::dyadic::Rounding::Down), prec),
        Interval::point(z.im.mid().round(prec, crate::dyadic::Rounding::Down), prec),
    )
}

/// Weierstrass corrections `W_i = p(z_i) / (lc * prod_{j != i} (z_i - z_j))`.
fn weierstrass(p: &IntPolynomial, z: &[ComplexInterval], prec: u32) -> Result<Vec<ComplexInterval>, CoreError> {
    let lc = ComplexInterval::from_int(&p.leading(), prec);
    let mut out = Vec::with_capacity(z.len());
    for i in 0..z.len() {
        let mut den = lc.clone();
        for j in 0..z.len() {
            if j != i {
                den = &den * &(&z[i] - &z[j]);
            }
        }
        out.push(p.eval_complex(&z[i]).div(&den)?);
    }
    Ok(out)
}

fn boxes_disjoint(a: &ComplexInterval, b: &ComplexInterval) -> bool {
    !a.overlaps(b)
}

/// Attempts certification at the current approximations.
fn certify(
    p: &IntPolynomial,
    z: &[ComplexInterval],
    prec: u32,
    target_log2: i64,
) -> Result<Option<RootEnclosures>, CoreError> {
    let d = z.len();
    let w = match weierstrass(p, z, prec) {
        Ok(w) => w,
        Err(_) => return Ok(None),
    };
    let mut boxes = Vec::with_capacity(d);
    for i in 0..d {
        let center = &z[i] - &w[i];
        let rad = w[i].abs().hi().mul_int(&BigInt::from(d as i64 - 1));
        let rad = if rad.is_zero() { Dyadic::zero() } else { rad };
        boxes.push(ComplexInterval::new(center.re.inflate(&rad), center.im.inflate(&rad)));
    }
    for i in 0..d {
        for j in i + 1..d {
            if !boxes_disjoint(&boxes[i], &boxes[j]) {
                return Ok(None);
            }
        }
    }
    let mut real = vec![false; d];
    for i in 0..d {
        if boxes[i].im.contains_zero() {
            let c = boxes[i].conj();
            if (0..d).any(|j| j != i && boxes[j].overlaps(&c)) {
                return Ok(None);
            }
            real[i] = true;
            boxes[i] = ComplexInterval::new(boxes[i].re.clone(), Interval::zero(prec));
        }
    }
    if boxes.iter().any(|b| !b.width_below_pow2(target_log2)) {
        return Ok(None);
    }
    Ok(Some(RootEnclosures { roots: boxes, real, prec }))
}

/// Isolates all roots of a squarefree polynomial with enclosure widths below `2^target_log2`.
///
/// Precision doubles from an initial guess until certification succeeds or `ceiling` is passed.
pub fn isolate_roots(p: &IntPolynomial, target_log2: i64, ceiling: u32) -> Result<RootEnclosures, CoreError> {
    let d = p.degree().ok_or_else(|| CoreError::Invalid("zero polynomial".into()))?;
    if d == 0 {
        return Ok(RootEnclosures { roots: Vec::new(), real: Vec::new(), prec: 64 });
    }
    if !p.is_squarefree() {
        return Err(CoreError::Invalid("root isolation needs a squarefree polynomial".into()));
    }
    let approx = float_approximations(p);
    let mut prec: u32 = 64.max((-target_log2).max(0) as u32 + 64);
    let mut z: Vec<ComplexInterval> =
        approx.iter().map(|c| ComplexInterval::from_f64(c.re, c.im, prec)).collect();
    loop {
        // Durand-Kerner polishing at the working precision.
        for _ in 0..(8 + prec / 16) {
            let w = match weierstrass(p, &z, prec) {
                Ok(w) => w,
                Err(_) => break,
            };
            let mut small = true;
            for i in 0..d {
                let next = c_point(&(&z[i] - &w[i]), prec);
                if !w[i].width_below_pow2(-(prec as i64) + 16) || w[i].abs().hi().magnitude() > -(prec as i64) + 24 {
                    small = false;
                }
                z[i] = next;
            }
            if small {
                break;
            }
        }
        if let Some(r) = certify(p, &z, prec, target_log2)? {
            return Ok(r);
        }
        if prec >= ceiling {
            return Err(CoreError::RootsNotSeparable(prec));
        }
        prec = (prec * 2).min(ceiling);
        z = z.iter().map(|c| c.with_prec(prec)).collect();
    }
}

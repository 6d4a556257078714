//! Degree functional, measure evolution and exact degree sequences of
//! `f = g o h_A`.
//!
//! The measure of a curve records its intersections with the toric poles.
//! A monomial map pushes it forward linearly, and `g` adds `deg C` copies of
//! the involution measure. Degrees are read off by integrating the support
//! function. Starting from a general line:
//!
//! ```text
//! mu(f^n L)   = A^n mu_P + sum_{j<n} deg(h f^j) A^{n-1-j} mu_V
//! deg(h f^n)  = Psi_P(A^{n+1}) + sum_{j<n} Psi_V(A^{n-j}) deg(h f^j)
//! ```

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use transdeg_core::IntegerMatrix;

use crate::error::{ModelError, Result};
use crate::toric::{support_function, LatticeMeasure, LatticeVector, SupportData};

/// `sum_{v in V} max_{u in U} <u, A v>`.
pub fn psi(a: &IntegerMatrix, u_set: &[LatticeVector], v_set: &[LatticeVector]) -> BigInt {
    v_set.iter().map(|v| support_function(&a.mul_vec_i64(v), u_set)).sum()
}

/// `A_* mu`: atoms move to `A v`, weights merge on collision.
pub fn pushforward(mu: &LatticeMeasure, a: &IntegerMatrix) -> LatticeMeasure {
    mu.map_vectors(|v| a.mul_vec(v))
}

/// `mu + deg_c * mu_V`, the measure of the image of a curve of degree `deg_c` under `g`.
pub fn involution_step(mu: &LatticeMeasure, deg_c: &BigInt, v_set: &[LatticeVector]) -> Result<LatticeMeasure> {
    if *deg_c < BigInt::one() {
        return Err(ModelError::Precondition("curve degree must be at least 1".into()));
    }
    let mut out = mu.clone();
    out.add_scaled(&LatticeMeasure::from_set(v_set), deg_c);
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSequence {
    pub n_max: usize,
    /// `deg f^n`.
    pub deg_f: Vec<BigInt>,
    /// `deg (h o f^n)`.
    pub deg_hf: Vec<BigInt>,
    /// `Psi_{U,V}(A^n)`.
    pub psi_av: Vec<BigInt>,
    /// `Psi_{U,P}(A^n) = deg h_A^n`.
    pub psi_ap: Vec<BigInt>,
}

/// Powers `A^0, .., A^m` built incrementally.
pub fn matrix_powers(a: &IntegerMatrix, m: usize) -> Vec<IntegerMatrix> {
    let mut out = Vec::with_capacity(m + 1);
    out.push(IntegerMatrix::identity(a.dim()));
    for k in 0..m {
        out.push(a.mul(&out[k]));
    }
    out
}

/// Degrees from the closed recursion in the `Psi` values alone.
pub fn degrees_by_recursion(psi_ap: &[BigInt], psi_av: &[BigInt], n_max: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let mut deg_hf: Vec<BigInt> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let mut s = psi_ap[n + 1].clone();
        for (j, dj) in deg_hf.iter().enumerate() {
            s += &psi_av[n - j] * dj;
        }
        deg_hf.push(s);
    }
    let deg_f = (0..=n_max)
        .map(|n| {
            let mut s = psi_ap[n].clone();
            for j in 0..n {
                s += &deg_hf[j] * &psi_av[n - 1 - j];
            }
            s
        })
        .collect();
    (deg_f, deg_hf)
}

/// Exact degree sequence by measure evolution, checked against the recursion.
///
/// Every intermediate measure is checked to be balanced.
pub fn degree_sequence(a: &IntegerMatrix, support: &SupportData, n_max: usize) -> Result<DegreeSequence> {
    if a.dim() != support.dim {
        return Err(ModelError::Precondition("matrix and support data dimensions differ".into()));
    }
    if !a.is_sl() {
        return Err(ModelError::NotSl(a.det().to_string()));
    }
    let powers = matrix_powers(a, n_max + 1);
    let psi_ap: Vec<BigInt> = powers.iter().map(|m| psi(m, &support.u_set, &support.p_set)).collect();
    let psi_av: Vec<BigInt> = powers.iter().map(|m| psi(m, &support.u_set, &support.v_set)).collect();

    let d = support.dim;
    let mut mu = LatticeMeasure::from_set(&support.p_set);
    let mut deg_f = Vec::with_capacity(n_max + 1);
    let mut deg_hf = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        deg_f.push(mu.integrate_support(&support.u_set));
        let image = pushforward(&mu, a);
        let dh = image.integrate_support(&support.u_set);
        mu = involution_step(&image, &dh, &support.v_set)?;
        if !image.is_balanced(d) || !mu.is_balanced(d) {
            return Err(ModelError::Precondition("measure lost balance".into()));
        }
        deg_hf.push(dh);
    }

    let (rec_f, rec_hf) = degrees_by_recursion(&psi_ap, &psi_av, n_max);
    for n in 0..=n_max {
        if rec_f[n] != deg_f[n] || rec_hf[n] != deg_hf[n] {
            return Err(ModelError::RecursionMismatch(n));
        }
    }
    let mut psi_ap = psi_ap;
    let mut psi_av = psi_av;
    psi_ap.truncate(n_max + 1);
    psi_av.truncate(n_max + 1);
    Ok(DegreeSequence { n_max, deg_f, deg_hf, psi_av, psi_ap })
}

/// Measures `mu(f^n L)` for `n = 0..=n_max`, for inspection.
pub fn measure_orbit(a: &IntegerMatrix, support: &SupportData, n_max: usize) -> Result<Vec<LatticeMeasure>> {
    let mut mu = LatticeMeasure::from_set(&support.p_set);
    let mut out = vec![mu.clone()];
    for _ in 0..n_max {
        let image = pushforward(&mu, a);
        let dh = image.integrate_support(&support.u_set);
        mu = involution_step(&image, &dh, &support.v_set)?;
        out.push(mu.clone());
    }
    Ok(out)
}

/// Checks `deg f^{m+n} <= deg f^m deg f^n` over the computed range.
pub fn is_submultiplicative(deg_f: &[BigInt]) -> bool {
    let n = deg_f.len();
    (0..n).all(|i| (0..n - i).all(|j| deg_f[i + j] <= &deg_f[i] * &deg_f[j]))
}

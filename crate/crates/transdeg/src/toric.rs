//! Canonical lattice data of projective space and the involution `g`, and
//! finitely supported integer measures on the lattice.
//!
//! Homogeneous coordinates are `x_0, .., x_d`. The involution is the standard
//! Cremona involution conjugated by the sign matrix `B`, so each component of
//! `g` is one coordinate times a product of the linear forms `b_i = (B x)_i`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

pub type LatticeVector = Vec<i64>;

/// Fan generators, weights, involution vectors, differences and wall normals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportData {
    pub dim: usize,
    /// Ray generators of the fan of projective space: `(-1,..,-1), e_1, .., e_d`.
    pub p_set: Vec<LatticeVector>,
    /// Weights of the hyperplane class: `0, -e_1, .., -e_d`.
    pub u_set: Vec<LatticeVector>,
    /// Pole-order vectors of the involution, one per linear form `b_j`.
    pub v_set: Vec<LatticeVector>,
    /// Nonzero differences of weights.
    pub d_set: Vec<LatticeVector>,
    /// Primitive normals of the codimension-one cones, first nonzero entry positive.
    pub wall_normals: Vec<LatticeVector>,
}

fn unit(d: usize, i: usize, s: i64) -> LatticeVector {
    let mut v = vec![0; d];
    v[i] = s;
    v
}

/// Entry `(i, j)` of the sign matrix `B`, indices in `0..=d`.
pub fn b_entry(i: usize, j: usize) -> i64 {
    let parity = if i <= j { j - i } else { i - j - 1 };
    if parity % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Symbolic description of the involution `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub dim: usize,
    /// The `(d+1) x (d+1)` sign matrix `B`; `b_i` is row `i` applied to `x`.
    pub b: Vec<Vec<i64>>,
    pub b_inv: Vec<Vec<BigRational>>,
    /// For component `j`: indices `i` with `g_j = sign_j * x_j * prod b_i`.
    pub factors: Vec<Vec<usize>>,
    /// `+1` except `(-1)^d` on the last component, which makes `g o g` the identity.
    pub signs: Vec<i64>,
}

impl Involution {
    pub fn component_degree(&self, j: usize) -> usize {
        1 + self.factors[j].len()
    }
}

/// The sign matrix, its inverse and the factor structure of each component of `g`.
pub fn involution_components(d: usize) -> Result<Involution> {
    if d < 3 {
        return Err(ModelError::DimensionTooSmall(d));
    }
    let n = d + 1;
    let b: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| b_entry(i, j)).collect()).collect();
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let mut b_inv = vec![vec![BigRational::zero(); n]; n];
    for i in 0..d {
        b_inv[i][i] = half.clone();
        b_inv[i][i + 1] = half.clone();
    }
    b_inv[d][d] = half.clone();
    b_inv[d][0] = if d % 2 == 0 { half.clone() } else { -half.clone() };
    let factors = (0..n)
        .map(|j| {
            let skip = if j < d { [j, j + 1] } else { [0, d] };
            (0..n).filter(|i| !skip.contains(i)).collect()
        })
        .collect();
    let mut signs = vec![1; n];
    signs[d] = if d % 2 == 0 { 1 } else { -1 };
    Ok(Involution { dim: d, b, b_inv, factors, signs })
}

/// Multiplicity of `b_j` in the component `g_k`.
fn order_in_component(inv: &Involution, j: usize, k: usize) -> i64 {
    inv.factors[k].iter().filter(|&&i| i == j).count() as i64
}

/// Generalized cross product: the vector of signed maximal minors.
fn cross_product(rows: &[LatticeVector], d: usize) -> LatticeVector {
    (0..d)
        .map(|k| {
            let minor: Vec<Vec<i64>> =
                rows.iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != k).map(|(_, &x)| x).collect()).collect();
            let det = det_i64(&minor);
            if k % 2 == 0 {
                det
            } else {
                -det
            }
        })
        .collect()
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|c| {
            let sub: Vec<Vec<i64>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect()).collect();
            let s = if c % 2 == 0 { 1 } else { -1 };
            s * m[0][c] * det_i64(&sub)
        })
        .sum()
}

/// Divides by the gcd of the entries and makes the first nonzero entry positive.
pub fn canonical_primitive(v: &[i64]) -> LatticeVector {
    let g = v.iter().fold(0i64, |g, &x| g.gcd(&x));
    if g == 0 {
        return v.to_vec();
    }
    let sign = v.iter().find(|&&x| x != 0).map(|&x| x.signum()).unwrap_or(1);
    v.iter().map(|&x| sign * x / g).collect()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Builds all canonical sets for dimension `d`.
pub fn canonical_sets(d: usize) -> Result<SupportData> {
    if d < 3 {
        return Err(ModelError::DimensionTooSmall(d));
    }
    let mut p_set = vec![vec![-1; d]];
    p_set.extend((0..d).map(|i| unit(d, i, 1)));
    let mut u_set = vec![vec![0; d]];
    u_set.extend((0..d).map(|i| unit(d, i, -1)));

    // v_j[k-1] is the order of b_j in g_k / g_0.
    let inv = involution_components(d)?;
    let v_set: Vec<LatticeVector> = (0..=d)
        .map(|j| (1..=d).map(|k| order_in_component(&inv, j, k) - order_in_component(&inv, j, 0)).collect())
        .collect();

    let mut d_set = Vec::new();
    for a in &u_set {
        for b in &u_set {
            if a != b {
                d_set.push(a.iter().zip(b).map(|(x, y)| x - y).collect());
            }
        }
    }

    let mut wall_normals = Vec::new();
    for subset in subsets(d + 1, d - 1) {
        let rows: Vec<LatticeVector> = subset.iter().map(|&i| p_set[i].clone()).collect();
        let n = canonical_primitive(&cross_product(&rows, d));
        if !wall_normals.contains(&n) {
            wall_normals.push(n);
        }
    }
    wall_normals.sort();

    Ok(SupportData { dim: d, p_set, u_set, v_set, d_set, wall_normals })
}

pub fn dot_i64(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max_{u in U} <u, v>` for a big-integer vector.
pub fn support_function(v: &[BigInt], u_set: &[LatticeVector]) -> BigInt {
    u_set
        .iter()
        .map(|u| u.iter().zip(v).fold(BigInt::zero(), |acc, (&a, b)| acc + b * a))
        .max()
        .expect("nonempty weight set")
}

pub fn support_function_i64(v: &[i64], u_set: &[LatticeVector]) -> i64 {
    u_set.iter().map(|u| dot_i64(u, v)).max().expect("nonempty weight set")
}

/// Finitely supported measure on the lattice with positive integer weights.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LatticeMeasure {
    atoms: BTreeMap<Vec<BigInt>, BigInt>,
}

impl LatticeMeasure {
    pub fn new() -> Self {
        LatticeMeasure::default()
    }

    /// Unit weights on each vector of the set; repeated vectors accumulate.
    pub fn from_set(vectors: &[LatticeVector]) -> Self {
        let mut m = LatticeMeasure::new();
        for v in vectors {
            m.add_atom(v.iter().map(|&x| BigInt::from(x)).collect(), BigInt::one());
        }
        m
    }

    pub fn add_atom(&mut self, at: Vec<BigInt>, weight: BigInt) {
        assert!(weight.is_positive(), "atom weights are positive");
        *self.atoms.entry(at).or_insert_with(BigInt::zero) += weight;
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Vec<BigInt>, &BigInt)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weight(&self, at: &[BigInt]) -> BigInt {
        self.atoms.get(at).cloned().unwrap_or_default()
    }

    pub fn total_mass(&self) -> BigInt {
        self.atoms.values().sum()
    }

    /// `sum weight * vector`.
    pub fn barycenter_sum(&self, dim: usize) -> Vec<BigInt> {
        let mut s = vec![BigInt::zero(); dim];
        for (v, w) in &self.atoms {
            for (acc, x) in s.iter_mut().zip(v) {
                *acc += w * x;
            }
        }
        s
    }

    pub fn is_balanced(&self, dim: usize) -> bool {
        self.barycenter_sum(dim).iter().all(|x| x.is_zero())
    }

    /// `sum weight * psi(vector)`.
    pub fn integrate_support(&self, u_set: &[LatticeVector]) -> BigInt {
        self.atoms.iter().map(|(v, w)| w * support_function(v, u_set)).sum()
    }

    /// Adds `scale` copies of `other`.
    pub fn add_scaled(&mut self, other: &LatticeMeasure, scale: &BigInt) {
        if scale.is_zero() {
            return;
        }
        for (v, w) in &other.atoms {
            self.add_atom(v.clone(), w * scale);
        }
    }

    /// Image under a linear map given as a closure on vectors.
    pub fn map_vectors(&self, f: impl Fn(&[BigInt]) -> Vec<BigInt>) -> LatticeMeasure {
        let mut out = LatticeMeasure::new();
        for (v, w) in &self.atoms {
            out.add_atom(f(v), w.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_matrix_dimension_three() {
        let inv = involution_components(3).unwrap();
        assert_eq!(inv.b, vec![vec![1, -1, 1, -1], vec![1, 1, -1, 1], vec![-1, 1, 1, -1], vec![1, -1, 1, 1]]);
        assert_eq!(inv.factors, vec![vec![2, 3], vec![0, 3], vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn canonical_primitive_normalizes() {
        assert_eq!(canonical_primitive(&[0, -2, 4]), vec![0, 1, -2]);
    }
}

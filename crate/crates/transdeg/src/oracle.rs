//! Degrees of iterates computed symbolically: a random line over a prime
//! field is pushed through the monomial map and the involution, with common
//! factors cancelled after every step.

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use transdeg_core::IntegerMatrix;

use crate::error::{ModelError, Result};
use crate::fpoly::{gcd, FieldPoly, PrimeField};
use crate::toric::{involution_components, Involution};

/// Two-adicity required of oracle primes, enough for products of degree `2^21`.
pub const ORACLE_ADICITY: u32 = 22;

/// A map `P^1 -> P^d` given by `d + 1` coprime polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParametrizedCurve {
    pub field: PrimeField,
    pub components: Vec<FieldPoly>,
}

impl ParametrizedCurve {
    /// Divides out the common factor; fails when every component vanishes.
    pub fn new(field: PrimeField, components: Vec<FieldPoly>, rng: &mut impl Rng) -> Result<Self> {
        if components.iter().all(FieldPoly::is_zero) {
            return Err(ModelError::ComponentCollapse);
        }
        let common = common_factor(&field, &components, rng);
        let components = if common.degree().unwrap_or(0) == 0 {
            components
        } else {
            components.iter().map(|c| c.exact_div(&field, &common).expect("common factor divides")).collect()
        };
        Ok(ParametrizedCurve { field, components })
    }

    /// The line through two random points.
    pub fn random_line(field: PrimeField, dim: usize, rng: &mut impl Rng) -> Self {
        let components = (0..=dim).map(|_| FieldPoly::new(vec![rng.gen_range(0..field.q), rng.gen_range(1..field.q)])).collect();
        ParametrizedCurve { field, components }
    }

    pub fn dim(&self) -> usize {
        self.components.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.components.iter().filter_map(FieldPoly::degree).max().unwrap_or(0)
    }
}

/// Gcd of all components, from two random combinations and confirmed by division.
fn common_factor(f: &PrimeField, comps: &[FieldPoly], rng: &mut impl Rng) -> FieldPoly {
    let nonzero: Vec<&FieldPoly> = comps.iter().filter(|c| !c.is_zero()).collect();
    if nonzero.len() == 1 {
        return nonzero[0].monic(f);
    }
    let combo = |rng: &mut dyn rand::RngCore| {
        nonzero.iter().fold(FieldPoly::zero(), |acc, c| acc.add(f, &c.scale(f, rng.gen_range(1..f.q))))
    };
    let g = gcd(f, &combo(rng), &combo(rng));
    if nonzero.iter().all(|c| c.rem(f, &g).is_zero()) {
        return g;
    }
    nonzero.iter().skip(1).fold(nonzero[0].clone(), |acc, c| gcd(f, &acc, c))
}

/// Exponents of the minimal homogeneous lift of `h_A` on `x_0, .., x_d`.
pub fn homogeneous_exponents(a: &IntegerMatrix) -> Result<Vec<Vec<u64>>> {
    let d = a.dim();
    let mut rows: Vec<Vec<i64>> = vec![vec![0; d + 1]];
    for i in 0..d {
        let entries: Vec<i64> = a
            .row(i)
            .iter()
            .map(|x| x.to_i64().ok_or_else(|| ModelError::Precondition("matrix entries too large".into())))
            .collect::<Result<_>>()?;
        let mut row = vec![-entries.iter().sum::<i64>()];
        row.extend(entries);
        rows.push(row);
    }
    // Multiply every component by the same monomial so each variable's least exponent is 0.
    for k in 0..=d {
        let min = rows.iter().map(|r| r[k]).min().unwrap_or(0);
        for r in rows.iter_mut() {
            r[k] -= min;
        }
    }
    Ok(rows.into_iter().map(|r| r.into_iter().map(|x| x as u64).collect()).collect())
}

/// Pairwise coprime monic factors of nonzero polynomials, with each input's
/// exponent vector: `polys[k] = c_k * prod_m basis[m]^exponents[k][m]`.
#[derive(Clone, Debug)]
pub struct CoprimeBasis {
    pub basis: Vec<FieldPoly>,
    pub exponents: Vec<Vec<u64>>,
    pub units: Vec<u64>,
}

/// Refines the inputs into a coprime basis by repeatedly splitting pairs along their gcd.
pub fn coprime_basis(f: &PrimeField, polys: &[FieldPoly]) -> CoprimeBasis {
    let units = polys.iter().map(FieldPoly::leading).collect();
    // Each basis entry carries an id so pairs already found coprime are not retested.
    let mut basis: Vec<(usize, FieldPoly)> = Vec::new();
    let mut columns: Vec<Vec<u64>> = Vec::new();
    let mut next_id = 0;
    for (k, p) in polys.iter().enumerate() {
        if p.degree().unwrap_or(0) > 0 {
            basis.push((next_id, p.monic(f)));
            next_id += 1;
            let mut col = vec![0; polys.len()];
            col[k] = 1;
            columns.push(col);
        }
    }
    let mut coprime = std::collections::HashSet::new();
    'outer: loop {
        for i in 0..basis.len() {
            for j in i + 1..basis.len() {
                let key = (basis[i].0, basis[j].0);
                if coprime.contains(&key) {
                    continue;
                }
                let g = gcd(f, &basis[i].1, &basis[j].1);
                if g.degree().unwrap_or(0) == 0 {
                    coprime.insert(key);
                    continue;
                }
                let u = basis[i].1.exact_div(f, &g).expect("gcd divides");
                let v = basis[j].1.exact_div(f, &g).expect("gcd divides");
                let col: Vec<u64> = columns[i].iter().zip(&columns[j]).map(|(a, b)| a + b).collect();
                basis[i] = (next_id, u);
                basis[j] = (next_id + 1, v);
                basis.push((next_id + 2, g));
                next_id += 3;
                columns.push(col);
                let keep: Vec<bool> = basis.iter().map(|(_, b)| b.degree().unwrap_or(0) > 0).collect();
                let mut it = keep.iter();
                basis.retain(|_| *it.next().expect("aligned"));
                let mut it = keep.iter();
                columns.retain(|_| *it.next().expect("aligned"));
                continue 'outer;
            }
        }
        break;
    }
    let exponents = (0..polys.len()).map(|k| columns.iter().map(|c| c[k]).collect()).collect();
    CoprimeBasis { basis: basis.into_iter().map(|(_, b)| b).collect(), exponents, units }
}

/// The image of the curve under the monomial map of `a`. The common factor is
/// read off a coprime basis of the components rather than a gcd of the images.
pub fn apply_monomial(curve: &ParametrizedCurve, a: &IntegerMatrix) -> Result<ParametrizedCurve> {
    if a.dim() != curve.dim() {
        return Err(ModelError::Precondition("matrix and curve dimensions differ".into()));
    }
    let f = curve.field;
    let exps = homogeneous_exponents(a)?;
    for k in 0..=a.dim() {
        if curve.components[k].is_zero() && exps.iter().any(|r| r[k] > 0) {
            return Err(ModelError::ComponentCollapse);
        }
    }
    let used: Vec<usize> = (0..=a.dim()).filter(|&k| exps.iter().any(|r| r[k] > 0)).collect();
    let inputs: Vec<FieldPoly> = used.iter().map(|&k| curve.components[k].clone()).collect();
    let cb = coprime_basis(&f, &inputs);
    let image_exps: Vec<Vec<u64>> = exps
        .iter()
        .map(|row| {
            (0..cb.basis.len())
                .map(|m| used.iter().enumerate().map(|(u, &k)| row[k] * cb.exponents[u][m]).sum())
                .collect()
        })
        .collect();
    let common: Vec<u64> =
        (0..cb.basis.len()).map(|m| image_exps.iter().map(|r| r[m]).min().unwrap_or(0)).collect();
    let comps: Vec<FieldPoly> = exps
        .par_iter()
        .zip(&image_exps)
        .map(|(row, e)| {
            let unit = used.iter().enumerate().fold(1, |acc, (u, &k)| f.mul(acc, f.pow(cb.units[u], row[k])));
            let mut factors: Vec<FieldPoly> = cb
                .basis
                .iter()
                .zip(e.iter().zip(&common))
                .filter(|(_, (&x, &c))| x > c)
                .map(|(b, (&x, &c))| b.pow(&f, x - c))
                .collect();
            factors.sort_by_key(|p| std::cmp::Reverse(p.coeffs.len()));
            let mut acc = FieldPoly::constant(unit);
            while let Some(p) = factors.pop() {
                acc = acc.mul(&f, &p);
            }
            acc
        })
        .collect();
    Ok(ParametrizedCurve { field: f, components: comps })
}

/// The monomial image with the common factor found by a gcd of the full
/// images; slower, kept as a cross-check of [`apply_monomial`].
pub fn apply_monomial_dense(curve: &ParametrizedCurve, a: &IntegerMatrix, rng: &mut impl Rng) -> Result<ParametrizedCurve> {
    if a.dim() != curve.dim() {
        return Err(ModelError::Precondition("matrix and curve dimensions differ".into()));
    }
    let f = curve.field;
    let exps = homogeneous_exponents(a)?;
    for k in 0..=a.dim() {
        if curve.components[k].is_zero() && exps.iter().any(|r| r[k] > 0) {
            return Err(ModelError::ComponentCollapse);
        }
    }
    let comps: Vec<FieldPoly> = exps
        .par_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|&(_, &e)| e > 0)
                .fold(FieldPoly::constant(1), |acc, (k, &e)| acc.mul(&f, &curve.components[k].pow(&f, e)))
        })
        .collect();
    ParametrizedCurve::new(f, comps, rng)
}

/// The image of the curve under the involution.
pub fn apply_involution(curve: &ParametrizedCurve, inv: &Involution, rng: &mut impl Rng) -> Result<ParametrizedCurve> {
    let f = curve.field;
    let forms: Vec<FieldPoly> = inv
        .b
        .iter()
        .map(|row| {
            row.iter().zip(&curve.components).fold(FieldPoly::zero(), |acc, (&s, c)| {
                if s >= 0 {
                    acc.add(&f, c)
                } else {
                    acc.sub(&f, c)
                }
            })
        })
        .collect();
    if forms.iter().any(FieldPoly::is_zero) {
        return Err(ModelError::ComponentCollapse);
    }
    let comps: Vec<FieldPoly> = (0..=inv.dim)
        .into_par_iter()
        .map(|j| {
            let start = if inv.signs[j] < 0 { FieldPoly::zero().sub(&f, &curve.components[j]) } else { curve.components[j].clone() };
            inv.factors[j].iter().fold(start, |acc, &i| acc.mul(&f, &forms[i]))
        })
        .collect();
    ParametrizedCurve::new(f, comps, rng)
}

/// Degrees of one random line's iterates, `deg f^0 .. deg f^n`.
pub fn trial_degrees(a: &IntegerMatrix, n: usize, field: PrimeField, rng: &mut impl Rng) -> Result<Vec<usize>> {
    let inv = involution_components(a.dim())?;
    let mut curve = ParametrizedCurve::random_line(field, a.dim(), rng);
    let mut out = vec![curve.degree()];
    for _ in 0..n {
        let image = apply_monomial(&curve, a)?;
        curve = apply_involution(&image, &inv, rng)?;
        out.push(curve.degree());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleTrial {
    pub prime: u64,
    pub degrees: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Maximum over trials of `deg f^k`, for `k = 0..=n`.
    pub degrees: Vec<usize>,
    pub trials: Vec<OracleTrial>,
}

impl OracleReport {
    pub fn degree(&self) -> usize {
        *self.degrees.last().expect("at least one iterate")
    }

    /// Number of trials whose last degree equals the maximum.
    pub fn agreeing_trials(&self) -> usize {
        self.trials.iter().filter(|t| t.degrees.last() == self.degrees.last()).count()
    }
}

/// `deg f^n` as the maximum over random lines, each over its own random prime
/// unless `prime` is fixed. Lines that hit a collapse are redrawn, up to a budget.
pub fn oracle_degree(a: &IntegerMatrix, n: usize, trials: usize, seed: u64, prime: Option<u64>) -> Result<OracleReport> {
    if trials == 0 {
        return Err(ModelError::Precondition("at least one trial".into()));
    }
    let fixed = match prime {
        Some(q) => Some(PrimeField::new(q).ok_or_else(|| ModelError::Precondition(format!("{q} is not a usable prime")))?),
        None => None,
    };
    let results: Vec<Result<OracleTrial>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            for _ in 0..8 {
                let field = fixed.unwrap_or_else(|| PrimeField::random(&mut rng, ORACLE_ADICITY));
                match trial_degrees(a, n, field, &mut rng) {
                    Ok(degrees) => return Ok(OracleTrial { prime: field.q, degrees }),
                    Err(ModelError::ComponentCollapse) => continue,
                    Err(e) => return Err(e),
                }
            }
            Err(ModelError::BudgetExhausted("every redrawn line collapsed".into()))
        })
        .collect();
    let trials: Vec<OracleTrial> = results.into_iter().collect::<Result<_>>()?;
    let degrees = (0..=n).map(|k| trials.iter().map(|t| t.degrees[k]).max().unwrap_or(0)).collect();
    Ok(OracleReport { degrees, trials })
}

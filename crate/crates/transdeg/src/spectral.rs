//! Certified eigenvalue data of an integer matrix and the piecewise-constant
//! selector function built from its leading eigenvalue pair.
//!
//! Spectral projectors are `Pi_i = adj(lambda_i I - M) / p'(lambda_i)`, so every
//! bilinear quantity `w^T Pi_i v` is an integer polynomial evaluated at a root
//! divided by `p'` at that root. For large `j`,
//!
//! ```text
//! <u, M^j v> ~ 2 |xi|^j Re(e^{2 pi i j theta} u^T Pi_xi v),
//! ```
//!
//! so the maximizing weight for `v` depends only on `j theta mod 1`. The
//! selector changes where `e^{4 pi i t} = sigma(v, w)` with
//! `sigma = -G(conj xi) / G(xi)` and `G(z) = w^T Pi_z v`.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use transdeg_core::roots::isolate_roots;
use transdeg_core::transcendental::{arg_turns, exp_i_turns};
use transdeg_core::{precision_ceiling, ComplexInterval, Dyadic, IntPolynomial, IntegerMatrix, Interval};

use crate::error::{ModelError, Result};
use crate::toric::LatticeVector;

/// Certified roots of the characteristic polynomial with leading-pair data.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub matrix: IntegerMatrix,
    pub char_poly: IntPolynomial,
    pub roots: Vec<ComplexInterval>,
    pub real: Vec<bool>,
    /// `(xi, conj xi)` with `Im xi > 0`, when two conjugate roots certifiably dominate.
    pub leading_pair: Option<(usize, usize)>,
    /// `arg(xi) / 2 pi` in `(0, 1/2)`.
    pub theta: Option<Interval>,
    /// Enclosure of the spectral radius.
    pub modulus_rho: Interval,
    pub prec: u32,
    pub target_log2: i64,
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

enum Leading {
    Pair(usize, usize),
    SingleReal,
    Ambiguous,
}

fn classify_leading(roots: &[ComplexInterval], real: &[bool]) -> (Leading, Interval) {
    let moduli: Vec<Interval> = roots.iter().map(|z| z.abs()).collect();
    let best_lo = moduli.iter().map(|m| m.lo().clone()).max().expect("nonempty");
    let top: Vec<usize> = (0..roots.len()).filter(|&i| *moduli[i].hi() >= best_lo).collect();
    let rho = top.iter().map(|&i| moduli[i].clone()).reduce(|a, b| a.hull(&b)).expect("nonempty");
    let leading = match top.as_slice() {
        [i] if real[*i] => Leading::SingleReal,
        [i, j] if !real[*i] && !real[*j] && roots[*i].overlaps(&roots[*j].conj()) => {
            if roots[*i].im.is_positive() {
                Leading::Pair(*i, *j)
            } else {
                Leading::Pair(*j, *i)
            }
        }
        _ => Leading::Ambiguous,
    };
    (leading, rho)
}

/// Certified spectral data with root enclosures narrower than `2^target_log2`.
pub fn spectral_data(a: &IntegerMatrix, target_log2: i64) -> Result<SpectralData> {
    let p = a.char_poly();
    if !p.is_squarefree() {
        return Err(ModelError::NotSquarefree);
    }
    let ceiling = precision_ceiling();
    let mut target = target_log2;
    loop {
        let enc = isolate_roots(&p, target, ceiling)?;
        let (leading, rho) = classify_leading(&enc.roots, &enc.real);
        let pair = match leading {
            Leading::Pair(i, j) => Some((i, j)),
            Leading::SingleReal => None,
            Leading::Ambiguous => {
                if enc.prec >= ceiling {
                    return Err(ModelError::LeadingPairAmbiguous);
                }
                target = target.saturating_mul(2).min(-64);
                continue;
            }
        };
        let theta = match pair {
            Some((i, _)) => Some(arg_turns(&enc.roots[i])?),
            None => None,
        };
        return Ok(SpectralData {
            matrix: a.clone(),
            char_poly: p,
            roots: enc.roots,
            real: enc.real,
            leading_pair: pair,
            theta,
            modulus_rho: rho,
            prec: enc.prec,
            target_log2: target,
        });
    }
}

impl SpectralData {
    pub fn dim(&self) -> usize {
        self.roots.len()
    }

    /// Recomputes with root enclosures narrower than `2^target_log2`.
    pub fn refine(&self, target_log2: i64) -> Result<SpectralData> {
        spectral_data(&self.matrix, target_log2)
    }

    pub fn leading(&self) -> Result<(usize, usize)> {
        self.leading_pair.ok_or(ModelError::LeadingPairAmbiguous)
    }

    pub fn xi(&self) -> Result<&ComplexInterval> {
        Ok(&self.roots[self.leading()?.0])
    }

    pub fn theta(&self) -> Result<&Interval> {
        self.theta.as_ref().ok_or(ModelError::LeadingPairAmbiguous)
    }

    /// `p'(lambda_i)`.
    pub fn derivative_at(&self, i: usize) -> ComplexInterval {
        self.char_poly.derivative().eval_complex(&self.roots[i])
    }

    /// `w^T Pi_i v`.
    pub fn bilinear(&self, i: usize, w: &[BigInt], v: &[BigInt]) -> Result<ComplexInterval> {
        let num = self.matrix.bilinear_adjugate(w, v).eval_complex(&self.roots[i]);
        num.div(&self.derivative_at(i)).map_err(|_| ModelError::DenominatorNearZero)
    }

    /// The projector `Pi_i` as a row-major matrix of enclosures.
    pub fn projector(&self, i: usize) -> Result<Vec<ComplexInterval>> {
        let d = self.dim();
        let z = &self.roots[i];
        let dp = self.derivative_at(i);
        let coeffs = self.matrix.adjugate_polynomial();
        let mut out = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                let poly = IntPolynomial::new(coeffs.iter().map(|m| m.get(r, c).clone()).collect());
                out.push(poly.eval_complex(z).div(&dp).map_err(|_| ModelError::DenominatorNearZero)?);
            }
        }
        Ok(out)
    }

    /// `-G(lambda_k) / G(lambda_i)` with `G(z) = w^T Pi_z v`: the image of `sigma(v, w)`
    /// under a root permutation sending `xi` to `lambda_i` and `conj xi` to `lambda_k`.
    pub fn sigma_pair(&self, i: usize, k: usize, v: &[i64], w: &[i64]) -> Result<ComplexInterval> {
        if v.iter().all(|&x| x == 0) || w.iter().all(|&x| x == 0) {
            return Err(ModelError::Precondition("sigma needs nonzero vectors".into()));
        }
        let (vb, wb) = (to_big(v), to_big(w));
        let num = self.bilinear(k, &wb, &vb)?;
        let den = self.bilinear(i, &wb, &vb)?;
        (-num).div(&den).map_err(|_| ModelError::DenominatorNearZero)
    }
}

/// `sigma(v, w)`; its modulus is exactly one.
pub fn sigma(spectral: &SpectralData, v: &[i64], w: &[i64]) -> Result<ComplexInterval> {
    let (i, k) = spectral.leading()?;
    spectral.sigma_pair(i, k, v, w)
}

/// Both angles `t in [0, 1)` with `e^{4 pi i t} = sigma`.
pub fn breakpoints_of(sigma: &ComplexInterval) -> Result<[Interval; 2]> {
    let t = arg_turns(sigma)?.mul_pow2(-1);
    let half = Interval::point(Dyadic::pow2(-1), t.prec());
    let second = &t + &half;
    Ok([t, second])
}

/// Piecewise-constant, 1-periodic selector data.
#[derive(Clone, Debug)]
pub struct PiecewiseGamma {
    /// Sorted, pairwise disjoint enclosures in `[0, 1)`. Piece `k` is the open arc
    /// ending at breakpoint `k`; piece 0 wraps around from the last breakpoint.
    pub breakpoints: Vec<Interval>,
    /// Per piece, the index into `u_set` chosen for each `v`.
    pub selectors: Vec<Vec<usize>>,
    /// Per piece, `gamma_i = sum_v Gamma_v^T Pi_i v` for each root `i`.
    pub values: Vec<Vec<ComplexInterval>>,
    pub u_set: Vec<LatticeVector>,
    pub v_set: Vec<LatticeVector>,
    /// Candidate count before merging overlapping enclosures.
    pub candidate_count: usize,
}

/// `u^T Pi_xi v` for every `(v, u)`, indexed `[v][u]`.
fn leading_coefficients(
    spectral: &SpectralData,
    u_set: &[LatticeVector],
    v_set: &[LatticeVector],
) -> Result<Vec<Vec<ComplexInterval>>> {
    let (xi, _) = spectral.leading()?;
    v_set
        .iter()
        .map(|v| u_set.iter().map(|u| spectral.bilinear(xi, &to_big(u), &to_big(v))).collect())
        .collect()
}

/// Certified argmax of `Re(rotation * c_u)` over `u`.
fn select(rotation: &ComplexInterval, coeffs: &[ComplexInterval]) -> Result<usize> {
    let vals: Vec<Interval> = coeffs.iter().map(|c| (rotation * c).re).collect();
    let best = (0..vals.len()).max_by(|&a, &b| vals[a].hi().cmp(vals[b].hi())).expect("nonempty");
    for (k, val) in vals.iter().enumerate() {
        if k != best && val.hi() >= vals[best].lo() {
            return Err(ModelError::OnBreakpoint);
        }
    }
    Ok(best)
}

fn selectors_at(rotation: &ComplexInterval, table: &[Vec<ComplexInterval>]) -> Result<Vec<usize>> {
    table.iter().map(|row| select(rotation, row)).collect()
}

fn gamma_values(
    spectral: &SpectralData,
    selectors: &[usize],
    u_set: &[LatticeVector],
    v_set: &[LatticeVector],
) -> Result<Vec<ComplexInterval>> {
    (0..spectral.dim())
        .map(|i| {
            let mut acc = ComplexInterval::zero(spectral.prec);
            for (v, &s) in v_set.iter().zip(selectors) {
                acc = &acc + &spectral.bilinear(i, &to_big(&u_set[s]), &to_big(v))?;
            }
            Ok(acc)
        })
        .collect()
}

/// Builds the selector function of the matrix in `spectral`.
///
/// Candidate angles come from every `(v, w)` with `v` in `v_set`, `w` in `d_set`;
/// overlapping candidates are merged and only candidates where some selector
/// actually changes are kept.
pub fn gamma_function(
    spectral: &SpectralData,
    u_set: &[LatticeVector],
    v_set: &[LatticeVector],
    d_set: &[LatticeVector],
) -> Result<PiecewiseGamma> {
    let table = leading_coefficients(spectral, u_set, v_set)?;
    let mut candidates: Vec<Interval> = Vec::new();
    let mut candidate_count = 0;
    for v in v_set {
        for w in d_set {
            let s = sigma(spectral, v, w)?;
            for t in breakpoints_of(&s)? {
                candidate_count += 1;
                match candidates.iter_mut().find(|c| c.overlaps(&t)) {
                    Some(c) => *c = c.hull(&t),
                    None => candidates.push(t),
                }
            }
        }
    }
    // Merging can create new overlaps; repeat until stable.
    loop {
        let mut merged = false;
        'outer: for a in 0..candidates.len() {
            for b in a + 1..candidates.len() {
                if candidates[a].overlaps(&candidates[b]) {
                    let h = candidates[a].hull(&candidates[b]);
                    candidates[a] = h;
                    candidates.remove(b);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            break;
        }
    }
    candidates.sort_by(|a, b| a.lo().cmp(b.lo()));

    let prec = spectral.prec;
    let one = Interval::one(prec);
    let midpoint = |lo: &Interval, hi: &Interval| -> Interval {
        Interval::point((lo.hi().add(hi.lo())).mul_pow2(-1), prec)
    };
    let n = candidates.len();
    if n == 0 {
        let rot = exp_i_turns(&Interval::zero(prec));
        let sel = selectors_at(&rot, &table)?;
        let values = gamma_values(spectral, &sel, u_set, v_set)?;
        return Ok(PiecewiseGamma {
            breakpoints: Vec::new(),
            selectors: vec![sel],
            values: vec![values],
            u_set: u_set.to_vec(),
            v_set: v_set.to_vec(),
            candidate_count,
        });
    }
    // Selector on the arc ending at candidate k.
    let mut arc_selectors = Vec::with_capacity(n);
    for k in 0..n {
        let prev = if k == 0 { &candidates[n - 1] - &one } else { candidates[k - 1].clone() };
        let t = midpoint(&prev, &candidates[k]);
        arc_selectors.push(selectors_at(&exp_i_turns(&t), &table)?);
    }
    let keep: Vec<usize> = (0..n).filter(|&k| arc_selectors[k] != arc_selectors[(k + 1) % n]).collect();
    if keep.is_empty() {
        let values = gamma_values(spectral, &arc_selectors[0], u_set, v_set)?;
        return Ok(PiecewiseGamma {
            breakpoints: Vec::new(),
            selectors: vec![arc_selectors[0].clone()],
            values: vec![values],
            u_set: u_set.to_vec(),
            v_set: v_set.to_vec(),
            candidate_count,
        });
    }
    let breakpoints: Vec<Interval> = keep.iter().map(|&k| candidates[k].clone()).collect();
    let mut selectors = Vec::with_capacity(keep.len());
    let mut values = Vec::with_capacity(keep.len());
    for &k in &keep {
        selectors.push(arc_selectors[k].clone());
        values.push(gamma_values(spectral, &arc_selectors[k], u_set, v_set)?);
    }
    Ok(PiecewiseGamma { breakpoints, selectors, values, u_set: u_set.to_vec(), v_set: v_set.to_vec(), candidate_count })
}

impl PiecewiseGamma {
    pub fn is_constant(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Index of the piece containing `t mod 1`; fails when `t` may lie on a breakpoint.
    pub fn piece_at(&self, t: &Interval) -> Result<usize> {
        if self.breakpoints.is_empty() {
            return Ok(0);
        }
        let prec = t.prec();
        let frac = t - &Interval::from_int(&t.lo().floor(), prec);
        let one = Interval::one(prec);
        let shifts = [&frac - &one, frac.clone(), &frac + &one];
        if self.breakpoints.iter().any(|b| shifts.iter().any(|s| s.overlaps(b))) {
            return Err(ModelError::OnBreakpoint);
        }
        Ok(self.breakpoints.iter().position(|b| frac.lt(b)).unwrap_or(0))
    }

    /// `gamma(t)` as one enclosure per root.
    pub fn eval(&self, t: &Interval) -> Result<&[ComplexInterval]> {
        Ok(&self.values[self.piece_at(t)?])
    }

    /// Selected weight indices at `t`.
    pub fn selectors_at(&self, t: &Interval) -> Result<&[usize]> {
        Ok(&self.selectors[self.piece_at(t)?])
    }

    /// Smallest gap between consecutive breakpoints, cyclically (lower bound).
    pub fn min_gap(&self) -> Option<Dyadic> {
        let n = self.breakpoints.len();
        if n < 2 {
            return None;
        }
        (0..n)
            .map(|k| {
                let next = if k + 1 == n { self.breakpoints[0].lo().add(&Dyadic::one()) } else { self.breakpoints[k + 1].lo().clone() };
                next.sub(self.breakpoints[k].hi())
            })
            .min()
    }
}

/// `<gamma(j theta), (lambda_1^j, .., lambda_d^j)>`, which reproduces `Psi_{U,V}(M^j)` for large `j`.
pub fn psi_from_gamma(spectral: &SpectralData, gamma: &PiecewiseGamma, j: u64) -> Result<ComplexInterval> {
    let theta = spectral.theta()?;
    let t = theta.scale_int(&BigInt::from(j));
    let values = gamma.eval(&t)?;
    let mut acc = ComplexInterval::zero(spectral.prec);
    for (g, z) in values.iter().zip(&spectral.roots) {
        acc = &acc + &(g * &z.pow(j));
    }
    Ok(acc)
}

/// Serializable summary of certified spectral data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub char_poly: String,
    pub roots: Vec<(String, String)>,
    pub leading_pair: Option<(usize, usize)>,
    pub theta: Option<String>,
    pub prec: u32,
}

impl SpectralData {
    pub fn summary(&self) -> SpectralSummary {
        let fmt = |i: &Interval| format!("[{}, {}]", i.lo().to_exact_string(), i.hi().to_exact_string());
        SpectralSummary {
            char_poly: self.char_poly.to_string(),
            roots: self.roots.iter().map(|z| (fmt(&z.re), fmt(&z.im))).collect(),
            leading_pair: self.leading_pair,
            theta: self.theta.as_ref().map(fmt),
            prec: self.prec,
        }
    }
}

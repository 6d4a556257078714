//! Certified solution of `sum_{n>=1} c_n x^n = 1` for series with nonnegative
//! integer coefficients and a geometric tail bound `c_n <= C rho^n`.
//!
//! The dynamical degree of `g o h_{A^N}` is `1/x*` for `c_n = Psi_{U,V}(A^{Nn})`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use transdeg_core::{Dyadic, IntegerMatrix, Interval, Rounding};

use crate::degree::psi;
use crate::error::{ModelError, Result};
use crate::spectral::{spectral_data, SpectralData};
use crate::toric::{LatticeVector, SupportData};

/// Precision used for the reported enclosure of `lambda`; fixed so that
/// tightening the tolerance yields nested enclosures.
pub const REPORT_PREC: u32 = 128;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesSolveResult {
    pub lambda_lo: String,
    pub lambda_hi: String,
    pub x_lo: String,
    pub x_hi: String,
    pub n_terms_used: usize,
    /// Upper bound for the truncated tail anywhere in the final bracket.
    pub tail_bound_at_root: String,
    /// Enclosure of `S(x) - 1` over the final bracket.
    pub residual_lo: String,
    pub residual_hi: String,
    pub tail_constant: String,
    pub tail_rho: String,
    #[serde(skip)]
    pub lambda: Option<Interval>,
    #[serde(skip)]
    pub residual: Option<Interval>,
}

impl SeriesSolveResult {
    pub fn lambda_enclosure(&self) -> Interval {
        self.lambda.clone().expect("populated by the solver")
    }

    pub fn residual_enclosure(&self) -> Interval {
        self.residual.clone().expect("populated by the solver")
    }
}

/// How the tail beyond the computed coefficients is bounded.
#[derive(Clone, Debug)]
pub enum TailModel {
    /// `c_n <= constant * rho^n` for every `n`, proven by the caller.
    Proven { constant: Dyadic, rho: Dyadic },
    /// Constant fitted from the computed terms: four times the largest of
    /// `c_n / rho^n` over the last ten terms, checked against the next five.
    Fitted { rho: Dyadic },
}

/// Coefficient stream with lazily extended terms; `coeff(0)` is ignored.
pub struct SeriesProblem {
    generator: Box<dyn FnMut(usize) -> BigInt + Send>,
    coeffs: Vec<BigInt>,
    tail: TailModel,
}

impl SeriesProblem {
    pub fn new(generator: impl FnMut(usize) -> BigInt + Send + 'static, tail: TailModel) -> Self {
        SeriesProblem { generator: Box::new(generator), coeffs: vec![BigInt::zero()], tail }
    }

    /// Coefficients `c_0 = 0, c_1, .., c_k`.
    pub fn terms(&mut self, k: usize) -> &[BigInt] {
        while self.coeffs.len() <= k {
            let n = self.coeffs.len();
            let c = (self.generator)(n);
            self.coeffs.push(c);
        }
        &self.coeffs[..=k]
    }

    pub fn rho(&self) -> &Dyadic {
        match &self.tail {
            TailModel::Proven { rho, .. } | TailModel::Fitted { rho } => rho,
        }
    }

    /// Tail constant valid for the first `k` terms.
    fn tail_constant(&mut self, k: usize) -> Dyadic {
        match self.tail.clone() {
            TailModel::Proven { constant, .. } => constant,
            TailModel::Fitted { rho } => {
                let mut k = k.max(10);
                loop {
                    let terms = self.terms(k + 5).to_vec();
                    let ratio = |n: usize| -> BigRational {
                        BigRational::new(terms[n].clone(), BigInt::one())
                            / rho.to_rational().pow(n as i32)
                    };
                    let fitted = (k - 9..=k).map(ratio).max().unwrap_or_else(BigRational::zero)
                        * BigRational::from_integer(4.into());
                    if (k + 1..=k + 5).all(|n| ratio(n) <= fitted) {
                        let d = Dyadic::from_rational(&fitted, 64, Rounding::Up);
                        return d;
                    }
                    k *= 2;
                }
            }
        }
    }
}

/// Enclosure of `sum coeffs_n x^n` plus the geometric tail `C (rho x)^{K+1} / (1 - rho x)`.
pub fn series_eval(coeffs: &[BigInt], x: &Interval, tail_c: &Dyadic, tail_rho: &Dyadic) -> Result<Interval> {
    let prec = x.prec();
    let q = x.mul_dyadic(tail_rho);
    let one = Interval::one(prec);
    let tail = if tail_c.is_zero() {
        Interval::zero(prec)
    } else {
        if !q.lt(&one) {
            return Err(ModelError::DivergentTail);
        }
        let k = coeffs.len() as u64;
        let bound = q.pow(k).div(&(&one - &q)).map_err(|_| ModelError::DivergentTail)?;
        let bound = bound.mul_dyadic(tail_c);
        Interval::new(Dyadic::zero(), bound.hi().clone(), prec)
    };
    let nonnegative = coeffs.iter().all(|c| !c.is_negative()) && !x.lo().is_negative();
    let horner = |pt: &Interval| -> Interval {
        let mut acc = Interval::zero(prec);
        for c in coeffs.iter().rev() {
            acc = &(&acc * pt) + &Interval::from_int(c, prec);
        }
        acc
    };
    let body = if nonnegative {
        let lo = horner(&Interval::point(x.lo().clone(), prec));
        let hi = horner(&Interval::point(x.hi().clone(), prec));
        Interval::new(lo.lo().clone(), hi.hi().clone(), prec)
    } else {
        horner(x)
    };
    Ok(&body + &tail)
}

trait MulDyadic {
    fn mul_dyadic(&self, d: &Dyadic) -> Interval;
}

impl MulDyadic for Interval {
    fn mul_dyadic(&self, d: &Dyadic) -> Interval {
        self * &Interval::point(d.clone(), self.prec())
    }
}

fn fmt_dyadic(d: &Dyadic) -> String {
    d.to_exact_string()
}

/// Solver settings.
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Target width of the `lambda` enclosure.
    pub tolerance: f64,
    /// Target width of the residual enclosure `S(x) - 1` over the bracket.
    pub residual_tolerance: f64,
    pub initial_terms: usize,
    pub max_terms: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tolerance: 1e-8, residual_tolerance: 1e-10, initial_terms: 50, max_terms: 4096 }
    }
}

struct Evaluator<'a> {
    problem: &'a mut SeriesProblem,
    terms: usize,
    prec: u32,
    max_terms: usize,
}

impl Evaluator<'_> {
    fn eval(&mut self, x: &Interval) -> Result<Interval> {
        let c = self.problem.tail_constant(self.terms);
        let rho = self.problem.rho().clone();
        let coeffs = self.problem.terms(self.terms).to_vec();
        series_eval(&coeffs, &x.with_prec(self.prec), &c, &rho)
    }

    /// Sign of `S(x) - 1`, raising the term count until certified.
    fn compare_one(&mut self, x: &Dyadic) -> Result<std::cmp::Ordering> {
        let one = Interval::one(self.prec);
        loop {
            let s = self.eval(&Interval::point(x.clone(), self.prec))?;
            if s.lt(&one) {
                return Ok(std::cmp::Ordering::Less);
            }
            if s.gt(&one) {
                return Ok(std::cmp::Ordering::Greater);
            }
            if self.terms >= self.max_terms {
                return Err(ModelError::PrecisionCeiling(self.prec));
            }
            self.terms = (self.terms * 2).min(self.max_terms);
            self.prec += 64;
        }
    }
}

fn dyadic_of(x: f64) -> Dyadic {
    Dyadic::from_f64(x)
}

/// Solves `S(x) = 1` on `(0, 1/rho)` by certified bisection.
pub fn solve_series(problem: &mut SeriesProblem, options: &SolveOptions) -> Result<SeriesSolveResult> {
    let tol = dyadic_of(options.tolerance);
    let tol_res = dyadic_of(options.residual_tolerance);
    let prec = 128u32.max((-options.tolerance.log2()) as u32 + 96);
    let rho = problem.rho().clone();
    if !rho.is_positive() {
        return Err(ModelError::Precondition("tail ratio must be positive".into()));
    }
    let x_max = Dyadic::one().div(&rho, prec, Rounding::Down);
    let mut ev = Evaluator { problem, terms: options.initial_terms.max(2), prec, max_terms: options.max_terms };

    // Upper end of the bracket: the first x_max (1 - 2^-k) where S certifiably exceeds 1.
    let mut x_hi = None;
    'search: for k in 1..=48i64 {
        let x = x_max.sub(&x_max.mul_pow2(-k));
        loop {
            let coeffs = ev.problem.terms(ev.terms).to_vec();
            let partial = series_eval(&coeffs, &Interval::point(x.clone(), prec), &Dyadic::zero(), &rho)?;
            if partial.gt(&Interval::one(prec)) {
                x_hi = Some(x);
                break 'search;
            }
            let enough = ev.terms >= options.max_terms || coeffs.iter().all(|c| c.is_zero());
            let tail_c = ev.problem.tail_constant(ev.terms);
            let full = series_eval(&coeffs, &Interval::point(x.clone(), prec), &tail_c, &rho)?;
            if full.lt(&Interval::one(prec)) || enough {
                break;
            }
            // More terms cannot separate S(x) from 1 once the tail is below working precision.
            if full.hi().sub(partial.hi()).magnitude() < -(prec as i64) + 32 {
                continue 'search;
            }
            ev.terms = (ev.terms * 2).min(options.max_terms);
        }
    }
    let mut x_hi = x_hi.ok_or(ModelError::NoRootInRange)?;
    let mut x_lo = Dyadic::zero();

    // Strict increase on a 32-point grid of the bracket.
    let grid: Vec<Interval> = (1..=32)
        .map(|i| ev.eval(&Interval::point(x_hi.mul_int(&BigInt::from(i)).mul_pow2(-5), prec)))
        .collect::<Result<_>>()?;
    if grid.windows(2).any(|w| !w[0].lt(&w[1])) {
        return Err(ModelError::Precondition("series is not certifiably increasing on the bracket".into()));
    }

    let lambda_of = |lo: &Dyadic, hi: &Dyadic| -> Option<Interval> {
        if lo.is_zero() {
            return None;
        }
        let p = REPORT_PREC.max(prec);
        let l = Dyadic::one().div(hi, p, Rounding::Down);
        let h = Dyadic::one().div(lo, p, Rounding::Up);
        Some(Interval::new(l, h, p))
    };
    loop {
        let lambda = lambda_of(&x_lo, &x_hi);
        let res_ok = if x_lo.is_zero() {
            false
        } else {
            let s = ev.eval(&Interval::new(x_lo.clone(), x_hi.clone(), prec))?;
            s.width() <= tol_res
        };
        if let Some(l) = &lambda {
            if l.width() <= tol && res_ok {
                break;
            }
        }
        let mid = x_lo.add(&x_hi).mul_pow2(-1);
        match ev.compare_one(&mid)? {
            std::cmp::Ordering::Less => x_lo = mid,
            _ => x_hi = mid,
        }
        if x_hi.sub(&x_lo).magnitude() < -(prec as i64) + 8 {
            return Err(ModelError::PrecisionCeiling(prec));
        }
    }

    let bracket = Interval::new(x_lo.clone(), x_hi.clone(), prec);
    let s = ev.eval(&bracket)?;
    let residual = &s - &Interval::one(prec);
    if !residual.contains_zero() {
        return Err(ModelError::Precondition("final bracket does not straddle the root".into()));
    }
    let c = ev.problem.tail_constant(ev.terms);
    let coeffs_len = ev.terms + 1;
    let q = Interval::point(x_hi.clone(), prec).mul_dyadic(&rho);
    let tail = if c.is_zero() {
        Interval::zero(prec)
    } else {
        q.pow(coeffs_len as u64).div(&(&Interval::one(prec) - &q))?.mul_dyadic(&c)
    };
    let lambda = lambda_of(&x_lo, &x_hi).expect("positive lower end");
    Ok(SeriesSolveResult {
        lambda_lo: fmt_dyadic(lambda.lo()),
        lambda_hi: fmt_dyadic(lambda.hi()),
        x_lo: fmt_dyadic(&x_lo),
        x_hi: fmt_dyadic(&x_hi),
        n_terms_used: ev.terms,
        tail_bound_at_root: fmt_dyadic(tail.hi()),
        residual_lo: fmt_dyadic(residual.lo()),
        residual_hi: fmt_dyadic(residual.hi()),
        tail_constant: fmt_dyadic(&c),
        tail_rho: fmt_dyadic(&rho),
        lambda: Some(lambda),
        residual: Some(residual),
    })
}

/// `C` with `Psi_{U,V}(A^m) <= C rho(A)^m` for all `m`, from the spectral projectors:
/// `psi(x) <= max_u |u|_1 |x|_inf` and `|A^m v|_inf <= sum_i |lambda_i|^m |Pi_i v|_inf`.
pub fn proven_tail_constant(spectral: &SpectralData, u_set: &[LatticeVector], v_set: &[LatticeVector]) -> Result<Dyadic> {
    let d = spectral.dim();
    let u_norm = u_set.iter().map(|u| u.iter().map(|x| x.abs()).sum::<i64>()).max().unwrap_or(0);
    let mut total = Dyadic::zero();
    for i in 0..d {
        let proj = spectral.projector(i)?;
        for v in v_set {
            let mut best = Dyadic::zero();
            for r in 0..d {
                let mut acc = transdeg_core::ComplexInterval::zero(spectral.prec);
                for (c, &vc) in v.iter().enumerate() {
                    acc = &acc + &proj[r * d + c].scale_int(&BigInt::from(vc));
                }
                let m = acc.abs().hi().clone();
                if m > best {
                    best = m;
                }
            }
            total = total.add(&best);
        }
    }
    Ok(total.mul_int(&BigInt::from(u_norm)).round(64, Rounding::Up))
}

/// Certified upper bound on the spectral radius.
pub fn rho_upper(spectral: &SpectralData) -> Dyadic {
    spectral.modulus_rho.hi().round(64, Rounding::Up)
}

/// First dynamical degree of `g o h_{A^N}`.
pub fn solve_dyndeg(a: &IntegerMatrix, power: u64, support: &SupportData, options: &SolveOptions) -> Result<SeriesSolveResult> {
    if power == 0 {
        return Err(ModelError::Precondition("power must be positive".into()));
    }
    let spectral = spectral_data(a, -96)?;
    let c = proven_tail_constant(&spectral, &support.u_set, &support.v_set)?;
    let rho = rho_upper(&spectral);
    let mut rho_n = Dyadic::one();
    for _ in 0..power {
        rho_n = rho_n.mul(&rho).round(64, Rounding::Up);
    }
    let step = a.pow(power);
    let (u_set, v_set) = (support.u_set.clone(), support.v_set.clone());
    let mut current = IntegerMatrix::identity(a.dim());
    let mut next_index = 1usize;
    let generator = move |n: usize| -> BigInt {
        while next_index <= n {
            current = step.mul(&current);
            next_index += 1;
        }
        debug_assert_eq!(next_index, n + 1);
        psi(&current, &u_set, &v_set)
    };
    let mut problem = SeriesProblem::new(generator, TailModel::Proven { constant: c, rho: rho_n });
    solve_series(&mut problem, options)
}

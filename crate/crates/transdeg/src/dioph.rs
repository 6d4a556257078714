//! Diophantine diagnostics for the angle of the leading eigenvalue and the
//! selector function: continued-fraction convergents, irregular indices, the
//! periodic approximants of
//!
//! ```text
//! Omega = sum_{j>=1} <gamma(j theta), (rho_1^j, .., rho_d^j)>,   rho_i = (x lambda_i)^N,
//! ```
//!
//! and the monomial expansion of the scaled remainder. These are explorations:
//! comparisons are certified where stated, thresholds are reported rather than
//! asserted.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use transdeg_core::{precision_ceiling, ComplexInterval, Dyadic, Interval};

use crate::error::{ModelError, Result};
use crate::spectral::{gamma_function, spectral_data, PiecewiseGamma, SpectralData};
use crate::toric::SupportData;

/// Convergent denominators skipped before a diagnostic counts as "usable".
pub const DEFAULT_SKIP: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub m: BigInt,
    pub n: BigInt,
}

#[derive(Clone, Debug)]
pub struct ConvergentList {
    /// Certified continued-fraction digits `a_0, a_1, ..`.
    pub digits: Vec<BigInt>,
    /// Convergents with strictly increasing denominators.
    pub convergents: Vec<Convergent>,
    pub theta: Interval,
}

fn rational_digits(q: &BigRational) -> Vec<BigInt> {
    let (mut num, mut den) = (q.numer().clone(), q.denom().clone());
    let mut out = Vec::new();
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        out.push(a);
        num = den;
        den = r;
    }
    out
}

/// Digits shared by every real in `[lo, hi]`. The last digit of each finite
/// expansion is dropped since it has two representations.
fn certified_digits(theta: &Interval) -> Vec<BigInt> {
    let mut lo = rational_digits(&theta.lo().to_rational());
    let mut hi = rational_digits(&theta.hi().to_rational());
    lo.pop();
    hi.pop();
    lo.iter().zip(&hi).take_while(|(a, b)| a == b).map(|(a, _)| a.clone()).collect()
}

fn convergents_from_digits(digits: &[BigInt]) -> Vec<Convergent> {
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let mut out: Vec<Convergent> = Vec::new();
    for a in digits {
        let (p, q) = (a * &p1 + &p0, a * &q1 + &q0);
        p0 = std::mem::replace(&mut p1, p.clone());
        q0 = std::mem::replace(&mut q1, q.clone());
        // With a_1 = 1 the first two denominators coincide; keep the later convergent.
        if out.last().is_some_and(|c| c.n == q) {
            out.pop();
        }
        out.push(Convergent { m: p, n: q });
    }
    out
}

/// The first `count` convergents determined by the enclosure.
pub fn convergents(theta: &Interval, count: usize) -> Result<ConvergentList> {
    let digits = certified_digits(theta);
    let all = convergents_from_digits(&digits);
    if all.len() < count {
        return Err(ModelError::PrecisionCeiling(theta.prec()));
    }
    Ok(ConvergentList { digits, convergents: all.into_iter().take(count).collect(), theta: theta.clone() })
}

/// Convergents of the leading angle of `spectral`, refining the roots until
/// `count` are certified.
pub fn convergents_of(spectral: &SpectralData, count: usize) -> Result<ConvergentList> {
    let mut sp = spectral.clone();
    let ceiling = precision_ceiling();
    loop {
        match convergents(sp.theta()?, count) {
            Ok(list) => return Ok(list),
            Err(ModelError::PrecisionCeiling(_)) if sp.prec < ceiling => {
                sp = sp.refine(sp.target_log2.saturating_mul(2))?;
            }
            Err(e) => return Err(e),
        }
    }
}

impl ConvergentList {
    pub fn denominators(&self) -> Vec<BigInt> {
        self.convergents.iter().map(|c| c.n.clone()).collect()
    }

    /// Enclosure of `|n_i theta - m_i|`.
    pub fn defect(&self, i: usize) -> Interval {
        let c = &self.convergents[i];
        let prec = self.theta.prec();
        (&self.theta.scale_int(&c.n) - &Interval::from_int(&c.m, prec)).abs()
    }

    /// Whether `|n_i theta - m_i| < 1/n_i` is certified.
    pub fn certifies_first_kind(&self, i: usize) -> bool {
        let n = &self.convergents[i].n;
        self.defect(i).lt(&Interval::from_rational(&BigRational::new(BigInt::one(), n.clone()), self.theta.prec()))
    }

    /// Whether `|n_i theta - m_i| < 1/n_{i+1}` is certified; `None` for the last entry.
    pub fn certifies_second_kind(&self, i: usize) -> Option<bool> {
        let next = &self.convergents.get(i + 1)?.n;
        let bound = Interval::from_rational(&BigRational::new(BigInt::one(), next.clone()), self.theta.prec());
        Some(self.defect(i).lt(&bound))
    }
}

/// Selector function, angle and weights for one matrix.
#[derive(Clone, Debug)]
pub struct LabSetup {
    pub spectral: SpectralData,
    pub gamma: PiecewiseGamma,
    pub support: SupportData,
    /// Scale `x` in `rho_i = (x lambda_i)^N`.
    pub x: BigRational,
    pub power: u64,
}

impl LabSetup {
    pub fn new(spectral: SpectralData, support: &SupportData, x: BigRational, power: u64) -> Result<Self> {
        if power == 0 {
            return Err(ModelError::Precondition("power must be positive".into()));
        }
        if !x.is_positive() {
            return Err(ModelError::Precondition("scale must be positive".into()));
        }
        let gamma = gamma_function(&spectral, &support.u_set, &support.v_set, &support.d_set)?;
        let setup = LabSetup { spectral, gamma, support: support.clone(), x, power };
        let r = setup.rho().iter().map(|z| z.abs()).fold(Interval::zero(setup.spectral.prec), |a, b| a.max_with(&b));
        if !r.lt(&Interval::one(setup.spectral.prec)) {
            return Err(ModelError::Precondition("every |rho_i| must be certified below 1".into()));
        }
        Ok(setup)
    }

    /// Same data with root enclosures narrower than `2^-bits`.
    pub fn refine(&self, bits: u32) -> Result<Self> {
        let spectral = spectral_data(&self.spectral.matrix, -i64::from(bits))?;
        LabSetup::new(spectral, &self.support, self.x.clone(), self.power)
    }

    pub fn prec(&self) -> u32 {
        self.spectral.prec
    }

    /// `N theta`, the angle driving the series.
    pub fn angle(&self) -> Result<Interval> {
        Ok(self.spectral.theta()?.scale_int(&BigInt::from(self.power)))
    }

    pub fn rho(&self) -> Vec<ComplexInterval> {
        let x = Interval::from_rational(&self.x, self.spectral.prec);
        self.spectral.roots.iter().map(|z| z.scale(&x).pow(self.power)).collect()
    }

    /// Runs `f`, refining the roots while it reports a breakpoint hit or
    /// insufficient precision.
    pub fn escalate<T>(&self, mut f: impl FnMut(&LabSetup) -> Result<T>) -> Result<T> {
        let ceiling = precision_ceiling();
        let mut setup = self.clone();
        loop {
            match f(&setup) {
                Err(ModelError::OnBreakpoint) | Err(ModelError::PrecisionCeiling(_)) if setup.prec() < ceiling => {
                    setup = setup.refine((setup.prec() * 2).min(ceiling))?;
                }
                Err(ModelError::OnBreakpoint) => return Err(ModelError::PrecisionCeiling(setup.prec())),
                other => return other,
            }
        }
    }
}

fn at(theta: &Interval, j: u64) -> Interval {
    theta.scale_int(&BigInt::from(j))
}

/// An index `j > n` where the selector differs between `(j - n) theta` and `j theta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrregularIndex {
    pub j: u64,
    /// Breakpoint nearest to `j theta`.
    pub crossing: usize,
    /// Set when `||n theta||` is not certified below half the smallest breakpoint gap.
    pub ambiguous: bool,
}

/// Cyclic distance from `t` to the nearest integer.
fn dist_to_integer(t: &Interval) -> Interval {
    let (r, _) = t.reduce_mod_one();
    r.abs()
}

fn is_irregular(gamma: &PiecewiseGamma, theta: &Interval, n: u64, j: u64) -> Result<bool> {
    Ok(gamma.selectors_at(&at(theta, j - n))? != gamma.selectors_at(&at(theta, j))?)
}

/// All `n`-irregular `j` in `[start, end]` (restricted to `j > n`).
pub fn irregular_indices(gamma: &PiecewiseGamma, theta: &Interval, n: u64, start: u64, end: u64) -> Result<Vec<IrregularIndex>> {
    if gamma.is_constant() {
        return Ok(Vec::new());
    }
    let step = dist_to_integer(&at(theta, n));
    let half_gap = gamma.min_gap().unwrap_or_else(Dyadic::one).mul_pow2(-1);
    let ambiguous = step.hi() >= &half_gap;
    let mut out = Vec::new();
    for j in start.max(n + 1)..=end {
        if !is_irregular(gamma, theta, n, j)? {
            continue;
        }
        let t = at(theta, j);
        let crossing = gamma
            .breakpoints
            .iter()
            .map(|b| dist_to_integer(&(&t - b)).mid())
            .enumerate()
            .min_by(|a, b| a.1.cmp(&b.1))
            .map(|(k, _)| k)
            .expect("non-constant selector has breakpoints");
        out.push(IrregularIndex { j, crossing, ambiguous });
    }
    Ok(out)
}

/// The least `n`-irregular `j` in `[start, end]`.
pub fn first_irregular(gamma: &PiecewiseGamma, theta: &Interval, n: u64, start: u64, end: u64) -> Result<Option<u64>> {
    if gamma.is_constant() {
        return Ok(None);
    }
    for j in start.max(n + 1)..=end {
        if is_irregular(gamma, theta, n, j)? {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

/// Number of breakpoints in `[0, 1)`.
pub fn discontinuity_count(gamma: &PiecewiseGamma) -> usize {
    gamma.breakpoints.len()
}

/// Irregular count in `(n, C n]` against the bound `D (C - 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityRow {
    pub n: u64,
    pub c: u64,
    pub count: usize,
    pub bound: usize,
    pub ambiguous: bool,
}

impl SparsityRow {
    pub fn within_bound(&self) -> bool {
        self.count <= self.bound
    }
}

pub fn sparsity_row(gamma: &PiecewiseGamma, theta: &Interval, n: u64, c: u64) -> Result<SparsityRow> {
    let found = irregular_indices(gamma, theta, n, n + 1, c * n)?;
    Ok(SparsityRow {
        n,
        c,
        count: found.len(),
        bound: discontinuity_count(gamma) * (c as usize).saturating_sub(1),
        ambiguous: found.iter().any(|i| i.ambiguous),
    })
}

/// First irregular index in `[M n, limit M n]` for each `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub n: u64,
    pub multiple: u64,
    pub first: Option<u64>,
}

impl GapRow {
    /// `first / (M n)`: any `c_0` above this makes `[M n, c_0 M n)` nonempty.
    pub fn ratio(&self) -> Option<f64> {
        self.first.map(|j| j as f64 / (self.multiple * self.n) as f64)
    }
}

pub fn gap_rows(gamma: &PiecewiseGamma, theta: &Interval, n: u64, max_multiple: u64, limit: u64) -> Result<Vec<GapRow>> {
    (1..=max_multiple)
        .map(|m| {
            let lo = m * n;
            let first = first_irregular(gamma, theta, n, lo, limit * lo)?;
            Ok(GapRow { n, multiple: m, first })
        })
        .collect()
}

/// Smallest `c_0` consistent with the rows, or `None` if some window had no irregular index.
pub fn fitted_gap_constant(rows: &[GapRow]) -> Option<f64> {
    rows.iter().map(GapRow::ratio).try_fold(1.0f64, |acc, r| r.map(|r| acc.max(r)))
}

/// `<gamma(t), rho^j>` summed over roots, with `rho^j` supplied.
fn pair(values: &[ComplexInterval], powers: &[ComplexInterval], prec: u32) -> ComplexInterval {
    values.iter().zip(powers).fold(ComplexInterval::zero(prec), |acc, (g, z)| &acc + &(g * z))
}

fn pow_step(powers: &mut [ComplexInterval], rho: &[ComplexInterval]) {
    for (p, r) in powers.iter_mut().zip(rho) {
        *p = &*p * r;
    }
}

/// Upper bound of `sum_i G_i |rho_i|^{J+1} / (1 - |rho_i|)` with `G_i = max |gamma_i|`.
fn tail_bound(gamma: &PiecewiseGamma, rho: &[ComplexInterval], last: u64, scale: i64, prec: u32) -> Result<Dyadic> {
    let one = Interval::one(prec);
    let mut total = Interval::zero(prec);
    for (i, r) in rho.iter().enumerate() {
        let modulus = r.abs();
        let g = gamma
            .values
            .iter()
            .map(|v| v[i].abs())
            .fold(Interval::zero(prec), |a, b| a.max_with(&b));
        let denom = &one - &modulus;
        if !denom.is_positive() {
            return Err(ModelError::DivergentTail);
        }
        let term = (&g * &modulus.pow(last + 1)).div(&denom).map_err(|_| ModelError::DivergentTail)?;
        total = &total + &term;
    }
    Ok(total.mul_pow2(scale).hi().clone())
}

fn widen(z: &ComplexInterval, rad: &Dyadic) -> ComplexInterval {
    ComplexInterval::new(z.re.inflate(rad), z.im.inflate(rad))
}

/// `Omega` truncated after `terms` terms, widened by the tail bound.
pub fn omega(gamma: &PiecewiseGamma, theta: &Interval, rho: &[ComplexInterval], terms: u64) -> Result<ComplexInterval> {
    let prec = theta.prec();
    let mut powers: Vec<ComplexInterval> = rho.to_vec();
    let mut acc = ComplexInterval::zero(prec);
    for j in 1..=terms {
        acc = &acc + &pair(gamma.eval(&at(theta, j))?, &powers, prec);
        pow_step(&mut powers, rho);
    }
    Ok(widen(&acc, &tail_bound(gamma, rho, terms, 0, prec)?))
}

/// `Omega_{n,b}`: exact for the first `b n` terms, then `n`-periodic.
pub fn omega_nb(gamma: &PiecewiseGamma, theta: &Interval, rho: &[ComplexInterval], n: u64, b: u64) -> Result<ComplexInterval> {
    if n == 0 {
        return Err(ModelError::Precondition("period must be positive".into()));
    }
    let prec = theta.prec();
    let d = rho.len();
    let mut head = vec![ComplexInterval::zero(prec); d];
    let mut block = vec![ComplexInterval::zero(prec); d];
    let mut powers: Vec<ComplexInterval> = rho.to_vec();
    for j in 1..=(b + 1) * n {
        let g = gamma.eval(&at(theta, j))?;
        let target = if j <= b * n { &mut head } else { &mut block };
        for i in 0..d {
            target[i] = &target[i] + &(&g[i] * &powers[i]);
        }
        pow_step(&mut powers, rho);
    }
    let one = ComplexInterval::one(prec);
    let mut acc = ComplexInterval::zero(prec);
    for i in 0..d {
        let denom = &one - &rho[i].pow(n);
        let periodic = block[i].div(&denom).map_err(|_| ModelError::DenominatorNearZero)?;
        acc = &(&acc + &head[i]) + &periodic;
    }
    Ok(acc)
}

/// `sum_{j > (b+1) n} <gamma(j theta) - gamma(j~ theta), rho^j>` with `j~` the
/// representative of `j mod n` in `(b n, (b+1) n]`, truncated after `terms`.
/// Also returns the first index with a nonzero coefficient.
pub fn omega_remainder(
    gamma: &PiecewiseGamma,
    theta: &Interval,
    rho: &[ComplexInterval],
    n: u64,
    b: u64,
    terms: u64,
) -> Result<(ComplexInterval, Option<u64>)> {
    let prec = theta.prec();
    let start = (b + 1) * n;
    let mut powers: Vec<ComplexInterval> = rho.iter().map(|r| r.pow(start + 1)).collect();
    let mut acc = ComplexInterval::zero(prec);
    let mut first = None;
    for j in start + 1..=terms.max(start + 1) {
        let reduced = b * n + 1 + (j - 1) % n;
        let (here, there) = (gamma.selectors_at(&at(theta, j))?, gamma.selectors_at(&at(theta, reduced))?);
        if here != there {
            first.get_or_insert(j);
            let (g, h) = (gamma.eval(&at(theta, j))?, gamma.eval(&at(theta, reduced))?);
            let diff: Vec<ComplexInterval> = g.iter().zip(h).map(|(x, y)| x - y).collect();
            acc = &acc + &pair(&diff, &powers, prec);
        }
        pow_step(&mut powers, rho);
    }
    Ok((widen(&acc, &tail_bound(gamma, rho, terms.max(start + 1), 1, prec)?), first))
}

/// Certified comparison of `Omega` with `Omega_{n,b}`.
#[derive(Clone, Debug)]
pub struct OmegaComparison {
    pub n: u64,
    pub b: u64,
    pub omega: ComplexInterval,
    pub approximant: ComplexInterval,
    /// The remainder summed directly over the irregular positions.
    pub remainder: ComplexInterval,
    pub first_difference: Option<u64>,
    pub terms: u64,
    pub prec: u32,
}

impl OmegaComparison {
    /// `Omega > Omega_{n,b}` from the two independent enclosures.
    pub fn strictly_above(&self) -> bool {
        self.omega.re.gt(&self.approximant.re)
    }

    /// The remainder enclosure meets `Omega - Omega_{n,b}`.
    pub fn consistent(&self) -> bool {
        self.remainder.overlaps(&(&self.omega - &self.approximant))
    }

    /// `log2` of the remainder's upper bound, usable far below `f64` range.
    pub fn log2_distance(&self) -> i64 {
        log2_upper(&self.remainder.re.mag())
    }

    /// Whether the direct enclosures are too wide to separate by the remainder's size.
    fn underresolved(&self) -> bool {
        let spread = self.omega.re.width().add(&self.approximant.re.width());
        self.remainder.re.is_positive() && &spread >= self.remainder.re.lo()
    }
}

fn log2_upper(x: &Dyadic) -> i64 {
    if x.is_zero() {
        i64::MIN / 2
    } else {
        x.magnitude()
    }
}

/// Largest `|rho_i|`, as an `f64` upper estimate.
fn max_modulus(rho: &[ComplexInterval]) -> f64 {
    rho.iter().map(|z| z.abs().hi().to_f64()).fold(0.0, f64::max)
}

/// Compares `Omega` with `Omega_{n,b}`, raising precision and the truncation
/// point until both the remainder and the direct enclosures are resolved.
pub fn omega_approximants(setup: &LabSetup, n: u64, b: u64) -> Result<OmegaComparison> {
    let ceiling = precision_ceiling();
    let mut current = setup.clone();
    let mut extra: u64 = 64;
    loop {
        let theta = current.angle()?;
        let rho = current.rho();
        let prec = current.prec();
        let decay = -max_modulus(&rho).log2();
        if !(decay.is_finite() && decay > 0.0) {
            return Err(ModelError::DivergentTail);
        }
        let start = (b + 1) * n;
        let attempt = (|| -> Result<Option<OmegaComparison>> {
            let probe = start + extra + (64.0 / decay) as u64;
            let (remainder, first) = omega_remainder(&current.gamma, &theta, &rho, n, b, probe)?;
            let Some(first) = first else { return Ok(None) };
            if !remainder.re.is_positive() {
                return Ok(None);
            }
            // Enough bits to resolve the remainder and enough terms to push the tail below it.
            let size = log2_upper(remainder.re.lo());
            let need_bits = (-size).max(0) as u32 + 64;
            if need_bits > prec {
                return Err(ModelError::PrecisionCeiling(prec));
            }
            let terms = first.max(probe) + ((24 - size.min(0)) as f64 / decay).ceil() as u64;
            let omega = omega(&current.gamma, &theta, &rho, terms)?;
            let approximant = omega_nb(&current.gamma, &theta, &rho, n, b)?;
            let cmp = OmegaComparison { n, b, omega, approximant, remainder, first_difference: Some(first), terms, prec };
            if cmp.underresolved() && !cmp.strictly_above() {
                return Err(ModelError::PrecisionCeiling(prec));
            }
            Ok(Some(cmp))
        })();
        match attempt {
            Ok(Some(c)) => return Ok(c),
            Ok(None) if extra < 1 << 16 => extra *= 4,
            Ok(None) => {
                let theta = current.angle()?;
                let (remainder, first) = omega_remainder(&current.gamma, &theta, &rho, n, b, start + extra)?;
                let omega = omega(&current.gamma, &theta, &rho, start + extra)?;
                let approximant = omega_nb(&current.gamma, &theta, &rho, n, b)?;
                return Ok(OmegaComparison { n, b, omega, approximant, remainder, first_difference: first, terms: start + extra, prec });
            }
            Err(ModelError::OnBreakpoint) | Err(ModelError::PrecisionCeiling(_)) if current.prec() < ceiling => {
                let bits = (current.prec() * 2).min(ceiling);
                current = current.refine(bits)?;
            }
            Err(ModelError::OnBreakpoint) => return Err(ModelError::PrecisionCeiling(current.prec())),
            Err(e) => return Err(e),
        }
    }
}

/// Count of places where a sequence of distances fails to decrease.
pub fn monotonicity_violations(distances: &[f64]) -> usize {
    distances.windows(2).filter(|w| w[1] >= w[0]).count()
}

/// A nonzero coefficient of the monomial expansion of `Q_n (Omega - Omega_{n,0})`.
#[derive(Clone, Debug)]
pub struct ResidualTerm {
    pub alpha: Vec<u64>,
    pub zeta: ComplexInterval,
    /// `(i, a_i)` with `a_i > n`.
    pub irregular_component: (usize, u64),
    /// `-log |rho^alpha|`.
    pub norm: f64,
}

impl ResidualTerm {
    /// Exactly one entry exceeds `n`, the others are `0` or `n`.
    pub fn is_well_formed(&self, n: u64) -> bool {
        let (i, a) = self.irregular_component;
        a > n
            && self.alpha[i] == a
            && self.alpha.iter().enumerate().all(|(k, &v)| k == i || v == 0 || v == n)
    }
}

/// Whether `gamma_i` agrees between two selector choices for every root, decided
/// exactly from the integer polynomial `sum_v (u - u')^T adj(tI - M) v`.
fn selectors_agree_exactly(spectral: &SpectralData, gamma: &PiecewiseGamma, s: &[usize], t: &[usize]) -> bool {
    let dim = spectral.dim();
    let mut total = transdeg_core::IntPolynomial::zero();
    for (k, v) in gamma.v_set.iter().enumerate() {
        let w: Vec<BigInt> = (0..dim).map(|c| BigInt::from(gamma.u_set[s[k]][c] - gamma.u_set[t[k]][c])).collect();
        let vb: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        total = total.add(&spectral.matrix.bilinear_adjugate(&w, &vb));
    }
    total.is_zero()
}

/// Every term with `||alpha||_rho <= norm_cap`, for `N = 1` data.
pub fn residual_terms(setup: &LabSetup, n: u64, norm_cap: f64) -> Result<Vec<ResidualTerm>> {
    let gamma = &setup.gamma;
    if gamma.is_constant() || n == 0 {
        return Ok(Vec::new());
    }
    let theta = setup.angle()?;
    let rho = setup.rho();
    let d = rho.len();
    let logs: Vec<f64> = rho.iter().map(|z| -z.abs().to_f64().ln()).collect();
    let min_log = logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_j = (norm_cap / min_log).floor() as u64;
    let mut out = Vec::new();
    for j in n + 1..=max_j {
        let (s, t) = (gamma.selectors_at(&at(&theta, j))?, gamma.selectors_at(&at(&theta, j - n))?);
        if s == t || selectors_agree_exactly(&setup.spectral, gamma, s, t) {
            continue;
        }
        let (g, h) = (gamma.eval(&at(&theta, j))?, gamma.eval(&at(&theta, j - n))?);
        for i in 0..d {
            let others: Vec<usize> = (0..d).filter(|&k| k != i).collect();
            for mask in 0u32..1 << others.len() {
                let mut alpha = vec![0u64; d];
                alpha[i] = j;
                let mut flips = 0;
                for (bit, &k) in others.iter().enumerate() {
                    if mask >> bit & 1 == 1 {
                        alpha[k] = n;
                        flips += 1;
                    }
                }
                let norm: f64 = alpha.iter().zip(&logs).map(|(&a, &l)| a as f64 * l).sum();
                if norm > norm_cap {
                    continue;
                }
                let diff = &g[i] - &h[i];
                let zeta = if flips % 2 == 1 { -diff } else { diff };
                out.push(ResidualTerm { alpha, zeta, irregular_component: (i, j), norm });
            }
        }
    }
    Ok(out)
}

/// Certifies `|rho_i| < 1`, used by callers building custom weights.
pub fn rho_inside_unit_disk(rho: &[ComplexInterval]) -> bool {
    rho.iter().all(|z| z.abs().lt(&Interval::one(z.prec())))
}

/// Largest usable scale, `1 / |xi|^N` as an `f64`, for sizing `x`.
pub fn scale_limit(spectral: &SpectralData, power: u64) -> Result<f64> {
    let m = spectral.xi()?.abs().to_f64();
    Ok(m.powi(-(power.to_i32().unwrap_or(i32::MAX))))
}

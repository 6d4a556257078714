//! Replayable certificates for the hypotheses on the exponent matrix:
//! irreducibility and full symmetric Galois group of the characteristic
//! polynomial, a dominant conjugate eigenvalue pair, absence of angular
//! resonance, avoidance of the walls by forward orbits, and non-unit
//! selector ratios.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use transdeg_core::modp::{factor_pattern_mod_p, matrix_period_mod_p, reduce, ModPMatrix};
use transdeg_core::primes::{factorize, is_prime, primes_from};
use transdeg_core::{precision_ceiling, ComplexInterval, IntPolynomial, IntegerMatrix, RatPolynomial};

use crate::error::{ModelError, Result};
use crate::factory::sturm_real_root_count;
use crate::solver::{solve_dyndeg, SeriesSolveResult, SolveOptions};
use crate::spectral::{spectral_data, SpectralData};
use crate::toric::{canonical_primitive, LatticeVector, SupportData};

pub const TOOL_VERSION: &str = concat!("transdeg ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Irreducible,
    GaloisSd,
    LeadingPair,
    NoRealPower,
    ResonanceFree,
    ConeCondition,
    Discordance,
    Dyndeg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Proved,
    Refuted,
    Inconclusive,
}

/// A verdict with the data needed to re-derive it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub verdict: Verdict,
    pub evidence: Value,
    pub tool_version: String,
    pub parameters: Value,
}

impl Certificate {
    pub fn new(kind: CertificateKind, verdict: Verdict, evidence: Value, parameters: Value) -> Self {
        Certificate { kind, verdict, evidence, tool_version: TOOL_VERSION.to_string(), parameters }
    }

    pub fn is_proved(&self) -> bool {
        self.verdict == Verdict::Proved
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialize")
    }

    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Order in which candidate primes are tried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrimeOrder {
    Ascending,
    Shuffled(u64),
}

fn candidate_primes(start: u64, budget: usize, order: PrimeOrder) -> Vec<u64> {
    let mut primes = primes_from(start, budget);
    if let PrimeOrder::Shuffled(seed) = order {
        primes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    primes
}

fn order_json(order: PrimeOrder) -> Value {
    match order {
        PrimeOrder::Ascending => json!("ascending"),
        PrimeOrder::Shuffled(seed) => json!({ "shuffled": seed }),
    }
}

/// Irreducibility over the integers from a prime where the reduction stays irreducible.
pub fn certify_irreducible(p: &IntPolynomial, prime_budget: usize, order: PrimeOrder) -> Result<Certificate> {
    if !p.is_monic() {
        return Err(ModelError::Precondition("polynomial must be monic".into()));
    }
    let d = p.degree().filter(|&d| d >= 1).ok_or_else(|| ModelError::Precondition("degree must be positive".into()))?;
    let params = json!({ "polynomial": p.to_string(), "prime_budget": prime_budget, "prime_order": order_json(order) });
    if !p.is_squarefree() {
        let g = RatPolynomial::from_int(p).gcd(&RatPolynomial::from_int(&p.derivative()));
        return Ok(Certificate::new(
            CertificateKind::Irreducible,
            Verdict::Refuted,
            json!({ "reason": "repeated factor", "gcd_with_derivative": g.to_string() }),
            params,
        ));
    }
    for q in candidate_primes(2, prime_budget, order) {
        if let Ok(pattern) = factor_pattern_mod_p(p, q) {
            if pattern == [d] {
                return Ok(Certificate::new(
                    CertificateKind::Irreducible,
                    Verdict::Proved,
                    json!({ "witness_prime": q, "pattern": pattern }),
                    params,
                ));
            }
        }
    }
    Ok(Certificate::new(
        CertificateKind::Irreducible,
        Verdict::Inconclusive,
        json!({ "reason": "no witness prime within budget", "primes_tried": prime_budget }),
        params,
    ))
}

/// Full symmetric Galois group: transitivity plus a `(d-1)`-cycle and a transposition.
pub fn certify_galois_sd(p: &IntPolynomial, prime_budget: usize, order: PrimeOrder) -> Result<Certificate> {
    let d = p.deg();
    if d < 3 {
        return Err(ModelError::DimensionTooSmall(d));
    }
    let irreducible = certify_irreducible(p, prime_budget, order)?;
    let params = json!({ "polynomial": p.to_string(), "prime_budget": prime_budget, "prime_order": order_json(order) });
    if irreducible.verdict != Verdict::Proved {
        return Ok(Certificate::new(
            CertificateKind::GaloisSd,
            irreducible.verdict,
            json!({ "reason": "irreducibility not proved", "irreducible": irreducible.evidence }),
            params,
        ));
    }
    let mut long_cycle: Option<(u64, Vec<usize>)> = None;
    let mut transposition: Option<(u64, Vec<usize>)> = None;
    let mut cycle_pattern = vec![1, d - 1];
    cycle_pattern.sort_unstable();
    let mut transposition_pattern = vec![1; d - 2];
    transposition_pattern.push(2);
    for q in candidate_primes(3, prime_budget, order) {
        if let Ok(pattern) = factor_pattern_mod_p(p, q) {
            if long_cycle.is_none() && pattern == cycle_pattern {
                long_cycle = Some((q, pattern.clone()));
            }
            if transposition.is_none() && pattern == transposition_pattern {
                transposition = Some((q, pattern));
            }
        }
        if long_cycle.is_some() && transposition.is_some() {
            break;
        }
    }
    let verdict = if long_cycle.is_some() && transposition.is_some() { Verdict::Proved } else { Verdict::Inconclusive };
    Ok(Certificate::new(
        CertificateKind::GaloisSd,
        verdict,
        json!({
            "irreducible_witness": irreducible.evidence["witness_prime"],
            "long_cycle": long_cycle.map(|(q, pat)| json!({ "prime": q, "pattern": pat })),
            "transposition": transposition.map(|(q, pat)| json!({ "prime": q, "pattern": pat })),
        }),
        params,
    ))
}

fn interval_json(i: &transdeg_core::Interval) -> Value {
    json!([i.lo().to_exact_string(), i.hi().to_exact_string()])
}

fn complex_json(z: &ComplexInterval) -> Value {
    json!({ "re": interval_json(&z.re), "im": interval_json(&z.im) })
}

/// Two conjugate roots of strictly maximal modulus.
pub fn certify_leading_pair(spectral: &SpectralData) -> Certificate {
    let params = json!({ "char_poly": spectral.char_poly.to_string(), "target_log2": spectral.target_log2 });
    match spectral.leading_pair {
        Some((i, k)) => Certificate::new(
            CertificateKind::LeadingPair,
            Verdict::Proved,
            json!({
                "xi": complex_json(&spectral.roots[i]),
                "xi_conj": complex_json(&spectral.roots[k]),
                "rho": interval_json(&spectral.modulus_rho),
                "theta": spectral.theta.as_ref().map(interval_json),
                "prec": spectral.prec,
            }),
            params,
        ),
        None => Certificate::new(
            CertificateKind::LeadingPair,
            Verdict::Refuted,
            json!({ "reason": "a single real root has maximal modulus", "rho": interval_json(&spectral.modulus_rho) }),
            params,
        ),
    }
}

fn euler_phi(k: u64) -> u64 {
    factorize(k).iter().fold(k, |acc, &(p, _)| acc / p * (p - 1))
}

/// `Res_y(P(y), P(x y))`, whose roots are all ratios of roots of `P`.
pub fn ratio_resultant(p: &IntPolynomial) -> IntPolynomial {
    let d = p.deg();
    let points: Vec<(num_rational::BigRational, num_rational::BigRational)> = (1..=(d * d + 1) as i64)
        .map(|x| {
            let scaled = p.scale_variable(&BigInt::from(x));
            (num_rational::BigRational::from_integer(x.into()), num_rational::BigRational::from_integer(p.resultant(&scaled)))
        })
        .collect();
    RatPolynomial::interpolate(&points).to_integer().expect("resultant values interpolate to an integer polynomial")
}

/// The conjugate pair examined for resonance: the leading pair when certified,
/// otherwise the unique pair of non-real roots.
fn resonance_pair(spectral: &SpectralData) -> Option<(usize, usize)> {
    if let Some(pair) = spectral.leading_pair {
        return Some(pair);
    }
    let nonreal: Vec<usize> = (0..spectral.dim()).filter(|&i| !spectral.real[i]).collect();
    match nonreal.as_slice() {
        [i, k] if spectral.roots[*i].im.is_positive() => Some((*i, *k)),
        [i, k] => Some((*k, *i)),
        _ => None,
    }
}

/// `xi / conj xi` is not a root of unity, equivalently no power of `xi` is real.
pub fn certify_no_real_power(p: &IntPolynomial, spectral: &SpectralData) -> Result<Certificate> {
    if !p.is_squarefree() {
        return Err(ModelError::Precondition("polynomial must be squarefree".into()));
    }
    let d = p.deg();
    let (xi, xi_bar) =
        resonance_pair(spectral).ok_or_else(|| ModelError::Precondition("no distinguished conjugate pair".into()))?;
    let params = json!({ "polynomial": p.to_string() });
    let r = ratio_resultant(p);
    let trivial = IntPolynomial::from_i64(&[-1, 1]).pow(d as u32);
    let quotient = r.exact_div(&trivial).ok_or_else(|| ModelError::Precondition("ratio resultant lacks (x-1)^d".into()))?;
    let limit = (d * (d - 1)) as u64;
    let max_k = 2 * limit * limit + 2;
    let dividing: Vec<u64> =
        (1..=max_k).filter(|&k| euler_phi(k) <= limit).filter(|&k| IntPolynomial::cyclotomic(k).divides(&quotient)).collect();
    if dividing.is_empty() {
        return Ok(Certificate::new(
            CertificateKind::NoRealPower,
            Verdict::Proved,
            json!({ "ratio_resultant": r.to_string(), "cyclotomic_factors": Vec::<u64>::new(), "max_order_checked": max_k }),
            params,
        ));
    }
    // Some ratio is a primitive k-th root of unity. Decide whether it is xi / conj xi.
    let ceiling = precision_ceiling();
    let mut sp = spectral.clone();
    loop {
        let mut resonant = Vec::new();
        let mut ambiguous = false;
        for &k in &dividing {
            let powers: Vec<ComplexInterval> = sp.roots.iter().map(|z| z.pow(k)).collect();
            let candidates: Vec<(usize, usize)> = (0..d)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .filter(|&(i, j)| i != j && powers[i].overlaps(&powers[j]))
                .collect();
            let ours = candidates.contains(&(xi, xi_bar));
            let others = candidates.iter().any(|&(i, j)| (i, j) != (xi, xi_bar) && (i, j) != (xi_bar, xi));
            if ours && !others {
                resonant.push(k);
            } else if ours {
                ambiguous = true;
            }
        }
        if let Some(&k) = resonant.first() {
            return Ok(Certificate::new(
                CertificateKind::NoRealPower,
                Verdict::Refuted,
                json!({ "ratio_resultant": r.to_string(), "cyclotomic_factors": dividing, "root_of_unity_order": k }),
                params,
            ));
        }
        if !ambiguous {
            return Ok(Certificate::new(
                CertificateKind::NoRealPower,
                Verdict::Proved,
                json!({
                    "ratio_resultant": r.to_string(),
                    "cyclotomic_factors": dividing,
                    "separation_prec": sp.prec,
                }),
                params,
            ));
        }
        if sp.prec >= ceiling {
            return Ok(Certificate::new(
                CertificateKind::NoRealPower,
                Verdict::Inconclusive,
                json!({ "reason": "root powers not separated", "cyclotomic_factors": dividing }),
                params,
            ));
        }
        sp = sp.refine(sp.target_log2 * 2)?;
    }
}

/// Absence of angular resonance, via the symmetric-group argument or, in
/// dimension three, directly from the no-real-power certificate.
pub fn certify_resonance_free(
    p: &IntPolynomial,
    spectral: &SpectralData,
    galois: &Certificate,
    no_real_power: Option<&Certificate>,
) -> Result<Certificate> {
    let d = p.deg();
    let real_roots = sturm_real_root_count(p, None, None)?;
    let params = json!({ "polynomial": p.to_string() });
    let mut evidence = json!({
        "galois_sd": galois.verdict,
        "real_root_count": real_roots,
        "leading_pair": spectral.leading_pair.is_some(),
    });
    if real_roots > 1 {
        evidence["reason"] = json!("more than one real root");
        return Ok(Certificate::new(CertificateKind::ResonanceFree, Verdict::Refuted, evidence, params));
    }
    if d == 3 && spectral.leading_pair.is_some() {
        if let Some(c) = no_real_power {
            evidence["no_real_power"] = json!(c.verdict);
            if c.verdict == Verdict::Proved {
                evidence["route"] = json!("dimension three: no real power of the leading root");
                return Ok(Certificate::new(CertificateKind::ResonanceFree, Verdict::Proved, evidence, params));
            }
        }
    }
    let verdict = if galois.verdict == Verdict::Proved && spectral.leading_pair.is_some() {
        evidence["route"] = json!("symmetric Galois group with at most one real root and a dominant pair");
        Verdict::Proved
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate::new(CertificateKind::ResonanceFree, verdict, evidence, params))
}

/// Outcome for one recurrence `a_n = <u, A^n v>`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecurrenceVerdict {
    NonzeroAllN,
    /// `a_n != 0` for `1 <= n < bound`.
    NonzeroUpTo(String),
    /// `a_n = 0` at this `n >= 1`.
    ZeroAt(u64),
    /// The CRT bound reached so far, short of the target.
    BoundNotReached(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessPrime {
    pub p: u64,
    pub period: u64,
    pub zero_positions: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceStatus {
    pub normal_u: LatticeVector,
    pub start_v: LatticeVector,
    pub a0: String,
    pub verdict: RecurrenceVerdict,
    pub witness_primes: Vec<WitnessPrime>,
    /// Modulus and residues of the indices where a zero is still possible.
    pub combined_modulus: String,
    pub combined_residues: Vec<String>,
    pub combined_bound: String,
}

impl RecurrenceStatus {
    pub fn is_certified(&self, target: &BigInt) -> bool {
        match &self.verdict {
            RecurrenceVerdict::NonzeroAllN => true,
            RecurrenceVerdict::NonzeroUpTo(b) => b.parse::<BigInt>().map(|b| &b >= target).unwrap_or(false),
            _ => false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConeOptions {
    pub target_bound: BigInt,
    pub prime_budget: usize,
    pub period_cap: u64,
    /// Worker threads for prime scans; `None` uses the global pool.
    pub jobs: Option<usize>,
    /// Terms checked exactly before any modular scan.
    pub exact_prefix: usize,
    /// Largest residue set kept while combining congruences.
    pub residue_cap: usize,
    /// Zero positions stored per prime; primes with more are not combined.
    pub max_zeros_per_prime: usize,
}

impl Default for ConeOptions {
    fn default() -> Self {
        ConeOptions {
            target_bound: BigInt::from(10u32).pow(20),
            prime_budget: 500,
            period_cap: 1_000_000,
            jobs: None,
            exact_prefix: 64,
            residue_cap: 4096,
            max_zeros_per_prime: 16,
        }
    }
}

/// Zero positions over one full period of `<u, A^n v> mod p`, for every `(u, v)`;
/// `None` marks more than `max_zeros` zeros.
pub fn scan_prime(
    a: &IntegerMatrix,
    p: u64,
    period: u64,
    normals: &[LatticeVector],
    starts: &[LatticeVector],
    max_zeros: usize,
) -> Vec<Vec<Option<Vec<u64>>>> {
    let m = ModPMatrix::from_int(a, p);
    let d = a.dim();
    let red = |x: i64| reduce(&BigInt::from(x), p);
    let us: Vec<Vec<u64>> = normals.iter().map(|u| u.iter().map(|&x| red(x)).collect()).collect();
    let mut ws: Vec<Vec<u64>> = starts.iter().map(|v| v.iter().map(|&x| red(x)).collect()).collect();
    let mut zeros: Vec<Vec<Option<Vec<u64>>>> = vec![vec![Some(Vec::new()); starts.len()]; normals.len()];
    let entries: Vec<u64> = (0..d * d).map(|k| m.get(k / d, k % d)).collect();
    let mut next = vec![0u64; d];
    for n in 0..period {
        for (vi, w) in ws.iter().enumerate() {
            for (ui, u) in us.iter().enumerate() {
                let mut acc: u128 = 0;
                for k in 0..d {
                    acc += u[k] as u128 * w[k] as u128;
                }
                if acc % p as u128 == 0 {
                    if let Some(list) = &mut zeros[ui][vi] {
                        if list.len() >= max_zeros {
                            zeros[ui][vi] = None;
                        } else {
                            list.push(n);
                        }
                    }
                }
            }
        }
        for w in ws.iter_mut() {
            for (r, slot) in next.iter_mut().enumerate() {
                let mut acc: u128 = 0;
                for c in 0..d {
                    acc += entries[r * d + c] as u128 * w[c] as u128;
                }
                *slot = (acc % p as u128) as u64;
            }
            w.copy_from_slice(&next);
        }
    }
    zeros
}

struct CombineState {
    modulus: BigInt,
    residues: Vec<BigInt>,
    witnesses: Vec<WitnessPrime>,
    done: Option<RecurrenceVerdict>,
}

/// Intersects residue sets `{r mod m1}` and `{z mod m2}` into residues mod `lcm(m1, m2)`.
pub fn combine_residues(m1: &BigInt, r1: &[BigInt], m2: &BigInt, r2: &[BigInt], cap: usize) -> Option<(BigInt, Vec<BigInt>)> {
    let g = m1.gcd(m2);
    let l = m1 / &g * m2;
    let m1g = m1 / &g;
    let m2g = m2 / &g;
    // Inverse of m1/g modulo m2/g.
    let inv = if m2g.is_one() {
        BigInt::zero()
    } else {
        let e = m1g.extended_gcd(&m2g);
        e.x.mod_floor(&m2g)
    };
    let mut out = BTreeSet::new();
    for a in r1 {
        for b in r2 {
            let diff = b - a;
            if !(&diff).mod_floor(&g).is_zero() {
                continue;
            }
            let t = ((&diff / &g) * &inv).mod_floor(&m2g);
            out.insert((a + m1 * t).mod_floor(&l));
            if out.len() > cap {
                return None;
            }
        }
    }
    Some((l, out.into_iter().collect()))
}

fn first_positive(modulus: &BigInt, residues: &[BigInt]) -> BigInt {
    residues.iter().map(|r| if r.is_zero() { modulus.clone() } else { r.clone() }).min().unwrap_or_else(|| modulus.clone())
}

fn recurrence_value(powers: &[IntegerMatrix], u: &[i64], v: &[i64], n: usize) -> BigInt {
    let x = powers[n].mul_vec_i64(v);
    u.iter().zip(&x).map(|(&a, b)| b * a).sum()
}

/// Good primes with their periods, computed in parallel and returned in prime order.
fn periods_for(a: &IntegerMatrix, primes: &[u64], cap: u64) -> Vec<(u64, Option<u64>)> {
    primes
        .par_iter()
        .map(|&p| {
            let limit = cap.min(p - 1);
            let period = matrix_period_mod_p(a, p, limit).ok().filter(|&m| m <= limit);
            (p, period)
        })
        .collect()
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().expect("thread pool").install(f),
        None => f(),
    }
}

/// Forward orbits of `V` and the fan generators avoid every wall, certified
/// per recurrence by full-period scans modulo good primes.
pub fn certify_cone_condition(a: &IntegerMatrix, support: &SupportData, options: &ConeOptions) -> Result<(Certificate, Vec<RecurrenceStatus>)> {
    if !a.is_sl() {
        return Err(ModelError::NotSl(a.det().to_string()));
    }
    let normals = support.wall_normals.clone();
    let mut starts = support.v_set.clone();
    starts.extend(support.p_set.iter().cloned());
    let powers = crate::degree::matrix_powers(a, options.exact_prefix);

    let mut states: Vec<CombineState> = Vec::new();
    let mut a0s = Vec::new();
    for u in &normals {
        for v in &starts {
            let a0 = recurrence_value(&powers, u, v, 0);
            let zero_at = (1..=options.exact_prefix).find(|&n| recurrence_value(&powers, u, v, n).is_zero());
            states.push(CombineState {
                modulus: BigInt::one(),
                residues: vec![BigInt::zero()],
                witnesses: Vec::new(),
                done: zero_at.map(|n| RecurrenceVerdict::ZeroAt(n as u64)),
            });
            a0s.push(a0);
        }
    }

    let primes = primes_from(3, options.prime_budget);
    let batch = 32;
    let mut primes_scanned = 0usize;
    for chunk in primes.chunks(batch) {
        if states.iter().all(|s| s.done.is_some()) {
            break;
        }
        let scans: Vec<(u64, u64, Vec<Vec<Option<Vec<u64>>>>)> = with_pool(options.jobs, || {
            let periods = periods_for(a, chunk, options.period_cap);
            periods
                .into_par_iter()
                .filter_map(|(p, m)| m.map(|m| (p, m)))
                .map(|(p, m)| (p, m, scan_prime(a, p, m, &normals, &starts, options.max_zeros_per_prime)))
                .collect()
        });
        primes_scanned += chunk.len();
        for (p, m, table) in scans {
            for (ui, row) in table.iter().enumerate() {
                for (vi, zeros) in row.iter().enumerate() {
                    let state = &mut states[ui * starts.len() + vi];
                    if state.done.is_some() {
                        continue;
                    }
                    let Some(zeros) = zeros else { continue };
                    let zs: Vec<BigInt> = zeros.iter().map(|&z| BigInt::from(z)).collect();
                    let Some((modulus, residues)) =
                        combine_residues(&state.modulus, &state.residues, &BigInt::from(m), &zs, options.residue_cap)
                    else {
                        continue;
                    };
                    state.modulus = modulus;
                    state.residues = residues;
                    state.witnesses.push(WitnessPrime { p, period: m, zero_positions: zeros.clone() });
                    if zeros.is_empty() || state.residues.is_empty() {
                        state.done = Some(RecurrenceVerdict::NonzeroAllN);
                    } else {
                        let bound = first_positive(&state.modulus, &state.residues);
                        if bound >= options.target_bound {
                            state.done = Some(RecurrenceVerdict::NonzeroUpTo(bound.to_string()));
                        }
                    }
                }
            }
        }
    }

    let mut statuses = Vec::with_capacity(states.len());
    for (idx, state) in states.into_iter().enumerate() {
        let (ui, vi) = (idx / starts.len(), idx % starts.len());
        let bound = first_positive(&state.modulus, &state.residues);
        let verdict = state.done.unwrap_or_else(|| RecurrenceVerdict::BoundNotReached(bound.to_string()));
        statuses.push(RecurrenceStatus {
            normal_u: normals[ui].clone(),
            start_v: starts[vi].clone(),
            a0: a0s[idx].to_string(),
            verdict,
            witness_primes: state.witnesses,
            combined_modulus: state.modulus.to_string(),
            combined_residues: state.residues.iter().map(|r| r.to_string()).collect(),
            combined_bound: bound.to_string(),
        });
    }
    let refuted = statuses.iter().any(|s| matches!(s.verdict, RecurrenceVerdict::ZeroAt(_)));
    let all = statuses.iter().all(|s| s.is_certified(&options.target_bound));
    let verdict = if refuted {
        Verdict::Refuted
    } else if all {
        Verdict::Proved
    } else {
        Verdict::Inconclusive
    };
    let certificate = Certificate::new(
        CertificateKind::ConeCondition,
        verdict,
        json!({
            "recurrences": statuses,
            "primes_scanned": primes_scanned,
            "certified": statuses.iter().filter(|s| s.is_certified(&options.target_bound)).count(),
        }),
        json!({
            "matrix": a.to_string(),
            "target_bound": options.target_bound.to_string(),
            "prime_budget": options.prime_budget,
            "period_cap": options.period_cap,
            "exact_prefix": options.exact_prefix,
        }),
    );
    Ok((certificate, statuses))
}

/// Re-checks one witness prime: the period and the zero positions.
pub fn rescan_witness(a: &IntegerMatrix, u: &[i64], v: &[i64], witness: &WitnessPrime) -> bool {
    let m = ModPMatrix::from_int(a, witness.p);
    if !m.pow(witness.period).is_identity() {
        return false;
    }
    let table = scan_prime(a, witness.p, witness.period, &[u.to_vec()], &[v.to_vec()], usize::MAX);
    table[0][0].as_deref() == Some(&witness.zero_positions[..])
}

/// Orbit polynomial `prod (beta X - alpha)` over the ordered pairs of distinct roots,
/// recovered exactly from enclosures. The element is `alpha / beta` with both algebraic integers.
pub struct OrbitElement<'a> {
    pub label: String,
    pub alpha: Box<dyn Fn(&SpectralData, usize, usize) -> Result<ComplexInterval> + 'a>,
    pub beta: Box<dyn Fn(&SpectralData, usize, usize) -> Result<ComplexInterval> + 'a>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitOutcome {
    pub label: String,
    /// Integer coefficients of `prod (beta X - alpha)`, ascending.
    pub coefficients: Vec<String>,
    pub verdict: Verdict,
    pub reason: String,
    pub prec: u32,
}

fn ordered_pairs(d: usize) -> Vec<(usize, usize)> {
    (0..d).flat_map(|i| (0..d).map(move |k| (i, k))).filter(|&(i, k)| i != k).collect()
}

/// Exact integer orbit polynomial of an element, or `None` when enclosures are too wide.
fn orbit_polynomial(spectral: &SpectralData, element: &OrbitElement<'_>) -> Result<Option<IntPolynomial>> {
    let mut poly = vec![ComplexInterval::one(spectral.prec)];
    for (i, k) in ordered_pairs(spectral.dim()) {
        let alpha = (element.alpha)(spectral, i, k)?;
        let beta = (element.beta)(spectral, i, k)?;
        let mut next = vec![ComplexInterval::zero(spectral.prec); poly.len() + 1];
        for (j, c) in poly.iter().enumerate() {
            next[j + 1] = &next[j + 1] + &(c * &beta);
            next[j] = &next[j] - &(c * &alpha);
        }
        poly = next;
    }
    let mut coeffs = Vec::with_capacity(poly.len());
    for c in &poly {
        if !c.im.contains_zero() {
            return Err(ModelError::Precondition("orbit polynomial is not conjugation invariant".into()));
        }
        match c.re.unique_integer() {
            Some(n) if c.re.width_below_pow2(-1) && c.im.width_below_pow2(-1) => coeffs.push(n),
            _ => return Ok(None),
        }
    }
    Ok(Some(IntPolynomial::new(coeffs)))
}

/// Non-unit test on `prod (beta X - alpha)`: the monic orbit polynomial is
/// the quotient by its leading coefficient.
pub fn classify_orbit(q: &IntPolynomial) -> (Verdict, String) {
    let lead = q.leading();
    if lead.is_zero() {
        return (Verdict::Inconclusive, "vanishing denominator".into());
    }
    if let Some(j) = (0..=q.deg()).find(|&j| !q.coeff(j).is_multiple_of(&lead)) {
        return (Verdict::Proved, format!("coefficient {j} is not integral after normalizing"));
    }
    let constant = q.coeff(0) / &lead;
    if constant.abs().is_one() {
        (Verdict::Refuted, "monic integral orbit polynomial with unit constant term".into())
    } else {
        (Verdict::Proved, format!("norm {constant} is not a unit"))
    }
}

/// Certifies one element against escalating precision.
pub fn certify_orbit_element(spectral: &SpectralData, element: &OrbitElement<'_>) -> Result<OrbitOutcome> {
    let ceiling = precision_ceiling();
    let mut sp = spectral.clone();
    loop {
        if let Some(q) = orbit_polynomial(&sp, element)? {
            let (verdict, reason) = classify_orbit(&q);
            return Ok(OrbitOutcome {
                label: element.label.clone(),
                coefficients: q.coeffs().iter().map(|c| c.to_string()).collect(),
                verdict,
                reason,
                prec: sp.prec,
            });
        }
        if sp.prec >= ceiling {
            return Ok(OrbitOutcome {
                label: element.label.clone(),
                coefficients: Vec::new(),
                verdict: Verdict::Inconclusive,
                reason: "orbit coefficients not resolved at the precision ceiling".into(),
                prec: sp.prec,
            });
        }
        sp = sp.refine(sp.target_log2 * 2)?;
    }
}

/// Representatives of `V x D` up to sign and scale in each factor.
pub fn sigma_classes(support: &SupportData) -> Vec<(LatticeVector, LatticeVector)> {
    let canon = |set: &[LatticeVector]| -> Vec<LatticeVector> {
        let mut out: Vec<LatticeVector> = Vec::new();
        for x in set {
            let c = canonical_primitive(x);
            if !out.contains(&c) {
                out.push(c);
            }
        }
        out
    };
    let vs = canon(&support.v_set);
    let ws = canon(&support.d_set);
    vs.iter().flat_map(|v| ws.iter().map(move |w| (v.clone(), w.clone()))).collect()
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// `N_{w,v}(lambda_i) = w^T adj(lambda_i - M) v`.
fn adjugate_form(sp: &SpectralData, v: &[i64], w: &[i64], i: usize) -> ComplexInterval {
    sp.matrix.bilinear_adjugate(&to_big(w), &to_big(v)).eval_complex(&sp.roots[i])
}

/// Numerator and denominator of `sigma_{ik}(v, w) = -N(lambda_k) p'(lambda_i) / (N(lambda_i) p'(lambda_k))`.
fn sigma_parts(sp: &SpectralData, v: &[i64], w: &[i64], i: usize, k: usize) -> (ComplexInterval, ComplexInterval) {
    let alpha = -(&adjugate_form(sp, v, w, k) * &sp.derivative_at(i));
    let beta = &adjugate_form(sp, v, w, i) * &sp.derivative_at(k);
    (alpha, beta)
}

/// Every `sigma(v, w)` and every ratio of two classes with independent vector
/// pairs is not a unit. The spectral data must belong to `Y A Y^{-1}`.
pub fn certify_discordance(spectral: &SpectralData, support: &SupportData) -> Result<(Certificate, Vec<OrbitOutcome>)> {
    spectral.leading()?;
    let classes = sigma_classes(support);
    let mut elements: Vec<OrbitElement<'_>> = Vec::new();
    for (v, w) in &classes {
        let (v1, w1) = (v.clone(), w.clone());
        let (v2, w2) = (v.clone(), w.clone());
        elements.push(OrbitElement {
            label: format!("sigma(v={v:?}, w={w:?})"),
            alpha: Box::new(move |sp, i, k| Ok(sigma_parts(sp, &v1, &w1, i, k).0)),
            beta: Box::new(move |sp, i, k| Ok(sigma_parts(sp, &v2, &w2, i, k).1)),
        });
    }
    for a in 0..classes.len() {
        for b in a + 1..classes.len() {
            let (va, wa) = classes[a].clone();
            let (vb, wb) = classes[b].clone();
            let (va2, wa2, vb2, wb2) = (va.clone(), wa.clone(), vb.clone(), wb.clone());
            elements.push(OrbitElement {
                label: format!("sigma(v={va:?}, w={wa:?}) / sigma(v={vb:?}, w={wb:?})"),
                alpha: Box::new(move |sp, i, k| {
                    let (aa, _) = sigma_parts(sp, &va, &wa, i, k);
                    let (_, bb) = sigma_parts(sp, &vb, &wb, i, k);
                    Ok(&aa * &bb)
                }),
                beta: Box::new(move |sp, i, k| {
                    let (_, ba) = sigma_parts(sp, &va2, &wa2, i, k);
                    let (ab, _) = sigma_parts(sp, &vb2, &wb2, i, k);
                    Ok(&ba * &ab)
                }),
            });
        }
    }
    let outcomes: Vec<OrbitOutcome> = elements.iter().map(|e| certify_orbit_element(spectral, e)).collect::<Result<_>>()?;
    let verdict = if outcomes.iter().any(|o| o.verdict == Verdict::Refuted) {
        Verdict::Refuted
    } else if outcomes.iter().all(|o| o.verdict == Verdict::Proved) {
        Verdict::Proved
    } else {
        Verdict::Inconclusive
    };
    let certificate = Certificate::new(
        CertificateKind::Discordance,
        verdict,
        json!({ "sigma_classes": classes.len(), "elements": outcomes }),
        json!({ "matrix": spectral.matrix.to_string(), "target_log2": spectral.target_log2 }),
    );
    Ok((certificate, outcomes))
}

/// Discordance for `M = Y Atilde Y^{-1}`, recording the base matrix and conjugator.
pub fn certify_discordance_for(
    atilde: &IntegerMatrix,
    y: &IntegerMatrix,
    support: &SupportData,
) -> Result<(Certificate, Vec<OrbitOutcome>)> {
    if !y.is_unimodular() {
        return Err(ModelError::Precondition("conjugator must be unimodular".into()));
    }
    let m = atilde.conjugate_by(y)?;
    let spectral = spectral_data(&m, -128)?;
    let (mut certificate, outcomes) = certify_discordance(&spectral, support)?;
    certificate.parameters["base_matrix"] = json!(atilde.to_string());
    certificate.parameters["conjugator"] = json!(y.to_string());
    Ok((certificate, outcomes))
}

/// Dynamical degree of `g o h_{A^N}` as a certificate: proved when the
/// enclosures reach the requested widths.
pub fn certify_dyndeg(
    a: &IntegerMatrix,
    power: u64,
    support: &SupportData,
    options: &SolveOptions,
) -> Result<(Certificate, Option<SeriesSolveResult>)> {
    let params = json!({
        "matrix": a.to_string(),
        "power": power,
        "tolerance": options.tolerance,
        "residual_tolerance": options.residual_tolerance,
        "initial_terms": options.initial_terms,
        "max_terms": options.max_terms,
    });
    match solve_dyndeg(a, power, support, options) {
        Ok(result) => {
            let lambda = result.lambda_enclosure();
            let residual = result.residual_enclosure();
            let ok = lambda.width().to_f64() <= options.tolerance
                && residual.contains_zero()
                && residual.width().to_f64() <= options.residual_tolerance;
            let verdict = if ok { Verdict::Proved } else { Verdict::Inconclusive };
            let evidence = serde_json::to_value(&result).expect("result serializes");
            Ok((Certificate::new(CertificateKind::Dyndeg, verdict, evidence, params), Some(result)))
        }
        Err(ModelError::PrecisionCeiling(bits)) => {
            let evidence = json!({ "reason": format!("precision ceiling of {bits} bits reached") });
            Ok((Certificate::new(CertificateKind::Dyndeg, Verdict::Inconclusive, evidence, params), None))
        }
        Err(e) => Err(e),
    }
}

/// Replays a certificate from its recorded parameters and returns the fresh verdict.
pub fn replay(cert: &Certificate) -> Result<Certificate> {
    let poly = || -> Result<IntPolynomial> {
        cert.parameters["polynomial"]
            .as_str()
            .ok_or_else(|| ModelError::Precondition("missing polynomial".into()))?
            .parse::<IntPolynomial>()
            .map_err(|e| ModelError::Precondition(format!("bad polynomial: {e}")))
    };
    let matrix = || -> Result<IntegerMatrix> {
        cert.parameters["matrix"]
            .as_str()
            .ok_or_else(|| ModelError::Precondition("missing matrix".into()))?
            .parse::<IntegerMatrix>()
            .map_err(|e| ModelError::Precondition(format!("bad matrix: {e}")))
    };
    let budget = cert.parameters["prime_budget"].as_u64().unwrap_or(500) as usize;
    let order = match &cert.parameters["prime_order"] {
        Value::Object(m) => PrimeOrder::Shuffled(m.get("shuffled").and_then(|s| s.as_u64()).unwrap_or(0)),
        _ => PrimeOrder::Ascending,
    };
    match cert.kind {
        CertificateKind::Irreducible => {
            if let Some(q) = cert.evidence["witness_prime"].as_u64() {
                let p = poly()?;
                let ok = is_prime(q) && factor_pattern_mod_p(&p, q).map(|pat| pat == [p.deg()]).unwrap_or(false);
                let mut c = cert.clone();
                c.verdict = if ok { Verdict::Proved } else { Verdict::Inconclusive };
                return Ok(c);
            }
            certify_irreducible(&poly()?, budget, order)
        }
        CertificateKind::GaloisSd => certify_galois_sd(&poly()?, budget, order),
        CertificateKind::NoRealPower => {
            let p = poly()?;
            let sp = spectral_data(&IntegerMatrix::companion(&p)?, -128)?;
            certify_no_real_power(&p, &sp)
        }
        CertificateKind::ConeCondition => {
            let a = matrix()?;
            let support = crate::toric::canonical_sets(a.dim())?;
            let options = ConeOptions {
                target_bound: cert.parameters["target_bound"].as_str().and_then(|s| s.parse().ok()).unwrap_or_else(|| BigInt::from(10u32).pow(20)),
                prime_budget: budget,
                period_cap: cert.parameters["period_cap"].as_u64().unwrap_or(1_000_000),
                exact_prefix: cert.parameters["exact_prefix"].as_u64().unwrap_or(64) as usize,
                ..ConeOptions::default()
            };
            Ok(certify_cone_condition(&a, &support, &options)?.0)
        }
        CertificateKind::Discordance => {
            if let (Some(base), Some(y)) = (cert.parameters["base_matrix"].as_str(), cert.parameters["conjugator"].as_str()) {
                let parse = |s: &str| s.parse::<IntegerMatrix>().map_err(|e| ModelError::Precondition(format!("bad matrix: {e}")));
                let (base, y) = (parse(base)?, parse(y)?);
                let support = crate::toric::canonical_sets(base.dim())?;
                return Ok(certify_discordance_for(&base, &y, &support)?.0);
            }
            let a = matrix()?;
            let target = cert.parameters["target_log2"].as_i64().unwrap_or(-128);
            let sp = spectral_data(&a, target)?;
            let support = crate::toric::canonical_sets(a.dim())?;
            Ok(certify_discordance(&sp, &support)?.0)
        }
        CertificateKind::LeadingPair => {
            let p: IntPolynomial = cert.parameters["char_poly"]
                .as_str()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| ModelError::Precondition("missing char_poly".into()))?;
            let target = cert.parameters["target_log2"].as_i64().unwrap_or(-128);
            Ok(certify_leading_pair(&spectral_data(&IntegerMatrix::companion(&p)?, target)?))
        }
        CertificateKind::ResonanceFree => {
            let p = poly()?;
            let sp = spectral_data(&IntegerMatrix::companion(&p)?, -128)?;
            let galois = certify_galois_sd(&p, budget, order)?;
            let nrp = if p.deg() == 3 { Some(certify_no_real_power(&p, &sp)?) } else { None };
            certify_resonance_free(&p, &sp, &galois, nrp.as_ref())
        }
        CertificateKind::Dyndeg => {
            let a = matrix()?;
            let defaults = SolveOptions::default();
            let options = SolveOptions {
                tolerance: cert.parameters["tolerance"].as_f64().unwrap_or(defaults.tolerance),
                residual_tolerance: cert.parameters["residual_tolerance"].as_f64().unwrap_or(defaults.residual_tolerance),
                initial_terms: cert.parameters["initial_terms"].as_u64().map_or(defaults.initial_terms, |v| v as usize),
                max_terms: cert.parameters["max_terms"].as_u64().map_or(defaults.max_terms, |v| v as usize),
            };
            let power = cert.parameters["power"].as_u64().unwrap_or(1);
            let support = crate::toric::canonical_sets(a.dim())?;
            Ok(certify_dyndeg(&a, power, &support, &options)?.0)
        }
    }
}

/// Integer value of a small recurrence term, for spot checks.
pub fn recurrence_term(a: &IntegerMatrix, u: &[i64], v: &[i64], n: u64) -> BigInt {
    let x = a.pow(n).mul_vec_i64(v);
    u.iter().zip(&x).map(|(&c, y)| y * c).sum()
}

/// Converts a stored bound into an integer.
pub fn parse_bound(s: &str) -> Option<BigInt> {
    s.parse().ok()
}

/// Smallest index `n >= 1` allowed by the combined congruences, as `u64` when small.
pub fn bound_as_u64(s: &RecurrenceStatus) -> Option<u64> {
    s.combined_bound.parse::<BigInt>().ok().and_then(|b| b.to_u64())
}

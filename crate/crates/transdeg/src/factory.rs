//! Construction of characteristic polynomials, and hence companion matrices
//! in `SL_d(Z)`, that satisfy every hypothesis needed for a transcendental
//! first dynamical degree.
//!
//! Three local polynomials fix the factorization patterns modulo 2, 3 and a
//! prime `p = 1 mod 4`. Their CRT lift is then perturbed by a multiple of
//! `6p` that keeps the patterns and forces the archimedean shape: at most one
//! real root and exactly two roots, a conjugate pair, outside the unit disk.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use transdeg_core::modp::factor_pattern_mod_p;
use transdeg_core::primes::{inv_mod, is_prime, legendre};
use transdeg_core::roots::isolate_roots;
use transdeg_core::{precision_ceiling, IntPolynomial, IntegerMatrix, Interval, RatPolynomial};

use crate::certifier::{
    certify_galois_sd, certify_irreducible, certify_leading_pair, certify_no_real_power, certify_resonance_free,
    Certificate, PrimeOrder, Verdict,
};
use crate::error::{ModelError, Result};
use crate::spectral::spectral_data;

/// Number of real roots in `(lo, hi]`, with `None` for an infinite endpoint.
pub fn sturm_real_root_count(p: &IntPolynomial, lo: Option<&BigRational>, hi: Option<&BigRational>) -> Result<usize> {
    if p.is_zero() {
        return Err(ModelError::Precondition("zero polynomial".into()));
    }
    if !p.is_squarefree() {
        return Err(ModelError::NotSquarefree);
    }
    let mut chain = vec![RatPolynomial::from_int(p), RatPolynomial::from_int(&p.derivative())];
    while !chain.last().expect("chain is nonempty").is_zero() {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]).neg();
        chain.push(r);
    }
    chain.pop();
    let sign_at = |q: &RatPolynomial, x: Option<&BigRational>, toward_plus: bool| -> i32 {
        match x {
            Some(x) => {
                let v = q.eval(x);
                if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                }
            }
            None => {
                let lead = q.leading();
                let odd = q.deg() % 2 == 1;
                let s = if lead.is_positive() { 1 } else { -1 };
                if toward_plus || !odd {
                    s
                } else {
                    -s
                }
            }
        }
    };
    let variations = |x: Option<&BigRational>, plus: bool| -> usize {
        let signs: Vec<i32> = chain.iter().map(|q| sign_at(q, x, plus)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let v_lo = variations(lo, false);
    let v_hi = variations(hi, true);
    Ok(v_lo.saturating_sub(v_hi))
}

/// Number of roots strictly inside the unit circle.
pub fn unit_disk_root_count(p: &IntPolynomial) -> Result<usize> {
    if !p.is_squarefree() {
        return Err(ModelError::NotSquarefree);
    }
    let one = |prec| Interval::one(prec);
    let mut target = -64;
    loop {
        let roots = isolate_roots(p, target, precision_ceiling())?;
        let norms: Vec<Interval> = roots.roots.iter().map(|z| z.norm_sqr()).collect();
        if norms.iter().all(|n| n.lt(&one(roots.prec)) || n.gt(&one(roots.prec))) {
            return Ok(norms.iter().filter(|n| n.lt(&one(roots.prec))).count());
        }
        if roots.prec >= precision_ceiling() {
            return Err(ModelError::CircleStraddle);
        }
        target *= 2;
    }
}

/// Shape condition on the roots: the count of real roots, roots in the disk and
/// whether the two outside roots are a conjugate pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootShape {
    pub real_roots: usize,
    pub inside_unit_disk: usize,
    pub outside_pair_conjugate: bool,
}

impl RootShape {
    pub fn is_admissible(&self, d: usize) -> bool {
        self.real_roots == d % 2 && self.inside_unit_disk == d - 2 && self.outside_pair_conjugate
    }
}

pub fn root_shape(p: &IntPolynomial) -> Result<RootShape> {
    let d = p.deg();
    let real_roots = sturm_real_root_count(p, None, None)?;
    let inside = unit_disk_root_count(p)?;
    let mut outside_pair_conjugate = false;
    if inside + 2 == d {
        let roots = isolate_roots(p, -64, precision_ceiling())?;
        let one = Interval::one(roots.prec);
        let outside: Vec<usize> = (0..roots.len()).filter(|&i| roots.roots[i].norm_sqr().gt(&one)).collect();
        outside_pair_conjugate = outside.len() == 2
            && !roots.real[outside[0]]
            && roots.conjugate_index(outside[0]) == Some(outside[1]);
    }
    Ok(RootShape { real_roots, inside_unit_disk: inside, outside_pair_conjugate })
}

/// Choices made during construction, sufficient to rebuild the polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoryTrace {
    pub seed: u64,
    /// Irreducible modulo 2.
    pub local_mod2: Vec<u64>,
    /// Irreducible factor of degree `d - 1` modulo 3, and the root of the linear factor.
    pub local_mod3_factor: Vec<u64>,
    pub local_mod3_root: u64,
    /// The large prime, the non-residue and the root of the linear factor.
    pub prime: u64,
    pub non_residue: u64,
    pub local_modp_root: u64,
    pub local_modp: Vec<u64>,
    pub crt_lift: Vec<String>,
    /// Coefficients of the perturbation, each a multiple of `6p`.
    pub perturbation: (String, String),
    pub escalation_steps: u32,
    pub shape: RootShape,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactoryResult {
    pub polynomial: String,
    pub matrix: String,
    pub trace: FactoryTrace,
    pub certificates: Vec<Certificate>,
}

impl FactoryResult {
    pub fn polynomial(&self) -> IntPolynomial {
        self.polynomial.parse().expect("factory output parses")
    }

    pub fn all_proved(&self) -> bool {
        self.certificates.iter().all(Certificate::is_proved)
    }
}

fn mod_poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

fn to_int_poly(c: &[u64]) -> IntPolynomial {
    IntPolynomial::new(c.iter().map(|&x| BigInt::from(x)).collect())
}

/// A random monic polynomial of degree `deg` irreducible modulo `p`.
fn random_irreducible(rng: &mut ChaCha8Rng, deg: usize, p: u64) -> Vec<u64> {
    loop {
        let mut c: Vec<u64> = (0..deg).map(|_| rng.gen_range(0..p)).collect();
        c.push(1);
        if c[0] == 0 {
            continue;
        }
        if factor_pattern_mod_p(&to_int_poly(&c), p).map(|pat| pat == [deg]).unwrap_or(false) {
            return c;
        }
    }
}

fn factorial_mod(n: usize, p: u64) -> u64 {
    (1..=n as u64).fold(1, |acc, k| acc * k % p)
}

/// Final CRT lift: coefficients in `[0, 6p)` agreeing with all three local polynomials.
fn crt_lift(c2: &[u64], c3: &[u64], cp: &[u64], p: u64) -> Vec<BigInt> {
    let moduli = [BigInt::from(2), BigInt::from(3), BigInt::from(p)];
    let total: BigInt = moduli.iter().product();
    (0..c2.len())
        .map(|k| {
            let residues = [c2[k], c3[k], cp[k]];
            let mut x = BigInt::zero();
            for (m, r) in moduli.iter().zip(residues) {
                let other = &total / m;
                let inv = other.extended_gcd(m).x.mod_floor(m);
                x += BigInt::from(r) * &other * inv;
            }
            x.mod_floor(&total)
        })
        .collect()
}

/// Builds a polynomial of degree `d` whose companion matrix lies in `SL_d(Z)`
/// and satisfies every certified hypothesis. Deterministic in `seed`.
pub fn construct_polynomial(d: usize, seed: u64) -> Result<FactoryResult> {
    if d < 3 {
        return Err(ModelError::DimensionTooSmall(d));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Constant term (-1)^d makes the companion determinant equal to 1.
    let sign_even = d % 2 == 0;

    let local_mod2 = random_irreducible(&mut rng, d, 2);

    let mod3_factor = random_irreducible(&mut rng, d - 1, 3);
    // (-1)^d = b * c0 * (-1) modulo 3.
    let target3 = if sign_even { 2 } else { 1 };
    let local_mod3_root = target3 * inv_mod(mod3_factor[0], 3).expect("irreducible factor has nonzero constant") % 3;
    let local_mod3 = mod_poly_mul(&mod3_factor, &[(3 - local_mod3_root) % 3, 1], 3);

    let mut prime = 2 * d as u64 + 1;
    while !(is_prime(prime) && prime % 4 == 1) {
        prime += 1;
    }
    let non_residue = loop {
        let a = rng.gen_range(2..prime);
        if legendre(a, prime) == -1 {
            break a;
        }
    };
    // Constant term a b (-1)^(d-3) ((d-3)!)^2 must equal (-1)^d, so b = -(a ((d-3)!)^2)^(-1).
    let f = factorial_mod(d - 3, prime);
    let inv = inv_mod(non_residue * f % prime * f % prime, prime).expect("prime does not divide");
    let local_modp_root = (prime - inv) % prime;
    let mut local_modp = mod_poly_mul(&[(prime - non_residue) % prime, 0, 1], &[(prime - local_modp_root) % prime, 1], prime);
    for i in 1..=(d - 3) as u64 {
        local_modp = mod_poly_mul(&local_modp, &[(prime - i * i % prime) % prime, 1], prime);
    }

    let mut lift = crt_lift(&local_mod2, &local_mod3, &local_modp, prime);
    lift[0] = if sign_even { BigInt::one() } else { -BigInt::one() };
    let base = IntPolynomial::new(lift.clone());

    let step = BigInt::from(6 * prime);
    let low_power = if sign_even { 2 } else { 1 };
    let cap = &step << 40;
    let perturbed = |a: &BigInt, b: &BigInt| {
        let mut pert = vec![BigInt::zero(); d + 1];
        pert[d - 2] += a;
        pert[low_power] += b;
        base.add(&IntPolynomial::new(pert))
    };
    let real_target = d % 2;
    let mut steps = 0;
    // The low coefficient controls the real roots; the high one then pushes
    // all but two roots into the unit disk.
    let mut low = step.clone();
    let (candidate, shape, perturbation) = 'search: loop {
        if low > cap {
            return Err(ModelError::SearchExhausted(format!("perturbation exceeded 2^40 * {step}")));
        }
        let trial = perturbed(&low, &low);
        if !(trial.is_squarefree() && sturm_real_root_count(&trial, None, None)? == real_target) {
            steps += 1;
            low *= 2;
            continue;
        }
        let mut high = low.clone();
        while high <= cap {
            let candidate = perturbed(&high, &low);
            if candidate.is_squarefree() {
                let shape = root_shape(&candidate)?;
                if shape.is_admissible(d) {
                    break 'search (candidate, shape, (high.to_string(), low.to_string()));
                }
            }
            steps += 1;
            high *= 2;
        }
        low *= 2;
    };

    let certificates = certify_candidate(&candidate, PrimeOrder::Ascending)?;
    let matrix = IntegerMatrix::companion(&candidate)?;
    Ok(FactoryResult {
        polynomial: candidate.to_string(),
        matrix: matrix.to_string(),
        trace: FactoryTrace {
            seed,
            local_mod2,
            local_mod3_factor: mod3_factor,
            local_mod3_root,
            prime,
            non_residue,
            local_modp_root,
            local_modp,
            crt_lift: lift.iter().map(|c| c.to_string()).collect(),
            perturbation,
            escalation_steps: steps,
            shape,
        },
        certificates,
    })
}

/// Certificates of irreducibility, full Galois group, a dominant pair and
/// absence of angular resonance for a candidate characteristic polynomial.
pub fn certify_candidate(p: &IntPolynomial, order: PrimeOrder) -> Result<Vec<Certificate>> {
    let d = p.deg();
    let budget = 500;
    let irreducible = certify_irreducible(p, budget, order)?;
    let galois = certify_galois_sd(p, budget, order)?;
    let spectral = spectral_data(&IntegerMatrix::companion(p)?, -128)?;
    let leading = certify_leading_pair(&spectral);
    let no_real = if d == 3 { Some(certify_no_real_power(p, &spectral)?) } else { None };
    let resonance = certify_resonance_free(p, &spectral, &galois, no_real.as_ref())?;
    let mut out = vec![irreducible, galois, leading];
    out.extend(no_real);
    out.push(resonance);
    Ok(out)
}

/// True when the companion matrix of `p` lies in `SL_d(Z)`.
pub fn companion_is_sl(p: &IntPolynomial) -> bool {
    IntegerMatrix::companion(p).map(|m| m.is_sl()).unwrap_or(false)
}

/// Checks that `p` reduces to the recorded local polynomials.
pub fn matches_local_data(p: &IntPolynomial, trace: &FactoryTrace) -> bool {
    let reduce = |m: u64| -> Vec<u64> { p.coeffs().iter().map(|c| c.mod_floor(&BigInt::from(m)).try_into().unwrap_or(0)).collect() };
    let local3 = mod_poly_mul(&trace.local_mod3_factor, &[(3 - trace.local_mod3_root) % 3, 1], 3);
    reduce(2) == trace.local_mod2 && reduce(3) == local3 && reduce(trace.prime) == trace.local_modp
}

/// Whether every recorded certificate is proved.
pub fn verdicts_all_proved(certs: &[Certificate]) -> bool {
    certs.iter().all(|c| c.verdict == Verdict::Proved)
}

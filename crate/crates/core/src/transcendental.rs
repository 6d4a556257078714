//! Certified enclosures of pi, arctangent, complex arguments and `exp(2 pi i t)`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;

use crate::complex::ComplexInterval;
use crate::dyadic::Dyadic;
use crate::error::CoreError;
use crate::interval::Interval;

const GUARD: u32 = 32;

/// Series for `atan(x)` with `|x| <= 1/4`, evaluated over the interval.
fn atan_series(x: &Interval, prec: u32) -> Interval {
    let x2 = x.sqr();
    let mut power = x.clone();
    let mut sum = Interval::zero(prec);
    let mut k: u64 = 0;
    let tiny = Dyadic::pow2(-(prec as i64) - 4);
    loop {
        let term = power.div(&Interval::from_int(&BigInt::from(2 * k + 1), prec)).expect("odd divisor");
        sum = if k % 2 == 0 { &sum + &term } else { &sum - &term };
        power = &power * &x2;
        k += 1;
        // Alternating series with decreasing terms: the tail is bounded by the next term.
        if power.mag() < tiny {
            let rad = power.mag();
            return sum.inflate(&rad);
        }
    }
}

/// `atan` of an interval contained in `[-1, 1]`, after two argument halvings.
fn atan_unit(x: &Interval, prec: u32) -> Interval {
    let one = Interval::one(prec);
    let mut y = x.clone();
    for _ in 0..2 {
        let s = (&one + &y.sqr()).sqrt().expect("positive radicand");
        y = y.div(&(&one + &s)).expect("positive denominator");
    }
    atan_series(&y, prec).mul_pow2(2)
}

fn atan_point(x: &Dyadic, prec: u32) -> Interval {
    let one = Dyadic::one();
    let xi = Interval::point(x.clone(), prec);
    if x.abs() <= one {
        return atan_unit(&xi, prec);
    }
    let inv = xi.recip().expect("nonzero");
    let half_pi = pi(prec).mul_pow2(-1);
    let r = atan_unit(&inv, prec);
    if x.is_positive() {
        &half_pi - &r
    } else {
        &(-&half_pi) - &r
    }
}

/// Enclosure of `atan(x)`, using monotonicity at the endpoints.
pub fn atan(x: &Interval) -> Interval {
    let prec = x.prec() + GUARD;
    let lo = atan_point(x.lo(), prec);
    let hi = atan_point(x.hi(), prec);
    Interval::new(lo.lo().clone(), hi.hi().clone(), x.prec())
}

fn pi_uncached(prec: u32) -> Interval {
    let p = prec + GUARD;
    let fifth = Interval::one(p).div(&Interval::from_i64(5, p)).unwrap();
    let inv239 = Interval::one(p).div(&Interval::from_i64(239, p)).unwrap();
    let a = atan_series(&fifth, p).mul_pow2(4);
    let b = atan_series(&inv239, p).mul_pow2(2);
    (&a - &b).with_prec(prec)
}

/// Enclosure of pi at `prec` bits.
pub fn pi(prec: u32) -> Interval {
    static CACHE: Mutex<Option<HashMap<u32, Interval>>> = Mutex::new(None);
    let mut guard = CACHE.lock().expect("pi cache poisoned");
    let map = guard.get_or_insert_with(HashMap::new);
    map.entry(prec).or_insert_with(|| pi_uncached(prec)).clone()
}

/// `atan2(y, x)` in `(-pi, pi]` for a nonzero point.
fn atan2_point(y: &Dyadic, x: &Dyadic, prec: u32) -> Interval {
    if x.is_zero() {
        let h = pi(prec).mul_pow2(-1);
        return if y.is_positive() { h } else { -h };
    }
    let yi = Interval::point(y.clone(), prec);
    let xi = Interval::point(x.clone(), prec);
    let base = atan(&yi.div(&xi).expect("nonzero x"));
    if x.is_positive() {
        base
    } else if !y.is_negative() {
        &base + &pi(prec)
    } else {
        &base - &pi(prec)
    }
}

/// Enclosure of `arg(z) / (2 pi)`, as a representative whose lower end lies in `[0, 1)`.
pub fn arg_turns(z: &ComplexInterval) -> Result<Interval, CoreError> {
    if z.contains_zero() {
        return Err(CoreError::Invalid("argument of an enclosure containing zero".into()));
    }
    let prec = z.prec() + GUARD;
    let crosses_negative_axis = z.im.contains_zero() && z.re.hi().is_negative();
    let two_pi = pi(prec).mul_pow2(1);
    let corners = [
        (z.re.lo(), z.im.lo()),
        (z.re.lo(), z.im.hi()),
        (z.re.hi(), z.im.lo()),
        (z.re.hi(), z.im.hi()),
    ];
    let mut hull: Option<Interval> = None;
    for (x, y) in corners {
        if x.is_zero() && y.is_zero() {
            continue;
        }
        let mut a = atan2_point(y, x, prec);
        if crosses_negative_axis && y.is_negative() {
            a = &a + &two_pi;
        }
        hull = Some(match hull {
            None => a,
            Some(h) => h.hull(&a),
        });
    }
    let turns = hull.expect("some corner is nonzero").div(&two_pi)?;
    let k = turns.lo().floor();
    let shifted = &turns - &Interval::from_int(&k, prec);
    Ok(shifted.with_prec(z.prec()))
}

/// Enclosure of `exp(2 pi i t)`.
pub fn exp_i_turns(t: &Interval) -> ComplexInterval {
    let prec = t.prec() + GUARD;
    let (frac, _) = t.with_prec(prec).reduce_mod_one();
    let half = Dyadic::pow2(-1);
    let centered = if frac.mid() > half { &frac - &Interval::one(prec) } else { frac };
    let halvings = 4i64;
    let phi = (&centered * &pi(prec)).mul_pow2(1 - halvings);
    // Taylor series of exp(i phi) with |phi| <= pi / 8.
    let mut re = Interval::zero(prec);
    let mut im = Interval::zero(prec);
    let mut term = Interval::one(prec);
    let tiny = Dyadic::pow2(-(prec as i64) - 4);
    let mut k: u64 = 0;
    loop {
        match k % 4 {
            0 => re = &re + &term,
            1 => im = &im + &term,
            2 => re = &re - &term,
            _ => im = &im - &term,
        }
        k += 1;
        term = (&term * &phi).div(&Interval::from_int(&BigInt::from(k), prec)).expect("positive divisor");
        if term.mag() < tiny {
            // Lagrange remainder for cos and sin separately is at most |phi|^k / k!.
            let rad = term.mag();
            re = re.inflate(&rad);
            im = im.inflate(&rad);
            break;
        }
    }
    let mut z = ComplexInterval::new(re, im);
    for _ in 0..halvings {
        z = z.sqr();
    }
    z.with_prec(t.prec())
}

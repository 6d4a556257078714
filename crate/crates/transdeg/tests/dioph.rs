//! Convergents, irregular indices, the periodic approximants and residual terms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use transdeg::dioph::{
    convergents, convergents_of, irregular_indices, monotonicity_violations, omega, omega_approximants, omega_nb,
    residual_terms, sparsity_row, LabSetup, DEFAULT_SKIP,
};
use transdeg::spectral::{spectral_data, PiecewiseGamma};
use transdeg::toric::canonical_sets;
use transdeg::ModelError;
use transdeg_core::{ComplexInterval, Dyadic, IntegerMatrix, Interval};

fn conjugated() -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(&[&[-2, -2, 3], &[1, 0, -3], &[0, 1, 2]])
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn example_setup() -> LabSetup {
    let sp = spectral_data(&conjugated(), -128).unwrap();
    LabSetup::new(sp, &canonical_sets(3).unwrap(), rat(3, 4), 1).unwrap()
}

fn small_denominators(setup: &LabSetup, count: usize) -> Vec<u64> {
    let list = convergents_of(&setup.spectral, count).unwrap();
    list.denominators().iter().map(|n| n.to_u64().unwrap()).collect()
}

/// The example selector replaced by a single constant piece.
fn constant_gamma(setup: &LabSetup) -> PiecewiseGamma {
    let prec = setup.prec();
    let mut g = setup.gamma.clone();
    g.breakpoints.clear();
    g.selectors = vec![vec![0; g.v_set.len()]];
    g.values = vec![vec![
        ComplexInterval::from_int(&BigInt::from(2), prec),
        ComplexInterval::from_f64(0.5, -1.25, prec),
        ComplexInterval::from_f64(0.5, 1.25, prec),
    ]];
    g
}

#[test]
fn golden_ratio_has_unit_digits() {
    let prec = 256;
    let five = Interval::from_i64(5, prec);
    let phi = (&five.sqrt().unwrap() - &Interval::one(prec)).mul_pow2(-1);
    let list = convergents(&phi, 20).unwrap();
    assert_eq!(list.digits[0], BigInt::from(0));
    assert!(list.digits[1..].iter().all(|a| *a == BigInt::from(1)));
    // Denominators run through the Fibonacci numbers.
    let dens = list.denominators();
    for w in dens.windows(3) {
        assert_eq!(&w[0] + &w[1], w[2]);
    }
}

fn leading_convergents(theta: BigRational, count: usize) -> Vec<(i64, i64)> {
    let list = convergents(&Interval::from_rational(&theta, 160), count).unwrap();
    list.convergents.iter().map(|c| (c.m.to_i64().unwrap(), c.n.to_i64().unwrap())).collect()
}

#[test]
fn near_rational_angle() {
    let tiny = BigRational::new(BigInt::from(1), BigInt::from(1u64) << 80);
    // 1/3 - e = [0; 3, K] while 1/3 + e = [0; 2, 1, K].
    assert_eq!(leading_convergents(rat(1, 3) - &tiny, 2), vec![(0, 1), (1, 3)]);
    assert_eq!(leading_convergents(rat(1, 3) + &tiny, 3), vec![(0, 1), (1, 2), (1, 3)]);
}

#[test]
fn too_few_digits_hit_the_ceiling() {
    let theta = Interval::from_rational(&rat(1, 3), 16).inflate(&Dyadic::from_f64(1e-3));
    assert!(matches!(convergents(&theta, 10), Err(ModelError::PrecisionCeiling(_))));
}

#[test]
fn example_convergents_are_best_approximations() {
    let sp = spectral_data(&conjugated(), -128).unwrap();
    let list = convergents_of(&sp, 16).unwrap();
    let dens = list.denominators();
    assert!(dens.windows(2).all(|w| w[0] < w[1]));
    for i in 0..15 {
        assert!(list.certifies_first_kind(i), "i = {i}");
        assert_eq!(list.certifies_second_kind(i), Some(true), "i = {i}");
    }
    assert_eq!(list.certifies_second_kind(15), None);
}

#[test]
fn constant_selector_is_trivial() {
    let setup = example_setup();
    let gamma = constant_gamma(&setup);
    let theta = setup.angle().unwrap();
    let rho = setup.rho();
    assert!(irregular_indices(&gamma, &theta, 7, 8, 200).unwrap().is_empty());
    let row = sparsity_row(&gamma, &theta, 7, 3).unwrap();
    assert_eq!((row.count, row.bound), (0, 0));
    let full = omega(&gamma, &theta, &rho, 400).unwrap();
    for (n, b) in [(1, 0), (3, 0), (7, 2)] {
        assert!(full.overlaps(&omega_nb(&gamma, &theta, &rho, n, b).unwrap()), "n = {n}, b = {b}");
    }
    let trivial = LabSetup { gamma, ..setup };
    assert!(residual_terms(&trivial, 17, 100.0).unwrap().is_empty());
}

#[test]
fn empty_range_has_no_irregular_index() {
    let setup = example_setup();
    let theta = setup.angle().unwrap();
    assert_eq!(sparsity_row(&setup.gamma, &theta, 17, 1).unwrap().count, 0);
}

#[test]
fn example_irregular_counts_respect_the_bound() {
    let setup = example_setup();
    for n in small_denominators(&setup, 8).into_iter().skip(DEFAULT_SKIP) {
        for c in [2, 3] {
            let row = setup.escalate(|s| sparsity_row(&s.gamma, &s.angle()?, n, c)).unwrap();
            assert!(row.within_bound(), "{row:?}");
        }
    }
}

#[test]
fn example_omega_exceeds_periodic_approximant() {
    let setup = example_setup();
    let mut distances = Vec::new();
    for n in small_denominators(&setup, 6) {
        let cmp = omega_approximants(&setup, n, 0).unwrap();
        assert!(cmp.consistent(), "n = {n}");
        if n >= 3 {
            assert!(cmp.strictly_above(), "n = {n}");
        }
        distances.push(cmp.log2_distance() as f64);
    }
    assert!(monotonicity_violations(&distances) <= 3, "{distances:?}");
}

#[test]
fn example_residual_terms_are_well_formed() {
    let setup = example_setup();
    let n = 17;
    let terms = residual_terms(&setup, n, 3.0 * n as f64).unwrap();
    assert!(!terms.is_empty());
    for t in &terms {
        assert!(t.is_well_formed(n), "{:?}", t.alpha);
        assert!(!t.zeta.contains_zero());
        assert!(t.norm <= 3.0 * n as f64);
    }
}

#[test]
fn lab_preconditions() {
    let sp = spectral_data(&conjugated(), -64).unwrap();
    let s = canonical_sets(3).unwrap();
    for (x, power) in [(rat(3, 4), 0), (rat(0, 1), 1), (rat(-1, 2), 1), (rat(1, 1), 1)] {
        assert!(matches!(LabSetup::new(sp.clone(), &s, x, power), Err(ModelError::Precondition(_))));
    }
}

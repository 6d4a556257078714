//! Certified spectral data, the selector function and the series solver.

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use transdeg::degree::{degree_sequence, psi};
use transdeg::solver::{series_eval, solve_dyndeg, solve_series, SeriesProblem, SolveOptions, TailModel};
use transdeg::spectral::{gamma_function, psi_from_gamma, sigma, spectral_data};
use transdeg::toric::canonical_sets;
use transdeg::ModelError;
use transdeg_core::{ComplexInterval, Dyadic, IntPolynomial, IntegerMatrix, Interval};

fn base_matrix() -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(&[&[0, -1, 1], &[1, 0, 0], &[0, 1, 0]])
}

fn conjugated() -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(&[&[-2, -2, 3], &[1, 0, -3], &[0, 1, 2]])
}

fn example_matrix() -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(&[&[-3, -14, -12], &[4, 11, 6], &[-2, -4, -1]])
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn conjugation_reproduces_the_example() {
    let y = IntegerMatrix::from_i64_rows(&[&[1, -2, 3], &[0, 1, -2], &[0, 0, 1]]);
    assert_eq!(base_matrix().conjugate_by(&y).unwrap(), conjugated());
    assert_eq!(conjugated().pow(7), example_matrix());
}

#[test]
fn leading_root_and_angle() {
    let sp = spectral_data(&base_matrix(), -40).unwrap();
    let xi = sp.xi().unwrap();
    let expected = ComplexInterval::new(
        Interval::from_rational(&rat(-341164, 1_000_000), 64).inflate(&Dyadic::from_f64(1e-6)),
        Interval::from_rational(&rat(116154, 100_000), 64).inflate(&Dyadic::from_f64(1e-5)),
    );
    assert!(expected.contains(xi), "{:?}", xi.to_f64());
    let theta = sp.theta().unwrap();
    assert!(theta.width().to_f64() <= 1e-6);
    assert!((theta.to_f64() - 0.2954677).abs() < 1e-6);
    assert!((sp.modulus_rho.to_f64() - 1.2106).abs() < 1e-4);
}

#[test]
fn vieta_product_of_roots() {
    for a in [base_matrix(), conjugated(), example_matrix()] {
        let sp = spectral_data(&a, -80).unwrap();
        let prod = sp.roots.iter().skip(1).fold(sp.roots[0].clone(), |acc, z| &acc * z);
        assert!(prod.re.contains(&Dyadic::one()));
        assert!(prod.im.contains_zero());
    }
}

#[test]
fn real_spectrum_has_no_leading_pair() {
    let p: IntPolynomial = "t^3 - 6t^2 + 11t - 6".parse().unwrap();
    let sp = spectral_data(&IntegerMatrix::companion(&p).unwrap(), -60).unwrap();
    assert!(sp.leading_pair.is_none());
    assert!(sp.theta.is_none());
    assert_eq!(sp.real, vec![true; 3]);
}

#[test]
fn repeated_roots_are_rejected() {
    assert_eq!(spectral_data(&IntegerMatrix::identity(3), -40).unwrap_err(), ModelError::NotSquarefree);
}

#[test]
fn sigma_properties() {
    let sp = spectral_data(&conjugated(), -100).unwrap();
    let support = canonical_sets(3).unwrap();
    let (i, k) = sp.leading().unwrap();
    for v in &support.v_set {
        for w in &support.d_set {
            let s = match sigma(&sp, v, w) {
                Ok(s) => s,
                Err(ModelError::DenominatorNearZero) => continue,
                Err(e) => panic!("{e}"),
            };
            assert!(s.abs().contains(&Dyadic::one()));
            let v2: Vec<i64> = v.iter().map(|x| 2 * x).collect();
            assert!(sigma(&sp, &v2, w).unwrap().overlaps(&s));
            let swapped = sp.sigma_pair(k, i, v, w).unwrap();
            assert!((&swapped * &s).overlaps(&ComplexInterval::one(sp.prec)));
        }
    }
    assert!(matches!(sigma(&sp, &[0, 0, 0], &[1, 0, 0]), Err(ModelError::Precondition(_))));
}

#[test]
fn selector_function_reproduces_psi() {
    let sp = spectral_data(&conjugated(), -128).unwrap();
    let s = canonical_sets(3).unwrap();
    let gamma = gamma_function(&sp, &s.u_set, &s.v_set, &s.d_set).unwrap();
    assert!(gamma.candidate_count <= 96);
    assert!(!gamma.is_constant());
    let j = 100;
    let value = psi_from_gamma(&sp, &gamma, j).unwrap();
    let exact = psi(&conjugated().pow(j), &s.u_set, &s.v_set);
    assert!(value.re.contains(&Dyadic::from_int(&exact)), "{} vs {:?}", exact, value.re.to_f64());
    assert!(value.re.width().to_f64() < 0.5);
    assert!(value.im.contains_zero());
}

fn geometric(r: i64) -> SeriesProblem {
    SeriesProblem::new(move |n| BigInt::from(r).pow(n as u32), TailModel::Proven {
        constant: Dyadic::one(),
        rho: Dyadic::from_i64(r),
    })
}

#[test]
fn synthetic_geometric_series() {
    for r in [2i64, 3, 5] {
        let res = solve_series(&mut geometric(r), &SolveOptions::default()).unwrap();
        let lambda = res.lambda_enclosure();
        assert!(lambda.contains(&Dyadic::from_i64(2 * r)), "r = {r}");
        assert!(lambda.width().to_f64() <= 1e-8);
        assert!(res.residual_enclosure().contains_zero());
        assert!(res.residual_enclosure().width().to_f64() <= 1e-10);
    }
}

#[test]
fn zero_stream_has_no_root() {
    let mut problem =
        SeriesProblem::new(|_| BigInt::from(0), TailModel::Proven { constant: Dyadic::zero(), rho: Dyadic::from_i64(2) });
    assert_eq!(solve_series(&mut problem, &SolveOptions::default()).unwrap_err(), ModelError::NoRootInRange);
}

#[test]
fn series_eval_matches_closed_form() {
    let coeffs: Vec<BigInt> = (0..30u32).map(|n| if n == 0 { BigInt::from(0) } else { BigInt::from(3).pow(n) }).collect();
    for (n, d) in [(1, 7), (1, 4), (2, 9), (3, 10)] {
        let x = rat(n, d);
        // sum_{k>=1} (3x)^k = 3x / (1 - 3x)
        let rx = &x * rat(3, 1);
        let exact = &rx / (rat(1, 1) - &rx);
        let s = series_eval(&coeffs[..], &Interval::from_rational(&x, 160), &Dyadic::one(), &Dyadic::from_i64(3)).unwrap();
        assert!(s.contains_rational(&exact), "x = {n}/{d}");
    }
}

#[test]
fn larger_coefficients_give_larger_root() {
    let small = solve_series(&mut geometric(2), &SolveOptions::default()).unwrap().lambda_enclosure();
    let mut bumped = SeriesProblem::new(
        |n| BigInt::from(2).pow(n as u32) + if n == 3 { 1 } else { 0 },
        TailModel::Proven { constant: Dyadic::from_i64(2), rho: Dyadic::from_i64(2) },
    );
    let big = solve_series(&mut bumped, &SolveOptions::default()).unwrap().lambda_enclosure();
    assert!(small.lt(&big));
}

#[test]
fn tighter_tolerance_nests() {
    let support = canonical_sets(3).unwrap();
    let mut previous: Option<Interval> = None;
    for tol in [1e-4, 1e-6, 1e-8] {
        let opts = SolveOptions { tolerance: tol, ..SolveOptions::default() };
        let lambda = solve_dyndeg(&conjugated(), 1, &support, &opts).unwrap().lambda_enclosure();
        assert!(lambda.width().to_f64() <= tol);
        if let Some(p) = &previous {
            assert!(p.contains_interval(&lambda));
        }
        previous = Some(lambda);
    }
}

#[test]
fn dynamical_degree_tracks_growth_ratio() {
    let support = canonical_sets(3).unwrap();
    let res = solve_dyndeg(&example_matrix(), 1, &support, &SolveOptions::default()).unwrap();
    let lambda = res.lambda_enclosure().to_f64();
    let seq = degree_sequence(&example_matrix(), &support, 25).unwrap();
    let ratio = (&seq.deg_f[25] * 1_000_000_000i64 / &seq.deg_f[24]).to_string().parse::<f64>().unwrap() / 1e9;
    assert!((ratio / lambda - 1.0).abs() < 0.01, "{ratio} vs {lambda}");
}

#[test]
fn power_zero_is_rejected() {
    let support = canonical_sets(3).unwrap();
    assert!(matches!(solve_dyndeg(&example_matrix(), 0, &support, &SolveOptions::default()), Err(ModelError::Precondition(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn geometric_root_is_enclosed(r in 2i64..40) {
        let lambda = solve_series(&mut geometric(r), &SolveOptions::default()).unwrap().lambda_enclosure();
        prop_assert!(lambda.contains(&Dyadic::from_i64(2 * r)));
    }
}

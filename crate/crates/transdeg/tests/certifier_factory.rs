//! Hypothesis certificates, their replay, and the polynomial factory.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transdeg::certifier::{
    certify_cone_condition, certify_discordance_for, certify_galois_sd, certify_irreducible, certify_leading_pair,
    certify_no_real_power, certify_orbit_element, certify_resonance_free, recurrence_term, replay, rescan_witness,
    Certificate, CertificateKind, ConeOptions, OrbitElement, PrimeOrder, RecurrenceVerdict, Verdict,
};
use transdeg::factory::{
    certify_candidate, companion_is_sl, construct_polynomial, matches_local_data, root_shape, sturm_real_root_count,
    unit_disk_root_count, verdicts_all_proved,
};
use transdeg::spectral::{spectral_data, SpectralData};
use transdeg::toric::canonical_sets;
use transdeg::ModelError;
use transdeg_core::modp::ModPMatrix;
use transdeg_core::primes::next_prime;
use transdeg_core::roots::isolate_roots;
use transdeg_core::{IntPolynomial, IntegerMatrix};

fn poly(s: &str) -> IntPolynomial {
    s.parse().unwrap()
}

fn base_matrix() -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(&[&[0, -1, 1], &[1, 0, 0], &[0, 1, 0]])
}

fn conjugator() -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(&[&[1, -2, 3], &[0, 1, -2], &[0, 0, 1]])
}

fn example_matrix() -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(&[&[-3, -14, -12], &[4, 11, 6], &[-2, -4, -1]])
}

fn spectral_of(p: &IntPolynomial) -> transdeg::spectral::SpectralData {
    spectral_data(&IntegerMatrix::companion(p).unwrap(), -128).unwrap()
}

fn assert_replays(cert: &Certificate) {
    let again = replay(cert).unwrap();
    assert_eq!(again.verdict, cert.verdict, "{:?}", cert.kind);
    assert_eq!(replay(cert).unwrap(), again, "{:?} replay is not deterministic", cert.kind);
    assert_eq!(Certificate::from_json(&cert.to_json()).unwrap(), *cert);
}

#[test]
fn irreducibility_examples() {
    let c = certify_irreducible(&poly("t^3 - t + 1"), 500, PrimeOrder::Ascending).unwrap();
    assert_eq!(c.verdict, Verdict::Proved);
    assert_eq!(c.evidence["witness_prime"], 2);
    assert_replays(&c);
    let reducible = certify_irreducible(&poly("t^2 - 1"), 50, PrimeOrder::Ascending).unwrap();
    assert_eq!(reducible.verdict, Verdict::Inconclusive);
    let example = certify_irreducible(&example_matrix().char_poly(), 500, PrimeOrder::Ascending).unwrap();
    assert_eq!(example.verdict, Verdict::Proved);
    assert_replays(&example);
}

#[test]
fn galois_examples() {
    let c = certify_galois_sd(&poly("t^3 - t + 1"), 500, PrimeOrder::Ascending).unwrap();
    assert_eq!(c.verdict, Verdict::Proved);
    assert!(c.evidence["long_cycle"]["prime"].as_u64().unwrap() <= 100);
    assert!(c.evidence["transposition"]["prime"].as_u64().unwrap() <= 100);
    assert_replays(&c);
    assert_eq!(
        certify_galois_sd(&poly("t^2 + 1"), 500, PrimeOrder::Ascending).unwrap_err(),
        ModelError::DimensionTooSmall(2)
    );
    // A cyclic cubic never shows a transposition.
    let cyclic = certify_galois_sd(&poly("t^3 - 3t + 1"), 200, PrimeOrder::Ascending).unwrap();
    assert_eq!(cyclic.verdict, Verdict::Inconclusive);
}

#[test]
fn no_real_power_examples() {
    let p = poly("t^3 - t + 1");
    let c = certify_no_real_power(&p, &spectral_of(&p)).unwrap();
    assert_eq!(c.verdict, Verdict::Proved);
    assert_replays(&c);

    // Roots 1, i, -i: equal moduli, so the pair is supplied from bare root enclosures.
    let q = poly("t^3 - t^2 + t - 1");
    let matrix = IntegerMatrix::companion(&q).unwrap();
    assert_eq!(spectral_data(&matrix, -64).unwrap_err(), ModelError::LeadingPairAmbiguous);
    let enc = isolate_roots(&q, -64, 4096).unwrap();
    let sp = SpectralData {
        matrix,
        char_poly: q.clone(),
        modulus_rho: enc.roots[0].abs(),
        roots: enc.roots,
        real: enc.real,
        leading_pair: None,
        theta: None,
        prec: enc.prec,
        target_log2: -64,
    };
    let refuted = certify_no_real_power(&q, &sp).unwrap();
    assert_eq!(refuted.verdict, Verdict::Refuted);
    assert_eq!(refuted.evidence["root_of_unity_order"], 2);
    let repeated = poly("t^3 - t^2 - t + 1");
    assert!(certify_no_real_power(&repeated, &spectral_of(&p)).is_err());
}

#[test]
fn resonance_examples() {
    let p = poly("t^3 + t - 1");
    let sp = spectral_of(&p);
    let galois = certify_galois_sd(&p, 500, PrimeOrder::Ascending).unwrap();
    let nrp = certify_no_real_power(&p, &sp).unwrap();
    let c = certify_resonance_free(&p, &sp, &galois, Some(&nrp)).unwrap();
    assert_eq!(c.verdict, Verdict::Proved);
    assert_replays(&c);

    // The dominant root of t^3 - t + 1 is real, so no route applies.
    let q = poly("t^3 - t + 1");
    let spq = spectral_of(&q);
    let gq = certify_galois_sd(&q, 500, PrimeOrder::Ascending).unwrap();
    let nq = certify_no_real_power(&q, &spq).unwrap();
    assert_eq!(certify_resonance_free(&q, &spq, &gq, Some(&nq)).unwrap().verdict, Verdict::Inconclusive);

    let three_real = poly("t^3 - 3t + 1");
    let sp3 = spectral_of(&three_real);
    let g3 = certify_galois_sd(&three_real, 200, PrimeOrder::Ascending).unwrap();
    assert_eq!(certify_resonance_free(&three_real, &sp3, &g3, None).unwrap().verdict, Verdict::Refuted);
}

#[test]
fn leading_pair_examples() {
    assert_eq!(certify_leading_pair(&spectral_of(&poly("t^3 + t - 1"))).verdict, Verdict::Proved);
    let c = certify_leading_pair(&spectral_of(&poly("t^3 - t + 1")));
    assert_eq!(c.verdict, Verdict::Refuted);
    assert_replays(&c);
}

#[test]
fn cone_condition_for_the_example() {
    let support = canonical_sets(3).unwrap();
    let (cert, statuses) = certify_cone_condition(&example_matrix(), &support, &ConeOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Proved);
    assert_eq!(statuses.len(), 48);
    let target = BigInt::from(10u32).pow(20);
    assert!(statuses.iter().all(|s| s.is_certified(&target)));
    assert_replays(&cert);

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let check_primes: Vec<u64> = {
        let mut p = 1u64 << 40;
        (0..3)
            .map(|_| {
                p = next_prime(p + 1);
                p
            })
            .collect()
    };
    for s in &statuses {
        for w in &s.witness_primes {
            assert!(rescan_witness(&example_matrix(), &s.normal_u, &s.start_v, w));
        }
        // Either one prime never vanishes or the zero classes of the witnesses are incompatible.
        if s.verdict == RecurrenceVerdict::NonzeroAllN {
            assert!(s.witness_primes.iter().any(|w| w.zero_positions.is_empty()) || s.combined_residues.is_empty());
        }
        // Nonzero modulo some prime proves a_n != 0.
        for _ in 0..100 {
            let n = rng.gen_range(1..=1_000_000u64);
            let nonzero = check_primes.iter().any(|&p| {
                let m = ModPMatrix::from_int(&example_matrix(), p).pow(n);
                let red = |x: i64| x.rem_euclid(p as i64) as u64;
                let mv: Vec<u64> = (0..3)
                    .map(|i| {
                        (0..3).fold(0u64, |acc, j| {
                            ((acc as u128 + m.get(i, j) as u128 * red(s.start_v[j]) as u128) % p as u128) as u64
                        })
                    })
                    .collect();
                let dot = (0..3).fold(0u128, |acc, i| (acc + red(s.normal_u[i]) as u128 * mv[i] as u128) % p as u128);
                dot != 0
            });
            assert!(nonzero, "{:?} {:?} at n = {n}", s.normal_u, s.start_v);
        }
    }
    // Recurrences that start at zero stay nonzero afterwards.
    let starting_at_zero: Vec<_> = statuses.iter().filter(|s| s.a0 == "0").collect();
    assert!(!starting_at_zero.is_empty());
    for s in starting_at_zero {
        let mut x: Vec<BigInt> = s.start_v.iter().map(|&c| BigInt::from(c)).collect();
        for n in 1..=10_000 {
            x = example_matrix().mul_vec(&x);
            let a: BigInt = x.iter().zip(&s.normal_u).map(|(c, &u)| c * u).sum();
            assert!(!a.is_zero(), "zero at n = {n}");
            if n <= 3 {
                assert_eq!(a, recurrence_term(&example_matrix(), &s.normal_u, &s.start_v, n));
            }
        }
    }
}

#[test]
fn cone_condition_refutes_the_identity() {
    let support = canonical_sets(3).unwrap();
    let (cert, statuses) = certify_cone_condition(&IntegerMatrix::identity(3), &support, &ConeOptions::default()).unwrap();
    assert_eq!(cert.verdict, Verdict::Refuted);
    assert!(statuses.iter().any(|s| s.verdict == RecurrenceVerdict::ZeroAt(1)));
    let not_sl = IntegerMatrix::from_i64_rows(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    assert!(matches!(certify_cone_condition(&not_sl, &support, &ConeOptions::default()), Err(ModelError::NotSl(_))));
}

#[test]
fn discordance_for_the_conjugated_example() {
    let support = canonical_sets(3).unwrap();
    let (cert, outcomes) = certify_discordance_for(&base_matrix(), &conjugator(), &support).unwrap();
    assert_eq!(cert.verdict, Verdict::Proved);
    assert_eq!(cert.kind, CertificateKind::Discordance);
    assert!(outcomes.iter().all(|o| o.verdict == Verdict::Proved));
    assert_replays(&cert);
    let singular = IntegerMatrix::from_i64_rows(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    assert!(certify_discordance_for(&base_matrix(), &singular, &support).is_err());
}

#[test]
fn eigenvalue_ratio_is_a_unit() {
    let sp = spectral_data(&base_matrix(), -128).unwrap();
    let element = OrbitElement {
        label: "lambda_i / lambda_k".into(),
        alpha: Box::new(|sp, i, _| Ok(sp.roots[i].clone())),
        beta: Box::new(|sp, _, k| Ok(sp.roots[k].clone())),
    };
    let outcome = certify_orbit_element(&sp, &element).unwrap();
    assert_eq!(outcome.verdict, Verdict::Refuted);
    let doubled = OrbitElement {
        label: "2 lambda_i / lambda_k".into(),
        alpha: Box::new(|sp, i, _| Ok(sp.roots[i].scale_int(&BigInt::from(2)))),
        beta: Box::new(|sp, _, k| Ok(sp.roots[k].clone())),
    };
    assert_eq!(certify_orbit_element(&sp, &doubled).unwrap().verdict, Verdict::Proved);
}

#[test]
fn sturm_examples() {
    assert_eq!(sturm_real_root_count(&poly("t^3 - t + 1"), None, None).unwrap(), 1);
    assert_eq!(sturm_real_root_count(&poly("t^2 + 1"), None, None).unwrap(), 0);
    let p = poly("t^3 - 6t^2 + 11t - 6");
    assert_eq!(sturm_real_root_count(&p, None, None).unwrap(), 3);
    let r = |n: i64| BigRational::from_integer(n.into());
    assert_eq!(sturm_real_root_count(&p, Some(&r(0)), Some(&r(2))).unwrap(), 2);
    assert_eq!(sturm_real_root_count(&p, Some(&r(1)), Some(&r(3))).unwrap(), 2);
    assert_eq!(sturm_real_root_count(&p, None, Some(&r(0))).unwrap(), 0);
}

#[test]
fn unit_disk_examples() {
    assert_eq!(unit_disk_root_count(&poly("t^3 + t - 1")).unwrap(), 1);
    assert_eq!(unit_disk_root_count(&poly("t^3 - t + 1")).unwrap(), 2);
    assert_eq!(unit_disk_root_count(&poly("t^4")).unwrap_err(), ModelError::NotSquarefree);
}

#[test]
fn factory_rejects_small_dimension() {
    assert_eq!(construct_polynomial(2, 0).unwrap_err(), ModelError::DimensionTooSmall(2));
}

#[test]
fn known_cubic_passes_as_a_candidate() {
    // The sign-corrected cubic carries every certificate; see the ledger on t^3 - t + 1.
    let certs = certify_candidate(&poly("t^3 + t - 1"), PrimeOrder::Ascending).unwrap();
    assert!(verdicts_all_proved(&certs));
    let original = certify_candidate(&poly("t^3 - t + 1"), PrimeOrder::Ascending).unwrap();
    assert!(!verdicts_all_proved(&original));
}

#[test]
fn factory_output_for_dimension_four() {
    let result = construct_polynomial(4, 0).unwrap();
    let p = result.polynomial();
    assert_eq!(p.deg(), 4);
    assert!(p.is_monic());
    assert_eq!(p.coeff(0), BigInt::from(1));
    assert!(companion_is_sl(&p));
    assert!(matches_local_data(&p, &result.trace));
    assert!(result.all_proved());
    assert!(root_shape(&p).unwrap().is_admissible(4));
    assert_eq!(unit_disk_root_count(&p).unwrap(), 2);
    assert!(verdicts_all_proved(&certify_candidate(&p, PrimeOrder::Shuffled(12345)).unwrap()));
    for c in &result.certificates {
        assert_replays(c);
    }
    assert_eq!(construct_polynomial(4, 0).unwrap(), result);
    let other: BTreeSet<String> = (1..3).map(|s| construct_polynomial(4, s).unwrap().polynomial).collect();
    for q in &other {
        assert!(companion_is_sl(&poly(q)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sturm_counts_distinct_integer_roots(roots in prop::collection::btree_set(-20i64..=20, 1..7), lo in -25i64..25, span in 0i64..30) {
        let p = roots.iter().fold(IntPolynomial::from_i64(&[1]), |acc, &r| acc.mul(&IntPolynomial::from_i64(&[-r, 1])));
        prop_assert_eq!(sturm_real_root_count(&p, None, None).unwrap(), roots.len());
        let hi = lo + span;
        let expected = roots.iter().filter(|&&r| r > lo && r <= hi).count();
        let (a, b) = (BigRational::from_integer(lo.into()), BigRational::from_integer(hi.into()));
        prop_assert_eq!(sturm_real_root_count(&p, Some(&a), Some(&b)).unwrap(), expected);
    }

    #[test]
    fn irreducibility_replay_is_order_independent(c1 in -9i64..=9, c2 in -9i64..=9, seed in 0u64..1000) {
        let p = IntPolynomial::from_i64(&[1, c1, c2, 1]);
        let asc = certify_irreducible(&p, 300, PrimeOrder::Ascending).unwrap();
        let shuffled = certify_irreducible(&p, 300, PrimeOrder::Shuffled(seed)).unwrap();
        // A witness prime exists exactly when no rational root does, for cubics.
        let has_root = [-1i64, 1].iter().any(|&r| 1 + c1 * r + c2 * r * r + r * r * r == 0);
        if has_root {
            prop_assert_ne!(asc.verdict, Verdict::Proved);
        } else {
            prop_assert_eq!(asc.verdict, Verdict::Proved);
            prop_assert_eq!(shuffled.verdict, Verdict::Proved);
        }
        prop_assert_eq!(replay(&asc).unwrap().verdict, asc.verdict);
    }
}

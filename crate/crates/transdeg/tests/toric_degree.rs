//! Canonical lattice data and exact degree sequences.

use num_bigint::BigInt;
use proptest::prelude::*;
use transdeg::degree::{
    degree_sequence, degrees_by_recursion, involution_step, is_submultiplicative, matrix_powers, measure_orbit, psi,
};
use transdeg::toric::{canonical_sets, involution_components, support_function_i64, LatticeMeasure};
use transdeg::ModelError;
use transdeg_core::IntegerMatrix;

fn example_matrix() -> IntegerMatrix {
    IntegerMatrix::from_i64_rows(&[&[-3, -14, -12], &[4, 11, 6], &[-2, -4, -1]])
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[test]
fn dimension_three_sets() {
    let s = canonical_sets(3).unwrap();
    assert_eq!(s.p_set, vec![vec![-1, -1, -1], vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    assert_eq!(s.u_set, vec![vec![0, 0, 0], vec![-1, 0, 0], vec![0, -1, 0], vec![0, 0, -1]]);
    assert_eq!(s.v_set, vec![vec![1, 1, 0], vec![0, 1, 1], vec![-1, -1, 0], vec![0, -1, -1]]);
    assert_eq!(s.d_set.len(), 12);
    assert_eq!(s.wall_normals.len(), 6);
}

#[test]
fn small_dimension_is_rejected() {
    assert_eq!(canonical_sets(2).unwrap_err(), ModelError::DimensionTooSmall(2));
    assert_eq!(involution_components(2).unwrap_err(), ModelError::DimensionTooSmall(2));
}

#[test]
fn set_invariants_for_dimensions_three_to_eight() {
    for d in 3..=8 {
        let s = canonical_sets(d).unwrap();
        assert_eq!(s.p_set.len(), d + 1);
        assert_eq!(s.u_set.len(), d + 1);
        assert_eq!(s.v_set.len(), d + 1);
        assert_eq!(s.d_set.len(), d * (d + 1));
        assert_eq!(s.wall_normals.len(), d * (d + 1) / 2);
        for set in [&s.p_set, &s.v_set] {
            for k in 0..d {
                assert_eq!(set.iter().map(|v| v[k]).sum::<i64>(), 0, "d = {d}");
            }
        }
        // Each wall normal vanishes on exactly d - 1 rays.
        for n in &s.wall_normals {
            let on_wall = s.p_set.iter().filter(|p| p.iter().zip(n).map(|(a, b)| a * b).sum::<i64>() == 0).count();
            assert_eq!(on_wall, d - 1);
        }
        let inv = involution_components(d).unwrap();
        for j in 0..=d {
            assert_eq!(inv.component_degree(j), d);
        }
    }
}

#[test]
fn support_function_values() {
    let s = canonical_sets(3).unwrap();
    assert_eq!(support_function_i64(&[-1, -1, -1], &s.u_set), 1);
    assert_eq!(support_function_i64(&[1, 0, 0], &s.u_set), 0);
    assert_eq!(support_function_i64(&[2, -5, 3], &s.u_set), 5);
}

#[test]
fn support_function_vanishes_exactly_on_the_orthant() {
    let s = canonical_sets(3).unwrap();
    for x in -3..=3 {
        for y in -3..=3 {
            for z in -3..=3 {
                let v = [x, y, z];
                let h = support_function_i64(&v, &s.u_set);
                assert!(h >= 0);
                assert_eq!(h == 0, v.iter().all(|&c| c >= 0), "{v:?}");
            }
        }
    }
}

#[test]
fn psi_examples() {
    let s = canonical_sets(3).unwrap();
    let id = IntegerMatrix::identity(3);
    let neg = IntegerMatrix::from_i64_rows(&[&[-1, 0, 0], &[0, -1, 0], &[0, 0, -1]]);
    assert_eq!(psi(&id, &s.u_set, &s.v_set), BigInt::from(2));
    assert_eq!(psi(&id, &s.u_set, &s.p_set), BigInt::from(1));
    assert_eq!(psi(&neg, &s.u_set, &s.p_set), BigInt::from(3));
    assert_eq!(psi(&example_matrix(), &s.u_set, &s.p_set), BigInt::from(50));
}

#[test]
fn involution_step_adds_the_involution_measure() {
    let s = canonical_sets(3).unwrap();
    let mu = LatticeMeasure::from_set(&s.p_set);
    let out = involution_step(&mu, &BigInt::from(2), &s.v_set).unwrap();
    assert_eq!(out.len(), 8);
    assert_eq!(out.total_mass(), BigInt::from(12));
    assert!(out.is_balanced(3));
    for v in &s.v_set {
        assert_eq!(out.weight(&big(v)), BigInt::from(2));
    }
    assert!(matches!(involution_step(&mu, &BigInt::from(0), &s.v_set), Err(ModelError::Precondition(_))));
}

#[test]
fn example_degree_sequence_is_frozen() {
    let s = canonical_sets(3).unwrap();
    let seq = degree_sequence(&example_matrix(), &s, 4).unwrap();
    let expect_f = [1i64, 150, 11838, 934866, 73830750];
    let expect_hf = [50i64, 3946, 311622, 24610250];
    assert_eq!(seq.deg_f, big(&expect_f));
    assert_eq!(seq.deg_hf[..4], big(&expect_hf)[..]);
}

#[test]
fn example_sequence_to_twenty_five() {
    let s = canonical_sets(3).unwrap();
    let seq = degree_sequence(&example_matrix(), &s, 25).unwrap();
    assert!(is_submultiplicative(&seq.deg_f));
    for m in measure_orbit(&example_matrix(), &s, 10).unwrap() {
        assert!(m.is_balanced(3));
    }
    // The involution functional is bounded against the monomial degree.
    let powers = matrix_powers(&example_matrix(), 40);
    for m in &powers[1..] {
        let pv = psi(m, &s.u_set, &s.v_set);
        let pp = psi(m, &s.u_set, &s.p_set);
        assert!(pv <= &pp * 4 && pp <= &pv * 4);
    }
}

#[test]
fn non_sl_matrix_is_rejected() {
    let s = canonical_sets(3).unwrap();
    let a = IntegerMatrix::from_i64_rows(&[&[2, 0, 0], &[0, 1, 0], &[0, 0, 1]]);
    assert!(matches!(degree_sequence(&a, &s, 3), Err(ModelError::NotSl(_))));
}

#[test]
fn recursion_with_trivial_functionals() {
    // Psi_P = 1, Psi_V = 0: the map is a linear automorphism.
    let ones = vec![BigInt::from(1); 6];
    let zeros = vec![BigInt::from(0); 6];
    let (f, hf) = degrees_by_recursion(&ones, &zeros, 4);
    assert_eq!(f, vec![BigInt::from(1); 5]);
    assert_eq!(hf, vec![BigInt::from(1); 5]);
}

fn arb_sl3() -> impl Strategy<Value = IntegerMatrix> {
    // Products of elementary matrices stay in SL_3(Z).
    prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 1..6).prop_map(|ops| {
        let mut m = IntegerMatrix::identity(3);
        for (i, j, c) in ops {
            if i != j {
                let mut rows = vec![vec![0i64; 3]; 3];
                for (k, r) in rows.iter_mut().enumerate() {
                    r[k] = 1;
                }
                rows[i][j] = c;
                let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
                m = m.mul(&IntegerMatrix::from_i64_rows(&refs));
            }
        }
        m
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn measures_stay_balanced_and_degrees_submultiplicative(a in arb_sl3()) {
        let s = canonical_sets(3).unwrap();
        let seq = degree_sequence(&a, &s, 8).unwrap();
        prop_assert!(is_submultiplicative(&seq.deg_f));
        for m in measure_orbit(&a, &s, 6).unwrap() {
            prop_assert!(m.is_balanced(3));
            prop_assert_eq!(m.integrate_support(&s.u_set) >= BigInt::from(1), true);
        }
    }

    #[test]
    fn psi_is_nonnegative(a in arb_sl3()) {
        let s = canonical_sets(3).unwrap();
        prop_assert!(psi(&a, &s.u_set, &s.v_set) >= BigInt::from(0));
        prop_assert!(psi(&a, &s.u_set, &s.p_set) >= BigInt::from(1));
    }
}

//! Oracle tests for exact cyclotomic arithmetic.
//!
//! Expected values below were derived by hand from the defining relations of
//! roots of unity and are frozen: `z_4^2 = -1`, `1 + z_3 + z_3^2 = 0`,
//! `z_8 * z_8^3 = -1`, and so on. The implementation must reproduce them
//! exactly, including canonicalization to the minimal conductor.

use naft_core::cyc::{solve_root_of_unity_scalar, CycNum};
use num_rational::BigRational;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

#[test]
fn square_of_fourth_root_is_minus_one() {
    let i = CycNum::root_of_unity(4, 1);
    let sq = &i * &i;
    assert_eq!(sq, CycNum::from_integer(-1));
    assert_eq!(sq.conductor(), 1, "canonical form of -1 lives at conductor 1");
}

#[test]
fn third_roots_sum_to_zero() {
    let z = CycNum::root_of_unity(3, 1);
    let sum = &(&CycNum::one() + &z) + &(&z * &z);
    assert!(sum.is_zero(), "1 + z3 + z3^2 must vanish, got {sum}");
}

#[test]
fn eighth_root_product_is_minus_one() {
    let a = CycNum::root_of_unity(8, 1);
    let b = CycNum::root_of_unity(8, 3);
    assert_eq!(&a * &b, CycNum::from_integer(-1));
}

#[test]
fn half_of_one_plus_minus_one_is_zero() {
    let val = (&CycNum::one() + &CycNum::root_of_unity(2, 1)).scale(&rat(1, 2));
    assert!(val.is_zero());
    assert_eq!(val.conductor(), 1);
}

#[test]
fn sixth_root_canonicalizes_to_conductor_three() {
    // z_6 = -z_3^2 = 1 + z_3 because 1 + z_3 + z_3^2 = 0.
    let z6 = CycNum::root_of_unity(6, 1);
    assert_eq!(z6.conductor(), 3, "conductor 2 mod 4 never survives");
    let expected = &CycNum::one() + &CycNum::root_of_unity(3, 1);
    assert_eq!(z6, expected);
    // Cross-check: its cube is -1 and its sixth power is 1.
    let cube = z6.pow(3);
    assert_eq!(cube, CycNum::from_integer(-1));
    assert!(z6.pow(6).is_one());
}

#[test]
fn ninth_root_cubed_deflates() {
    let z9 = CycNum::root_of_unity(9, 1);
    assert_eq!(z9.pow(3), CycNum::root_of_unity(3, 1));
    assert_eq!(z9.pow(3).conductor(), 3);
}

#[test]
fn conjugation_inverts_roots() {
    let z3 = CycNum::root_of_unity(3, 1);
    assert_eq!(z3.conjugate(), CycNum::root_of_unity(3, 2));
    let half = CycNum::from_ratio(1, 2);
    assert_eq!(half.conjugate(), half, "rationals are conjugation-fixed");
    let real = &CycNum::root_of_unity(5, 1) + &CycNum::root_of_unity(5, 4);
    assert_eq!(real.conjugate(), real, "z5 + z5^4 is real");
    assert_eq!(real.conductor(), 5);
}

#[test]
fn galois_maps_compose() {
    let x = &CycNum::root_of_unity(12, 1) + &CycNum::from_ratio(2, 3);
    let a = x.galois(5).unwrap();
    let b = a.galois(5).unwrap();
    assert_eq!(b, x, "sigma_5 on conductor 12 is an involution");
    assert_eq!(x.galois(11).unwrap(), x.conjugate());
    assert!(x.galois(4).is_err(), "galois exponent must be coprime");
}

#[test]
fn root_of_unity_normalizes_exponents() {
    assert_eq!(
        CycNum::root_of_unity(6, 2),
        CycNum::root_of_unity(3, 1),
        "z_6^2 = z_3"
    );
    assert_eq!(CycNum::root_of_unity(4, 2), CycNum::from_integer(-1));
    assert_eq!(CycNum::root_of_unity(5, -1), CycNum::root_of_unity(5, 4));
    assert_eq!(CycNum::root_of_unity(7, 14), CycNum::one());
    assert_eq!(CycNum::root_of_unity(1, 0), CycNum::one());
}

#[test]
fn geometric_sums_detect_divisibility() {
    for n in 1u64..=24 {
        for k in 0..n {
            let mut sum = CycNum::zero();
            for j in 0..n {
                sum += CycNum::root_of_unity(n, (j * k) as i64);
            }
            let expected = if k == 0 {
                CycNum::from_integer(n as i64)
            } else {
                CycNum::zero()
            };
            assert_eq!(sum, expected, "sum of z_{n}^(j*{k}) over j");
        }
    }
}

#[test]
fn inverses_multiply_to_one() {
    let z5 = CycNum::root_of_unity(5, 1);
    assert_eq!(&z5 * &z5.inv().unwrap(), CycNum::one());
    let x = &CycNum::one() + &CycNum::root_of_unity(3, 1);
    let y = x.inv().unwrap();
    assert!((&x * &y).is_one());
    assert!(CycNum::zero().inv().is_err());
    // A rational inverse stays rational.
    let r = CycNum::from_ratio(-3, 7);
    assert_eq!(r.inv().unwrap(), CycNum::from_ratio(-7, 3));
}

#[test]
fn rational_detection() {
    assert_eq!(CycNum::from_ratio(2, 4).as_rational(), Some(rat(1, 2)));
    assert_eq!(CycNum::root_of_unity(3, 1).as_rational(), None);
    let collapsed = &CycNum::root_of_unity(3, 1) + &CycNum::root_of_unity(3, 2);
    assert_eq!(collapsed.as_rational(), Some(rat(-1, 1)));
}

#[test]
fn mixed_conductor_arithmetic() {
    // z_4 * z_3 is a primitive 12th root: z_4 z_3 = z_12^(4+3)? In exponents
    // of z_12: z_4 = z_12^3, z_3 = z_12^4, so the product is z_12^7.
    let p = &CycNum::root_of_unity(4, 1) * &CycNum::root_of_unity(3, 1);
    assert_eq!(p, CycNum::root_of_unity(12, 7));
    assert_eq!(p.conductor(), 12);
    // Adding an element and its negation across conductors cancels.
    let q = &p - &CycNum::root_of_unity(12, 7);
    assert!(q.is_zero());
    assert_eq!(q.conductor(), 1);
}

#[test]
fn display_formats_are_stable() {
    assert_eq!(CycNum::zero().to_string(), "0");
    assert_eq!(CycNum::from_ratio(-5, 3).to_string(), "-5/3");
    assert_eq!(CycNum::root_of_unity(8, 3).to_string(), "z8^3");
    let x = &CycNum::from_integer(2) - &CycNum::root_of_unity(5, 2).scale(&rat(1, 3));
    assert_eq!(x.to_string(), "2 - 1/3*z5^2");
}

#[test]
fn json_round_trip_and_legacy_forms() {
    let x = &CycNum::root_of_unity(12, 7).scale(&rat(3, 2)) + &CycNum::from_ratio(-1, 5);
    let s = serde_json::to_string(&x).unwrap();
    let back: CycNum = serde_json::from_str(&s).unwrap();
    assert_eq!(back, x);

    // Integer coefficients may be written without a denominator.
    let y: CycNum = serde_json::from_str(r#"{"conductor": 4, "coeffs": {"1": "2"}}"#).unwrap();
    assert_eq!(y, CycNum::root_of_unity(4, 1).scale(&rat(2, 1)));

    // Non-canonical input is accepted and canonicalized: z_4^2 = -1.
    let z: CycNum = serde_json::from_str(r#"{"conductor": 4, "coeffs": {"2": "1"}}"#).unwrap();
    assert_eq!(z, CycNum::from_integer(-1));
    assert_eq!(z.conductor(), 1);

    // Zero serializes with empty coefficient map.
    let zero_json = serde_json::to_string(&CycNum::zero()).unwrap();
    let zero: CycNum = serde_json::from_str(&zero_json).unwrap();
    assert!(zero.is_zero());
}

#[test]
fn scalar_solver_finds_root_of_unity_ratio() {
    let lhs: Vec<CycNum> = (0..4)
        .map(|j| CycNum::root_of_unity(12, 3 * j + 4))
        .collect();
    let rhs: Vec<CycNum> = (0..4).map(|j| CycNum::root_of_unity(12, 3 * j)).collect();
    // lhs = z_12^4 * rhs = z_3 * rhs, and z_3 = (z_6)^2.
    assert_eq!(solve_root_of_unity_scalar(&lhs, &rhs, 6), Some(2));
    assert_eq!(solve_root_of_unity_scalar(&lhs, &rhs, 4), None);
    assert_eq!(solve_root_of_unity_scalar(&rhs, &rhs, 6), Some(0));
    // All-zero vectors are scalar-related with the trivial scalar.
    let zs = vec![CycNum::zero(); 2];
    assert_eq!(solve_root_of_unity_scalar(&zs, &zs, 5), Some(0));
}

#[test]
fn root_of_unity_decomposition_recovers_order() {
    let v = CycNum::root_of_unity(12, 7);
    assert_eq!(v.as_root_of_unity(), Some((12, 7)));
    assert_eq!(CycNum::one().as_root_of_unity(), Some((1, 0)));
    assert_eq!(CycNum::from_integer(-1).as_root_of_unity(), Some((2, 1)));
    assert_eq!(CycNum::from_integer(2).as_root_of_unity(), None);
    // 1 + z_5 has modulus 2cos(pi/5), not 1.
    let not_root = &CycNum::one() + &CycNum::root_of_unity(5, 1);
    assert_eq!(not_root.as_root_of_unity(), None);
    // 1 + z_3 on the other hand is exactly z_6, canonical at conductor 3.
    let z6 = &CycNum::one() + &CycNum::root_of_unity(3, 1);
    assert_eq!(z6.as_root_of_unity(), Some((6, 1)));
}

#[test]
fn hash_agrees_with_equality() {
    use std::collections::HashSet;
    let mut set = HashSet::new();
    set.insert(CycNum::root_of_unity(6, 1));
    // Same value constructed a different way.
    assert!(set.contains(&(&CycNum::one() + &CycNum::root_of_unity(3, 1))));
}

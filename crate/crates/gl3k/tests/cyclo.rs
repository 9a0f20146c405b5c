//! Contract tests for exact root-of-unity arithmetic.

use gl3k::cyclo::{
    cyclotomic_polynomial, fold_is_zero, ratio_to_f64, BigRational, CycloError, CycloValue,
    MAX_ORDER,
};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use num_complex::Complex64;
use proptest::prelude::*;

fn e(num: i64, den: u64) -> CycloValue {
    CycloValue::root_term(num, den).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn primitive_cube_roots_sum_to_minus_one() {
    let s = e(1, 3).add(&e(2, 3)).unwrap();
    let lhs = s.add(&CycloValue::from_integer(1)).unwrap();
    assert!(lhs.is_zero());
    // And not before adding 1:
    assert!(!s.is_zero());
    let z = s.to_complex();
    assert!((z.re + 1.0).abs() < 1e-14 && z.im.abs() < 1e-14);
}

#[test]
fn equal_roots_at_different_orders_cancel() {
    let d = e(2, 4).sub(&e(1, 2)).unwrap();
    assert!(d.is_zero());
    // Also when the redundancy is not removed by fraction reduction:
    // e(1/6)·e(1/6) = e(1/3) even though both factors live at order 6.
    let p = e(1, 6).mul(&e(1, 6)).unwrap();
    assert!(p.sub(&e(1, 3)).unwrap().is_zero());
}

#[test]
fn to_complex_matches_direct_evaluation() {
    // Value with a handful of terms and rational weights.
    let v = e(1, 8)
        .scale(&rat(3, 2))
        .add(&e(5, 12).scale(&rat(-7, 3)))
        .unwrap()
        .add(&CycloValue::from_integer(2))
        .unwrap();
    let direct = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 8.0) * 1.5
        + Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 5.0 / 12.0) * (-7.0 / 3.0)
        + Complex64::new(2.0, 0.0);
    let got = v.to_complex();
    let coeff_mass: f64 = v.coeffs().iter().map(|c| ratio_to_f64(c).abs()).sum();
    assert!((got - direct).norm() <= 1e-12 * coeff_mass.max(1.0));
}

#[test]
fn conjugation_matches_complex_conjugate() {
    let v = e(1, 5)
        .scale(&rat(2, 7))
        .add(&e(3, 20).scale(&rat(5, 1)))
        .unwrap();
    let lhs = v.conj().to_complex();
    let rhs = v.to_complex().conj();
    assert!((lhs - rhs).norm() < 1e-12);
}

#[test]
fn order_lcm_cap_is_enforced() {
    // 999983 and 999979 are distinct primes, so the product order would be
    // their product, far beyond the cap.
    let a = e(1, 999_983);
    let b = e(1, 999_979);
    match a.mul(&b) {
        Err(CycloError::OrderTooLarge(q)) => assert!(q > MAX_ORDER),
        other => panic!("expected OrderTooLarge, got {other:?}"),
    }
    match a.add(&b) {
        Err(CycloError::OrderTooLarge(_)) => {}
        other => panic!("expected OrderTooLarge, got {other:?}"),
    }
    assert!(CycloValue::root_term(1, 0).is_err());
    assert!(CycloValue::zero(0).is_err());
}

#[test]
fn phi_q_degree_and_known_coefficients() {
    for q in 1..=120u64 {
        let phi = cyclotomic_polynomial(q);
        assert_eq!(
            phi.len() as u64 - 1,
            gl3k::arith::euler_phi(q),
            "degree of Phi_{q}"
        );
        assert!(phi.last().unwrap().is_one(), "Phi_{q} must be monic");
    }
    // Phi_105 is the first with a coefficient of modulus 2 (at x^7).
    let p105 = cyclotomic_polynomial(105);
    assert_eq!(p105[7], BigInt::from(-2));
}

#[test]
fn fold_agrees_with_polynomial_zero_test_on_structured_values() {
    // Sum over all q-th roots of unity is 0 for q > 1; embed at order 2q.
    for q in [2u64, 3, 4, 6, 8, 9, 12, 30] {
        let qq = (2 * q) as usize;
        let mut v = vec![0i128; qq];
        for k in 0..q {
            v[(k * 2) as usize] += 5;
        }
        assert!(fold_is_zero(&v), "sum of {q}-th roots");
        v[1] += 1;
        assert!(!fold_is_zero(&v));
    }
}

/// Divisors of 360 — the sample space of root orders for the random
/// sweeps, keeping every joint order a divisor of 360 as well.
fn divisors_of_360() -> Vec<u64> {
    (1..=360).filter(|d| 360 % d == 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    /// `to_complex` is a ring homomorphism: it maps exact sums and products
    /// to complex sums and products (within floating-point roundoff).
    #[test]
    fn evaluation_is_a_ring_homomorphism(
        terms_a in proptest::collection::vec(
            (0i64..360, proptest::sample::select(divisors_of_360()), -9i64..=9, 1i64..=4), 1..4),
        terms_b in proptest::collection::vec(
            (0i64..360, proptest::sample::select(divisors_of_360()), -9i64..=9, 1i64..=4), 1..4),
    ) {
        let build = |terms: &[(i64, u64, i64, i64)]| -> CycloValue {
            let mut acc = CycloValue::zero(1).unwrap();
            for &(num, den, cn, cd) in terms {
                let t = CycloValue::root_term(num, den).unwrap().scale(&rat(cn, cd));
                acc = acc.add(&t).unwrap();
            }
            acc
        };
        let a = build(&terms_a);
        let b = build(&terms_b);
        let sum = a.add(&b).unwrap();
        let prod = a.mul(&b).unwrap();
        let (za, zb) = (a.to_complex(), b.to_complex());
        prop_assert!((sum.to_complex() - (za + zb)).norm() < 1e-9);
        prop_assert!((prod.to_complex() - za * zb).norm() < 1e-9);
    }

    /// The fast integer fold agrees with the polynomial-remainder zero test.
    #[test]
    fn fold_agrees_with_polynomial_zero_test(
        order in proptest::sample::select(vec![6u64, 8, 12, 18, 24, 30, 36, 60, 72]),
        entries in proptest::collection::vec((0usize..72, -5i128..=5), 0..8),
        make_zero in proptest::bool::ANY,
        p in proptest::sample::select(vec![2u64, 3, 5]),
    ) {
        let qu = order as usize;
        let mut v = vec![0i128; qu];
        if make_zero && order % p == 0 {
            // Shifted complete p-th root sums are zero.
            let step = qu / p as usize;
            for &(pos, c) in &entries {
                for i in 0..p as usize {
                    v[(pos + i * step) % qu] += c;
                }
            }
        } else {
            for &(pos, c) in &entries {
                v[pos % qu] += c;
            }
        }
        let mut exact = CycloValue::zero(order).unwrap();
        for (k, &c) in v.iter().enumerate() {
            if c != 0 {
                let t = CycloValue::root_term(k as i64, order).unwrap()
                    .scale(&BigRational::from_integer(BigInt::from(c)));
                exact = exact.add(&t).unwrap();
            }
        }
        prop_assert_eq!(fold_is_zero(&v), exact.is_zero());
    }

    /// Scaling by a nonzero rational never changes the zero test, and
    /// `conj` preserves it too.
    #[test]
    fn zero_test_invariances_prop(
        num in 0i64..24,
        den in proptest::sample::select(vec![1u64, 2, 3, 4, 6, 8, 12, 24]),
        cn in 1i64..20,
        cd in 1i64..20,
    ) {
        let v = CycloValue::root_term(num, den).unwrap()
            .sub(&CycloValue::root_term(num + den as i64, den).unwrap()).unwrap();
        // v is exactly zero by periodicity.
        prop_assert!(v.is_zero());
        prop_assert!(v.scale(&rat(cn, cd)).is_zero());
        prop_assert!(v.conj().is_zero());
        let w = CycloValue::root_term(1, 5).unwrap();
        prop_assert!(!w.scale(&rat(cn, cd)).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// The exact zero test and the floating-point magnitude agree: exact
    /// zeros evaluate below 1e-8 in modulus and exact nonzeros above it.
    #[test]
    fn zero_test_agrees_with_evaluation(
        terms in proptest::collection::vec(
            (0i64..360, proptest::sample::select(divisors_of_360()), -9i64..=9), 1..5),
        make_zero in proptest::bool::ANY,
        p in proptest::sample::select(vec![2u64, 3, 5]),
        shift in 0i64..30,
    ) {
        let v = if make_zero {
            // c · e(shift/30) · (sum of all p-th roots) is exactly zero.
            let mut s = CycloValue::zero(p).unwrap();
            for k in 0..p {
                s = s.add(&CycloValue::root_term(k as i64, p).unwrap()).unwrap();
            }
            s.mul(&CycloValue::root_term(shift, 30).unwrap()).unwrap()
                .scale(&rat(terms[0].2.max(1), 1))
        } else {
            let mut acc = CycloValue::zero(1).unwrap();
            for &(num, den, c) in &terms {
                let t = CycloValue::root_term(num, den).unwrap().scale(&rat(c, 1));
                acc = acc.add(&t).unwrap();
            }
            acc
        };
        let z = v.to_complex();
        if v.is_zero() {
            prop_assert!(z.norm() < 1e-8);
        } else {
            prop_assert!(z.norm() >= 1e-8,
                "claimed nonzero but evaluates to {z} (order {})", v.order());
        }
    }
}

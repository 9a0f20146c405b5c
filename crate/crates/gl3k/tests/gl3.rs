//! Contract tests for the rank-three long-element sums.

use gl3k::arith::gcd;
use gl3k::cyclo::{fold_is_zero, CycloValue};
use gl3k::gl3::{
    s_long_bruteforce, s_long_bruteforce_shifted, s_long_bruteforce_vector, s_long_crt,
    s_long_family_bruteforce, s_tilde, Gl3Error,
};
use gl3k::kloosterman::kloosterman;
use proptest::prelude::*;

fn assert_exact_eq(a: &CycloValue, b: &CycloValue, what: &str) {
    assert!(a.sub(b).unwrap().is_zero(), "{what}: {a} != {b}");
}

fn assert_integer_value(v: &CycloValue, expected: i64, what: &str) {
    assert_exact_eq(v, &CycloValue::from_integer(expected), what);
}

#[test]
fn frozen_values() {
    assert_integer_value(&s_long_bruteforce(1, 1, 1, 1, 2, 3), 2, "S(1,1,1,1;2,3)");
    assert_integer_value(&s_long_bruteforce(1, 1, 1, 1, 1, 1), 1, "S(1,1,1,1;1,1)");
    assert_integer_value(&s_long_bruteforce(1, 1, 1, 1, 4, 4), 6, "S(1,1,1,1;4,4)");
    assert_integer_value(&s_long_bruteforce(1, 2, 2, 1, 4, 4), 10, "S(1,2,2,1;4,4)");
    assert_integer_value(&s_long_bruteforce(1, 2, 3, 1, 6, 6), 1, "S(1,2,3,1;6,6)");
    assert_integer_value(&s_long_bruteforce(1, 1, 1, 1, 12, 18), 0, "S(1,1,1,1;12,18)");
    assert_integer_value(&s_long_bruteforce(1, 6, 6, 1, 12, 18), 24, "S(1,6,6,1;12,18)");
    assert_integer_value(
        &s_long_bruteforce(1, 12, 12, 1, 16, 16),
        96,
        "S(1,12,12,1;16,16)",
    );
    assert_integer_value(&s_long_bruteforce(1, 1, 2, 1, 8, 4), 0, "S(1,1,2,1;8,4)");
}

#[test]
fn prime_pair_diagonal_value() {
    // S(1, m, n, 1; p, p) = p + 1 whenever p divides neither m nor n.
    for p in [2u64, 3, 5, 7, 11] {
        for (m, n) in [(1i64, 1i64), (1, 2), (2, 3)] {
            if m as u64 % p == 0 || n as u64 % p == 0 {
                continue;
            }
            assert_integer_value(
                &s_long_bruteforce(1, m, n, 1, p, p),
                (p + 1) as i64,
                &format!("S(1,{m},{n},1;{p},{p})"),
            );
        }
    }
}

#[test]
fn one_sided_moduli_degenerate_to_classical_sums() {
    // (D, 1) collapses to the single classical sum S(m₁, n₁; D) and (1, D)
    // to S(m₂, n₂; D); both checked against the classical evaluator.
    for d in 2..=12u64 {
        for (m1, m2, n1, n2) in [(1i64, 1i64, 1i64, 1i64), (2, 3, 5, 7), (0, 1, 4, 1)] {
            let left = s_long_bruteforce(m1, m2, n1, n2, d, 1);
            assert_exact_eq(&left, &kloosterman(m1, n1, d), &format!("(D,1) d={d}"));
            let right = s_long_bruteforce(m1, m2, n1, n2, 1, d);
            assert_exact_eq(&right, &kloosterman(m2, n2, d), &format!("(1,D) d={d}"));
        }
    }
}

#[test]
fn family_walk_matches_single_evaluations() {
    let ms = [1i64, 2, 3, 5];
    let ns = [1i64, 2, 4];
    for (d1, d2) in [(4u64, 6u64), (9, 3), (8, 8), (5, 7), (12, 18)] {
        let fam = s_long_family_bruteforce(d1, d2, &ms, &ns);
        for (i, &m) in ms.iter().enumerate() {
            for (j, &n) in ns.iter().enumerate() {
                let single = s_long_bruteforce_vector(1, m, n, 1, d1, d2);
                assert_eq!(
                    fam[i * ns.len() + j],
                    single,
                    "family ({d1},{d2}) m={m} n={n}"
                );
            }
        }
    }
}

#[test]
fn crt_split_validation() {
    // Factor does not divide the modulus.
    assert!(matches!(
        s_long_crt(1, 1, 1, 1, 4, 9, 3, 1),
        Err(Gl3Error::InvalidSplit { .. })
    ));
    // Halves share a factor: 12 = 2·6 with gcd(2, 6) = 2.
    assert!(matches!(
        s_long_crt(1, 1, 1, 1, 12, 1, 2, 1),
        Err(Gl3Error::InvalidSplit { .. })
    ));
    assert!(matches!(
        s_long_crt(1, 1, 1, 1, 6, 6, 2, 3),
        Err(Gl3Error::InvalidSplit { .. })
    ));
    // Zero factor.
    assert!(matches!(
        s_long_crt(1, 1, 1, 1, 4, 9, 0, 9),
        Err(Gl3Error::InvalidSplit { .. })
    ));
}

#[test]
fn crt_split_examples() {
    // Trivial split: second factor is the empty pair (1,1) ⇒ product equals
    // the plain sum.
    let full = s_long_bruteforce(1, 2, 3, 1, 4, 9);
    let trivial = s_long_crt(1, 2, 3, 1, 4, 9, 4, 9).unwrap();
    assert_exact_eq(&trivial, &full, "trivial split (4,9)");
    // (4,9) splits as (4,1)×(1,9).
    let split = s_long_crt(1, 2, 3, 1, 4, 9, 4, 1).unwrap();
    assert_exact_eq(&split, &full, "split (4,9) = (4,1)x(1,9)");
}

#[test]
fn crt_split_matches_bruteforce() {
    // Mixed nontrivial splits across both moduli, including d₂ > 1 halves.
    let cases = [
        // (m1, m2, n1, n2, d1, d2, f1, f2)
        (1i64, 1i64, 1i64, 1i64, 4u64, 9u64, 4u64, 1u64),
        (1, 2, 3, 1, 6, 5, 2, 5),
        (2, 3, 1, 5, 12, 5, 4, 1),
        (1, 1, 2, 1, 20, 21, 4, 3),
        (1, 4, 2, 3, 8, 15, 8, 5),
        (3, 2, 5, 4, 9, 10, 9, 2),
    ];
    for (m1, m2, n1, n2, d1, d2, f1, f2) in cases {
        let full = s_long_bruteforce(m1, m2, n1, n2, d1, d2);
        let split = s_long_crt(m1, m2, n1, n2, d1, d2, f1, f2).unwrap();
        assert_exact_eq(
            &split,
            &full,
            &format!("crt S({m1},{m2},{n1},{n2};{d1},{d2}) at ({f1},{f2})"),
        );
    }
}

#[test]
fn coprime_moduli_factor_into_classical_sums() {
    // For gcd(D₁, D₂) = 1:
    // S(m₁,m₂,n₁,n₂;D₁,D₂) = S(m₁D₂, n₁; D₁) · S(n₂D₁, m₂; D₂).
    for d1 in 1..=10u64 {
        for d2 in 1..=10u64 {
            if gcd(d1, d2) != 1 {
                continue;
            }
            for (m, n) in [(1i64, 1i64), (2, 3)] {
                let lhs = s_long_bruteforce(1, m, n, 1, d1, d2);
                let rhs = kloosterman(d2 as i64, n, d1)
                    .mul(&kloosterman(d1 as i64, m, d2))
                    .unwrap();
                assert_exact_eq(&lhs, &rhs, &format!("coprime ({d1},{d2}) m={m} n={n}"));
            }
        }
    }
}

#[test]
fn s_tilde_requires_divisibility() {
    assert_eq!(
        s_tilde(1, 1, 1, 4, 6),
        Err(Gl3Error::DivisibilityViolated { d1: 4, d2: 6 })
    );
    assert!(matches!(
        s_tilde(1, 1, 1, 0, 6),
        Err(Gl3Error::DivisibilityViolated { .. })
    ));
}

#[test]
fn s_tilde_frozen_values() {
    let v = s_tilde(1, 2, 3, 2, 4).unwrap().to_complex();
    assert!((v.re - 2.0).abs() < 1e-10 && v.im.abs() < 1e-10, "got {v}");
    let v = s_tilde(2, 1, 1, 3, 9).unwrap().to_complex();
    assert!(
        (v.re + 1.5).abs() < 1e-10 && (v.im - 7.794228634059948).abs() < 1e-10,
        "got {v}"
    );
    let v = s_tilde(1, 1, 1, 4, 8).unwrap();
    assert!(v.is_zero(), "expected 0, got {v}");
}

#[test]
fn s_tilde_with_unit_first_modulus_is_ramanujan() {
    for q in 1..=20u64 {
        for m in [1i64, 2, 5] {
            let v = s_tilde(1, 1, m, 1, q).unwrap();
            let expect = gl3k::kloosterman::ramanujan(m, q);
            assert_exact_eq(
                &v,
                &CycloValue::from_integer(expect),
                &format!("s_tilde(…;1,{q}) m={m}"),
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    /// The defining sum does not depend on which (Y, Z) representative is
    /// used for each summand.
    #[test]
    fn yz_representative_independence(
        d1 in 1u64..=10,
        d2 in 1u64..=10,
        m1 in 0i64..6,
        m2 in 0i64..6,
        n1 in 0i64..6,
        n2 in 0i64..6,
        s1 in 0u64..40,
        s2 in 0u64..40,
    ) {
        let base = s_long_bruteforce_vector(m1, m2, n1, n2, d1, d2);
        let shifted = s_long_bruteforce_shifted(m1, m2, n1, n2, d1, d2, s1, s2);
        let diff: Vec<i128> = base.iter().zip(shifted.iter())
            .map(|(&a, &b)| a as i128 - b as i128).collect();
        prop_assert!(fold_is_zero(&diff), "shift ({s1},{s2}) changed the value");
    }

    /// Arguments matter only modulo their hosting modulus.
    #[test]
    fn argument_periodicity(
        d1 in 1u64..=12,
        d2 in 1u64..=12,
        m1 in 0i64..4,
        m2 in 0i64..4,
        n1 in 0i64..4,
        n2 in 0i64..4,
    ) {
        let a = s_long_bruteforce_vector(m1, m2, n1, n2, d1, d2);
        let b = s_long_bruteforce_vector(
            m1 + d1 as i64, m2 - d2 as i64, n1 + 2 * d1 as i64, n2 + d2 as i64, d1, d2);
        prop_assert_eq!(a, b);
    }

    /// Negating every argument conjugates the value.
    #[test]
    fn argument_negation_conjugates(
        d1 in 1u64..=12,
        d2 in 1u64..=12,
        m1 in 0i64..4,
        m2 in 0i64..4,
        n1 in 0i64..4,
        n2 in 0i64..4,
    ) {
        let v = s_long_bruteforce(m1, m2, n1, n2, d1, d2);
        let w = s_long_bruteforce(-m1, -m2, -n1, -n2, d1, d2);
        prop_assert!(w.sub(&v.conj()).unwrap().is_zero());
    }

    /// Any admissible coprime split reproduces the plain sum, moduli ≤ 24.
    #[test]
    fn crt_equals_bruteforce(
        d1 in 1u64..=24,
        d2 in 1u64..=24,
        m in 1i64..4,
        n in 1i64..4,
        pick in proptest::bits::u8::ANY,
    ) {
        // Choose a coprime split of (d1, d2) deterministically from `pick`:
        // collect admissible (f1, f2) and index into them.
        let mut splits = Vec::new();
        for f1 in 1..=d1 {
            if d1 % f1 != 0 { continue; }
            for f2 in 1..=d2 {
                if d2 % f2 != 0 { continue; }
                if gcd(f1 * f2, (d1 / f1) * (d2 / f2)) == 1 {
                    splits.push((f1, f2));
                }
            }
        }
        let (f1, f2) = splits[pick as usize % splits.len()];
        let split = s_long_crt(1, m, n, 1, d1, d2, f1, f2).unwrap();
        let full = s_long_bruteforce(1, m, n, 1, d1, d2);
        prop_assert!(split.sub(&full).unwrap().is_zero(),
            "({d1},{d2}) at ({f1},{f2}) m={m} n={n}");
    }
}

//! Contract tests for the modular-arithmetic helpers.

use gl3k::arith::*;
use proptest::prelude::*;

#[test]
fn inv_mod_examples() {
    assert_eq!(inv_mod(3, 7).unwrap(), 5);
    assert_eq!(inv_mod(1, 97).unwrap(), 1);
    assert_eq!(inv_mod(5, 1).unwrap(), 0, "mod 1 the zero residue is the convention");
    assert_eq!(
        inv_mod(2, 4),
        Err(ArithError::NotInvertible {
            residue: 2,
            modulus: 4
        })
    );
    // Negative representatives are normalized first.
    assert_eq!(inv_mod(-4, 7).unwrap(), inv_mod(3, 7).unwrap());
}

#[test]
fn crt_examples() {
    assert_eq!(crt(&[(1, 3), (2, 5)]).unwrap(), (7, 15));
    assert_eq!(crt(&[]).unwrap(), (0, 1));
    assert_eq!(crt(&[(4, 1), (2, 9)]).unwrap(), (2, 9));
    assert!(matches!(
        crt(&[(1, 6), (2, 4)]),
        Err(ArithError::ModuliNotCoprime(6, 4))
    ));
}

#[test]
fn factorization_examples() {
    assert_eq!(Factorization::of(1).factors, vec![]);
    assert_eq!(Factorization::of(12).factors, vec![(2, 2), (3, 1)]);
    assert_eq!(
        Factorization::of(99_999_989).factors,
        vec![(99_999_989, 1)],
        "large prime below the modulus cap"
    );
    assert_eq!(Factorization::of(720).divisors().len(), 30);
    assert_eq!(Factorization::of(12).valuation(2), 2);
    assert_eq!(Factorization::of(12).omega(), 2);
}

#[test]
fn multiplicative_function_examples() {
    assert_eq!(squarefree_kernel(12), 6);
    assert_eq!(squarefree_kernel(1), 1);
    assert_eq!(moebius(1), 1);
    assert_eq!(moebius(6), 1);
    assert_eq!(moebius(30), -1);
    assert_eq!(moebius(12), 0);
    assert_eq!(euler_phi(1), 1);
    assert_eq!(euler_phi(12), 4);
    assert_eq!(valuation(48, 2), 4);
}

#[test]
fn c_factor_examples() {
    assert_eq!(
        c_factor(7, 7).unwrap(),
        RationalWeight::new(7, 6),
        "a fully matching prime contributes p/(p-1)"
    );
    assert_eq!(c_factor(12, 4).unwrap(), RationalWeight::from_integer(2));
    assert_eq!(c_factor(12, 2).unwrap(), RationalWeight::from_integer(1));
    assert_eq!(c_factor(12, 12).unwrap(), RationalWeight::new(3, 1));
    assert!(matches!(
        c_factor(12, 5),
        Err(ArithError::NotDivisor { .. })
    ));
}

#[test]
fn unitary_splits_examples() {
    let mut splits = unitary_splits(12, 2);
    splits.sort();
    assert_eq!(
        splits,
        vec![
            vec![1, 12],
            vec![3, 4],
            vec![4, 3],
            vec![12, 1],
        ]
    );
    assert_eq!(unitary_splits(1, 3), vec![vec![1, 1, 1]]);
}

#[test]
fn rational_weight_is_canonical() {
    let w = RationalWeight::new(2, -4);
    assert_eq!(*w.numer(), -1);
    assert_eq!(*w.denom(), 2);
}

#[test]
fn is_prime_matches_factorization_smoke() {
    for n in 2..2000u64 {
        assert_eq!(
            is_prime(n),
            Factorization::of(n).factors == vec![(n, 1)],
            "n = {n}"
        );
    }
}

proptest! {
    /// The CRT solution actually satisfies every congruence in the system.
    #[test]
    fn crt_satisfies_congruences(r1 in -50i64..50, r2 in -50i64..50, r3 in -50i64..50) {
        let system = [(r1, 7u64), (r2, 9), (r3, 25)];
        let (x, n) = crt(&system).unwrap();
        prop_assert_eq!(n, 7 * 9 * 25);
        for (r, m) in system {
            prop_assert_eq!(x % m, modnorm(r, m));
        }
    }

    /// inv_mod returns a genuine inverse whenever gcd(a, n) = 1.
    #[test]
    fn inv_mod_is_inverse(a in 1i64..10_000, n in 2u64..10_000) {
        prop_assume!(gcd(modnorm(a, n), n) == 1);
        let x = inv_mod(a, n).unwrap();
        prop_assert_eq!((modnorm(a, n) as u128 * x as u128) % n as u128, 1);
    }

    /// Factorization round-trips through its value.
    #[test]
    fn factorization_roundtrip(n in 1u64..1_000_000) {
        let f = Factorization::of(n);
        prop_assert_eq!(f.value(), n);
        for w in f.factors.windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
        for &(p, e) in &f.factors {
            prop_assert!(is_prime(p));
            prop_assert!(e >= 1);
        }
    }

    /// Unitary splits have the advertised count k^omega and multiply back.
    #[test]
    fn unitary_splits_count_and_product(n in 1u64..50_000, k in 1usize..4) {
        let f = Factorization::of(n);
        let splits = unitary_splits(n, k);
        prop_assert_eq!(splits.len(), k.pow(f.omega() as u32));
        for s in &splits {
            prop_assert_eq!(s.iter().product::<u64>(), n);
            for i in 0..s.len() {
                for j in (i + 1)..s.len() {
                    prop_assert_eq!(gcd(s[i], s[j]), 1);
                }
            }
        }
    }

    /// Möbius is multiplicative on coprime arguments.
    #[test]
    fn moebius_multiplicative(a in 1u64..3000, b in 1u64..3000) {
        prop_assume!(gcd(a, b) == 1);
        prop_assert_eq!(moebius(a * b), moebius(a) * moebius(b));
    }

    /// phi(n) counts the units in Z/n.
    #[test]
    fn euler_phi_counts_units(n in 1u64..3000) {
        let count = (0..n).filter(|&a| gcd(a, n) == 1).count() as u64;
        prop_assert_eq!(euler_phi(n), count);
    }
}

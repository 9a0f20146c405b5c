//! Classical Kloosterman and Ramanujan sums with exact values.
//!
//! The sum `S(m, n; c) = Σ_{x mod c, (x,c)=1} e((mx + n·x̄)/c)` is the basic
//! building block for everything in this crate: the rank-three sums
//! factor into products of these, and the degenerate case `S(0, n; c)` is
//! the Ramanujan sum with a well-known closed form.
//!
//! Values are returned exactly as [`CycloValue`]s of order `c`.  Two
//! evaluation routes are provided and cross-checked in the tests:
//!
//! * [`kloosterman_direct`] — the defining sum, one term per unit;
//! * [`kloosterman`] — multiplicative fast path: CRT-split `c` into prime
//!   powers and twist the arguments, falling back to the direct sum on each
//!   factor.
//!
//! A process-wide concurrent memo table backs [`kloosterman`] because the
//! decomposition of a rank-three sum evaluates the same classical sums many
//! times over.

use crate::arith::{euler_phi, gcd, inv_mod, moebius, mul_mod, Factorization};
use crate::cyclo::CycloValue;
use dashmap::DashMap;
use std::sync::Arc;
use std::sync::OnceLock;

/// Exact integer coefficient vector of a Kloosterman sum: entry `k` counts
/// the units contributing `e(k/c)`.  Kept as raw integers so the rank-three
/// evaluators can convolve these without rational arithmetic.
pub type RootVector = Arc<Vec<i64>>;

fn memo() -> &'static DashMap<(u64, u64, u64), RootVector> {
    static MEMO: OnceLock<DashMap<(u64, u64, u64), RootVector>> = OnceLock::new();
    MEMO.get_or_init(DashMap::new)
}

/// Exact coefficient vector of `S(m, n; c)` by the defining sum.
///
/// Arguments enter only through their residues mod `c`; negative values are
/// fine.  `c = 0` is rejected by debug assertion (no meaningful sum).
pub fn kloosterman_vector_direct(m: i64, n: i64, c: u64) -> Vec<i64> {
    assert!(c >= 1, "modulus must be positive");
    let cu = c as usize;
    let mut acc = vec![0i64; cu];
    let mm = m.rem_euclid(c as i64) as u64;
    let nn = n.rem_euclid(c as i64) as u64;
    for x in 0..c {
        if gcd(x, c) != 1 && c > 1 {
            continue;
        }
        let xbar = match inv_mod(x as i64, c) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let idx = (mul_mod(mm, x, c) + mul_mod(nn, xbar, c)) % c;
        acc[idx as usize] += 1;
    }
    acc
}

/// `S(m, n; c)` by the defining sum, as an exact cyclotomic value.
pub fn kloosterman_direct(m: i64, n: i64, c: u64) -> CycloValue {
    vector_to_cyclo(&kloosterman_vector_direct(m, n, c), c)
}

/// Exact coefficient vector of `S(m, n; c)` through the memoised
/// multiplicative route.
///
/// For `c = c₁c₂` with coprime factors, `S(m, n; c)` equals
/// `S(m·c̄₂², n; c₁) · S(m·c̄₁², n; c₂)` with inverses taken modulo the
/// respective factor; the sum is therefore computed on each prime power and
/// the index vectors convolved through the CRT embedding `e(k/cᵢ) =
/// e(k·(c/cᵢ)/c)`.
pub fn kloosterman_vector(m: i64, n: i64, c: u64) -> RootVector {
    assert!(c >= 1, "modulus must be positive");
    let mm = m.rem_euclid(c as i64) as u64;
    let nn = n.rem_euclid(c as i64) as u64;
    let key = (mm, nn, c);
    if let Some(hit) = memo().get(&key) {
        return hit.clone();
    }
    let f = Factorization::of(c);
    let out: Vec<i64> = if f.factors.len() <= 1 {
        kloosterman_vector_direct(mm as i64, nn as i64, c)
    } else {
        let cu = c as usize;
        let mut acc = vec![0i64; cu];
        acc[0] = 1; // multiplicative identity: empty product is e(0)
        let mut scratch = vec![0i64; cu];
        for &(p, a) in &f.factors {
            let q = p.pow(a);
            let cof = c / q;
            let cof_inv = inv_mod(cof as i64, q).expect("coprime cofactor");
            let twist = mul_mod(mul_mod(cof_inv, cof_inv, q), mm % q, q);
            let local = kloosterman_vector_direct(twist as i64, (nn % q) as i64, q);
            // Convolve acc with local embedded at stride c/q.
            scratch.iter_mut().for_each(|v| *v = 0);
            for (i, &a_c) in acc.iter().enumerate() {
                if a_c == 0 {
                    continue;
                }
                for (j, &b_c) in local.iter().enumerate() {
                    if b_c == 0 {
                        continue;
                    }
                    let idx = (i + j * cof as usize) % cu;
                    scratch[idx] += a_c * b_c;
                }
            }
            std::mem::swap(&mut acc, &mut scratch);
        }
        acc
    };
    let arc: RootVector = Arc::new(out);
    memo().insert(key, arc.clone());
    arc
}

/// `S(m, n; c)` through the memoised multiplicative fast path.
pub fn kloosterman(m: i64, n: i64, c: u64) -> CycloValue {
    vector_to_cyclo(&kloosterman_vector(m, n, c), c)
}

/// Floating-point value of `S(m, n; c)`; always real, returned as `f64`.
pub fn kloosterman_f64(m: i64, n: i64, c: u64) -> f64 {
    // S(m,n;c) is invariant under x ↦ -x up to conjugation, hence real.
    kloosterman(m, n, c).to_complex().re
}

/// Ramanujan sum `S(0, n; c) = Σ_{(x,c)=1} e(nx/c)` by the closed form
/// `μ(c/d)·φ(c)/φ(c/d)` with `d = gcd(n, c)` (and `d = c` when `n = 0`).
pub fn ramanujan(n: i64, c: u64) -> i64 {
    assert!(c >= 1, "modulus must be positive");
    let nm = n.rem_euclid(c as i64) as u64;
    let d = if nm == 0 { c } else { gcd(nm, c) };
    let mu = moebius(c / d);
    if mu == 0 {
        return 0;
    }
    let phi_c = euler_phi(c);
    let phi_cd = euler_phi(c / d);
    debug_assert_eq!(phi_c % phi_cd, 0);
    mu as i64 * (phi_c / phi_cd) as i64
}

fn vector_to_cyclo(v: &[i64], c: u64) -> CycloValue {
    CycloValue::from_counts(v, c).expect("order within cap")
}

/// Number of entries currently held by the process-wide memo table.
pub fn memo_len() -> usize {
    memo().len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ramanujan_closed_form_matches_sum() {
        for c in 1..=30u64 {
            for n in -5i64..=10 {
                let direct = kloosterman_vector_direct(0, n, c);
                let v = vector_to_cyclo(&direct, c).to_complex();
                assert!(
                    (v.re - ramanujan(n, c) as f64).abs() < 1e-9 && v.im.abs() < 1e-9,
                    "c={c} n={n}"
                );
            }
        }
    }

    #[test]
    fn degenerate_arguments() {
        // n ≡ 0 mod c degenerates to φ(c); unit c is the empty sum = 1.
        assert_eq!(ramanujan(0, 12), 4);
        assert_eq!(ramanujan(24, 12), 4);
        assert_eq!(ramanujan(5, 1), 1);
        assert_eq!(kloosterman_f64(0, 0, 7).round() as i64, 6);
    }
}

//! Rank-three long-element exponential sums, evaluated exactly.
//!
//! The central object is
//!
//! ```text
//! S(m₁, m₂, n₁, n₂; D₁, D₂) =
//!   Σ  e( (m₁B₁ + n₁(Y₁D₂ − Z₁B₂))/D₁ + (m₂B₂ + n₂(Y₂D₁ − Z₂B₁))/D₂ )
//! ```
//!
//! summed over `B₁, C₁ mod D₁` and `B₂, C₂ mod D₂` subject to
//! `gcd(Bⱼ, Cⱼ, Dⱼ) = 1` and the compatibility congruence
//! `D₁C₂ + B₁B₂ + D₂C₁ ≡ 0 (mod D₁D₂)`, where `(Yⱼ, Zⱼ)` is any solution of
//! `YⱼBⱼ + ZⱼCⱼ ≡ 1 (mod Dⱼ)`.  The value does not depend on which solution
//! is picked — [`s_long_bruteforce_shifted`] exists so tests can exercise
//! exactly that.
//!
//! Everything here returns exact [`CycloValue`]s (or raw integer root-count
//! vectors for bulk work); no floating point enters until a caller asks for
//! a complex evaluation.
//!
//! Also provided: the coprime-modulus factorisation [`s_long_crt`] into two
//! twisted sums of the same shape, and the auxiliary sum [`s_tilde`] that
//! shows up when one modulus divides the other.

use crate::arith::{gcd, inv_mod, lcm, modnorm};
use crate::cyclo::{CycloValue, MAX_ORDER};
use thiserror::Error;

/// Errors from the rank-three sum evaluators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gl3Error {
    /// A requested modulus split does not multiply back to the target or
    /// its halves share a common factor.
    #[error("invalid modulus split: {reason}")]
    InvalidSplit { reason: String },
    /// `s_tilde` requires the first modulus to divide the second.
    #[error("modulus {d1} does not divide {d2}")]
    DivisibilityViolated { d1: u64, d2: u64 },
}

/// Full extended Euclid: returns `(g, u, v)` with `u·a + v·b = g = gcd(a,b)`.
fn egcd_full(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return (a, 1, 0);
    }
    let (g, u, v) = egcd_full(b, a % b);
    (g, v, u - (a / b) * v)
}

/// Solve `Y·b + Z·c ≡ 1 (mod d)` for one representative `(Y, Z)`, or `None`
/// when `gcd(b, c, d) > 1` (no solution).
pub fn solve_yz(b: u64, c: u64, d: u64) -> Option<(u64, u64)> {
    if d == 1 {
        return Some((0, 0));
    }
    let g = gcd(b, c);
    if g == 0 || gcd(g, d) != 1 {
        return None;
    }
    let (gg, u, v) = egcd_full(b as i128, c as i128);
    debug_assert_eq!(gg as u64, g);
    let ginv = inv_mod(g as i64, d).expect("gcd(g, d) = 1") as i128;
    let y = ((u % d as i128) * ginv).rem_euclid(d as i128) as u64;
    let z = ((v % d as i128) * ginv).rem_euclid(d as i128) as u64;
    debug_assert_eq!((y as u128 * b as u128 + z as u128 * c as u128) % d as u128, 1);
    Some((y, z))
}

/// Per-modulus lookup of `(Y, Z)` representatives for all `(B, C)` pairs.
struct YzTable {
    d: u64,
    /// `entries[B·d + C]`; `u64::MAX` marks `gcd(B, C, D) > 1`.
    entries: Vec<(u64, u64)>,
}

const YZ_INVALID: (u64, u64) = (u64::MAX, u64::MAX);

impl YzTable {
    fn build(d: u64) -> Self {
        let du = d as usize;
        let mut entries = vec![YZ_INVALID; du * du];
        for b in 0..d {
            for c in 0..d {
                if let Some(yz) = solve_yz(b, c, d) {
                    entries[(b * d + c) as usize] = yz;
                }
            }
        }
        YzTable { d, entries }
    }

    #[inline]
    fn get(&self, b: u64, c: u64) -> Option<(u64, u64)> {
        let e = self.entries[(b * self.d + c) as usize];
        if e == YZ_INVALID {
            None
        } else {
            Some(e)
        }
    }
}

/// Walk every admissible `(B₁, C₁, B₂, C₂)` tuple for the modulus pair and
/// hand it to `emit` together with the `(Y, Z)` representatives.
///
/// The compatibility congruence pins `C₂` once `(B₁, C₁, B₂)` are chosen,
/// and for fixed `(B₁, C₁)` the admissible `B₂` form an arithmetic
/// progression of step `D₁/gcd(B₁, D₁)` — the walk visits only those.
pub(crate) fn for_each_tuple<F: FnMut(u64, u64, u64, u64, (u64, u64), (u64, u64))>(
    d1: u64,
    d2: u64,
    mut emit: F,
) {
    let t1 = YzTable::build(d1);
    let t2 = if d1 == d2 { None } else { Some(YzTable::build(d2)) };
    let t2ref = t2.as_ref().unwrap_or(&t1);
    for b1 in 0..d1 {
        let g = gcd(b1, d1); // gcd(0, d1) = d1
        let step = d1 / g;
        let binv = if step > 1 {
            inv_mod((b1 / g) as i64, step).expect("b1/g is a unit mod d1/g")
        } else {
            0
        };
        for c1 in 0..d1 {
            let Some(yz1) = t1.get(b1, c1) else { continue };
            // Need B₁B₂ ≡ −D₂C₁ (mod D₁): solvable iff g | D₂C₁, and then
            // B₂ runs over one residue class mod D₁/g.
            let rhs = modnorm(-((d2 as i64 % d1 as i64) * c1 as i64), d1);
            if rhs % g != 0 {
                continue;
            }
            let b2_0 = if step > 1 { rhs / g * binv % step } else { 0 };
            let mut b2 = b2_0;
            while b2 < d2 {
                // C₂ forced: C₂ = −(B₁B₂ + D₂C₁)/D₁ mod D₂.
                let t = b1 as i128 * b2 as i128 + d2 as i128 * c1 as i128;
                debug_assert_eq!(t % d1 as i128, 0);
                let c2 = (-(t / d1 as i128)).rem_euclid(d2 as i128) as u64;
                if let Some(yz2) = t2ref.get(b2, c2) {
                    emit(b1, c1, b2, c2, yz1, yz2);
                }
                b2 += step;
            }
        }
    }
}

/// Exact root-count vector (order `lcm(D₁, D₂)`) of the long-element sum,
/// with explicitly shifted `(Y, Z)` representatives.
///
/// The representative `(Yⱼ, Zⱼ)` is replaced by
/// `(Yⱼ + sⱼCⱼ, Zⱼ − sⱼBⱼ)`, which also solves the defining congruence; the
/// result must not depend on `s₁, s₂`, and tests verify that it doesn't.
pub fn s_long_bruteforce_shifted(
    m1: i64,
    m2: i64,
    n1: i64,
    n2: i64,
    d1: u64,
    d2: u64,
    s1: u64,
    s2: u64,
) -> Vec<i64> {
    assert!(d1 >= 1 && d2 >= 1, "moduli must be positive");
    let l = lcm(d1, d2);
    assert!(l <= MAX_ORDER, "joint modulus too large");
    let lu = l as usize;
    let (l1, l2) = ((l / d1) as i64, (l / d2) as i64);
    let mut acc = vec![0i64; lu];
    let (m1, n1) = (modnorm(m1, d1) as i64, modnorm(n1, d1) as i64);
    let (m2, n2) = (modnorm(m2, d2) as i64, modnorm(n2, d2) as i64);
    let (s1, s2) = (s1 % d1, s2 % d2);
    for_each_tuple(d1, d2, |b1, c1, b2, c2, (y1, z1), (y2, z2)| {
        let y1 = (y1 + s1 * c1) % d1;
        let z1 = modnorm(z1 as i64 - (s1 * b1) as i64, d1);
        let y2 = (y2 + s2 * c2) % d2;
        let z2 = modnorm(z2 as i64 - (s2 * b2) as i64, d2);
        let ph1 = (m1 * b1 as i64 + n1 * (y1 as i64 * d2 as i64 - z1 as i64 * b2 as i64))
            .rem_euclid(d1 as i64);
        let ph2 = (m2 * b2 as i64 + n2 * (y2 as i64 * d1 as i64 - z2 as i64 * b1 as i64))
            .rem_euclid(d2 as i64);
        let idx = (ph1 * l1 + ph2 * l2) % l as i64;
        acc[idx as usize] += 1;
    });
    acc
}

/// Exact root-count vector (order `lcm(D₁, D₂)`) of the long-element sum.
pub fn s_long_bruteforce_vector(m1: i64, m2: i64, n1: i64, n2: i64, d1: u64, d2: u64) -> Vec<i64> {
    s_long_bruteforce_shifted(m1, m2, n1, n2, d1, d2, 0, 0)
}

/// The long-element sum as an exact cyclotomic value.
pub fn s_long_bruteforce(m1: i64, m2: i64, n1: i64, n2: i64, d1: u64, d2: u64) -> CycloValue {
    vector_to_cyclo(&s_long_bruteforce_vector(m1, m2, n1, n2, d1, d2), lcm(d1, d2))
}

/// One-pass family evaluation of `S(1, m, n, 1; D₁, D₂)` over a grid of
/// `(m, n)` pairs, sharing the tuple walk.
///
/// Returns row-major vectors: `result[i·ns.len() + j]` is the root-count
/// vector for `(ms[i], ns[j])`.  This is the workhorse for bulk
/// verification, where the tuple walk dwarfs the per-pair phase work.
pub fn s_long_family_bruteforce(d1: u64, d2: u64, ms: &[i64], ns: &[i64]) -> Vec<Vec<i64>> {
    assert!(d1 >= 1 && d2 >= 1, "moduli must be positive");
    let l = lcm(d1, d2);
    assert!(l <= MAX_ORDER, "joint modulus too large");
    let lu = l as usize;
    let (l1, l2) = ((l / d1) as i64, (l / d2) as i64);
    let li = l as i64;
    let ms_red: Vec<i64> = ms.iter().map(|&m| modnorm(m, d2) as i64).collect();
    let ns_red: Vec<i64> = ns.iter().map(|&n| modnorm(n, d1) as i64).collect();
    let mut acc = vec![vec![0i64; lu]; ms.len() * ns.len()];
    for_each_tuple(d1, d2, |b1, _c1, b2, _c2, (y1, z1), (y2, z2)| {
        // S(1, m, n, 1): phase = (B₁ + n(Y₁D₂ − Z₁B₂))/D₁
        //                      + (mB₂ + (Y₂D₁ − Z₂B₁))/D₂.
        let base = (b1 as i64 * l1 + (y2 as i64 * d1 as i64 - z2 as i64 * b1 as i64) * l2)
            .rem_euclid(li);
        let u = ((y1 as i64 * d2 as i64 - z1 as i64 * b2 as i64) * l1).rem_euclid(li);
        let v = (b2 as i64 * l2).rem_euclid(li);
        for (j, &n) in ns_red.iter().enumerate() {
            let bn = (base + n * u) % li;
            for (i, &m) in ms_red.iter().enumerate() {
                let idx = (bn + m * v) % li;
                acc[i * ns_red.len() + j][idx as usize] += 1;
            }
        }
    });
    acc
}

/// Coprime-split evaluation of `S(m₁, m₂, n₁, n₂; D₁, D₂)`.
///
/// The split names the first halves `(f₁, f₂)`; with cofactors
/// `f₁' = D₁/f₁`, `f₂' = D₂/f₂` and `gcd(f₁f₂, f₁'f₂') = 1` the sum factors
/// as a product of two sums of the same shape with twisted `m`-arguments,
///
/// ```text
/// S(m₁, m₂, n₁, n₂; D₁, D₂) =
///   S(f̄₁'² f₂' m₁, f̄₂'² f₁' m₂, n₁, n₂; f₁,  f₂)
/// · S(f̄₁²  f₂  m₁, f̄₂²  f₁  m₂, n₁, n₂; f₁', f₂')
/// ```
///
/// with each inverse taken modulo the factor hosting the argument.
pub fn s_long_crt(
    m1: i64,
    m2: i64,
    n1: i64,
    n2: i64,
    d1: u64,
    d2: u64,
    f1: u64,
    f2: u64,
) -> Result<CycloValue, Gl3Error> {
    if f1 == 0 || f2 == 0 || d1 == 0 || d2 == 0 || d1 % f1 != 0 || d2 % f2 != 0 {
        return Err(Gl3Error::InvalidSplit {
            reason: format!("({f1},{f2}) does not divide the modulus pair ({d1},{d2})"),
        });
    }
    let (d1p, d2p) = (d1 / f1, d2 / f2);
    let (d1, d2) = (f1, f2);
    if gcd(d1 * d2, d1p * d2p) != 1 {
        return Err(Gl3Error::InvalidSplit {
            reason: format!(
                "halves ({d1},{d2}) and ({d1p},{d2p}) share a common factor"
            ),
        });
    }
    let twist = |m1: i64, m2: i64, a1: u64, a2: u64, b1: u64, b2: u64| -> (i64, i64) {
        let t1 = if a1 > 1 {
            let inv = inv_mod(b1 as i64, a1).expect("coprime halves") as u128;
            let mm = modnorm(m1, a1) as u128;
            ((inv * inv % a1 as u128) * (b2 as u128 % a1 as u128) % a1 as u128 * mm
                % a1 as u128) as i64
        } else {
            0
        };
        let t2 = if a2 > 1 {
            let inv = inv_mod(b2 as i64, a2).expect("coprime halves") as u128;
            let mm = modnorm(m2, a2) as u128;
            ((inv * inv % a2 as u128) * (b1 as u128 % a2 as u128) % a2 as u128 * mm
                % a2 as u128) as i64
        } else {
            0
        };
        (t1, t2)
    };
    let (m1a, m2a) = twist(m1, m2, d1, d2, d1p, d2p);
    let (m1b, m2b) = twist(m1, m2, d1p, d2p, d1, d2);
    let fa = s_long_bruteforce(m1a, m2a, n1, n2, d1, d2);
    let fb = s_long_bruteforce(m1b, m2b, n1, n2, d1p, d2p);
    Ok(fa.mul(&fb).expect("orders within cap"))
}

/// The divided-modulus auxiliary sum: for `D₁ | D₂`,
///
/// ```text
/// S̃(n₁, n₂, m₁; D₁, D₂) = Σ e( n₂C̄₁C₂/D₁ + m₁C̄₂/(D₂/D₁) + n₁C₁/D₁ )
/// ```
///
/// over `C₁ mod D₁` with `(C₁, D₁) = 1` and `C₂ mod D₂` with
/// `(C₂, D₂/D₁) = 1`, where `C̄₂` inverts `C₂` modulo `D₂/D₁`.
pub fn s_tilde(n1: i64, n2: i64, m1: i64, d1: u64, d2: u64) -> Result<CycloValue, Gl3Error> {
    if d1 == 0 || d2 == 0 || d2 % d1 != 0 {
        return Err(Gl3Error::DivisibilityViolated { d1, d2 });
    }
    let dr = d2 / d1;
    let l = d2;
    assert!(l <= MAX_ORDER, "modulus too large");
    let mut acc = vec![0i64; l as usize];
    let (l1, lr) = ((l / d1) as i64, (l / dr) as i64);
    let n1 = modnorm(n1, d1) as i64;
    let n2 = modnorm(n2, d1) as i64;
    let m1 = modnorm(m1, dr) as i64;
    for c1 in 0..d1 {
        if gcd(c1, d1) != 1 && d1 > 1 {
            continue;
        }
        let c1b = inv_mod(c1 as i64, d1).unwrap_or(0) as i64;
        for c2 in 0..d2 {
            if dr > 1 && gcd(c2 % dr, dr) != 1 {
                continue;
            }
            let c2b = if dr > 1 {
                inv_mod((c2 % dr) as i64, dr).expect("unit mod dr") as i64
            } else {
                0
            };
            let ph = (n2 * c1b % d1 as i64 * c2 as i64).rem_euclid(d1 as i64) * l1
                + (m1 * c2b).rem_euclid(dr as i64) * lr
                + (n1 * c1 as i64).rem_euclid(d1 as i64) * l1;
            acc[(ph % l as i64) as usize] += 1;
        }
    }
    Ok(vector_to_cyclo(&acc, l))
}

fn vector_to_cyclo(v: &[i64], order: u64) -> CycloValue {
    CycloValue::from_counts(v, order).expect("order within cap")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_modulus_pair_gives_one() {
        let v = s_long_bruteforce(1, 1, 1, 1, 1, 1);
        assert!(v.sub(&CycloValue::from_integer(1)).unwrap().is_zero());
    }

    #[test]
    fn smallest_nontrivial_value() {
        let v = s_long_bruteforce(1, 1, 1, 1, 2, 3).to_complex();
        assert!((v.re - 2.0).abs() < 1e-9 && v.im.abs() < 1e-9);
    }
}

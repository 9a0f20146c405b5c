//! Global decomposition of the rank-three long-element sum.
//!
//! For `m, n ≥ 1` the sum `S(1, m, n, 1; D₁, D₂)` equals a finite sum of
//! products of *classical* Kloosterman and Ramanujan sums.  The moduli pair
//! first splits by prime valuations into blocks ([`block_split`]): primes in
//! only one modulus (`F₁`/`F₂`), primes with smaller valuation in `D₁`
//! (`G₁, G₂`), smaller in `D₂` (`H₁, H₂`), and equal valuations (`I`).  Each
//! block then contributes divisor parameters, and every admissible
//! parameter choice yields one [`DecompTuple`] with weight
//!
//! ```text
//! (e₂E₁²E₃ · e₄E₅²E₆ · J₂²E₉ / C_{e₉,E₉}) · μ(e₇E₈)²
//! ```
//!
//! multiplying
//!
//! ```text
//! S(0, m; e₄e₈J₁) · S(0, n; e₂e₈J₁)
//!   · S(m/(e₂E₁E₅J₂), F₁α; F₂f₂f₃E₃E₆J₃)
//!   · S(n/(E₁e₄E₅J₂), F₂β; F₁E₃f₄f₆E₆J₃)
//! ```
//!
//! where the twists `α`, `β` are assembled by CRT from four congruences
//! each ([`alpha_beta`]).  Everything is evaluated exactly; the defining
//! oracle is exact agreement with [`crate::gl3::s_long_bruteforce`] over a
//! dense set of moduli pairs, which [`verify_decomposition`] checks.
//!
//! Naming: field names double the first letter of the capitalised symbols
//! (`ff1` ↔ `F₁`, `ee3` ↔ `E₃`); lowercase symbols keep their names
//! (`e2`, `f3`, `j2` ↔ `J₂`).
//!
//! Two readings of the summation conditions are deliberate and are pinned
//! by the brute-force oracle rather than by the displayed conditions alone:
//!
//! * the companion cofactors `f₂, f₃` (resp. `f₄, f₆`) carry *exactly* the
//!   primes of their partners `e₂, e₃` (resp. `e₄, e₆`) — support equality,
//!   not mere divisibility;
//! * `J₂` is supported inside `J₃`; dropping this admits spurious terms
//!   (e.g. the pair `(4,4)` with `m = n = 2` would evaluate to 18 instead
//!   of the correct 10).

use crate::arith::{
    c_factor, crt, gcd, inv_mod, lcm, modnorm, moebius, squarefree_kernel, unitary_splits,
    Factorization, RationalWeight,
};
use crate::cyclo::{fold_is_zero, CycloValue};
use crate::gl3::s_long_family_bruteforce;
use crate::kloosterman::{kloosterman_vector, ramanujan};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;
use thiserror::Error;

/// Cap on `m`, `n` for the decomposed path (keeps enumeration desk-scale).
pub const MAX_MN: i64 = 1_000_000;
/// Cap on `D₁·D₂` for the decomposed path.
pub const MAX_MODULUS_PRODUCT: u64 = 1_000_000;

/// Relative tolerance for float-mode verification records.
pub const FLOAT_MATCH_TOL: f64 = 1e-6;

/// Errors from decomposition plumbing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    /// An inverse required by the α/β congruences does not exist; this
    /// signals an enumeration bug, never a bad input.
    #[error("internal non-coprime residue in twist assembly: {context}")]
    InternalNonCoprime { context: String },
}

/// Valuation-based split of a modulus pair into the four prime classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSplit {
    /// Primes dividing `D₁` only (full `D₁`-part).
    pub f1: u64,
    /// Primes dividing `D₂` only (full `D₂`-part).
    pub f2: u64,
    /// Primes with `0 < v_p(D₁) < v_p(D₂)`: the `D₁`-part…
    pub g1: u64,
    /// …and the `D₂`-part.
    pub g2: u64,
    /// Primes with `v_p(D₁) > v_p(D₂) > 0`: the `D₁`-part…
    pub h1: u64,
    /// …and the `D₂`-part.
    pub h2: u64,
    /// Primes with equal positive valuation: the common part.
    pub i1: u64,
    /// Always equal to `i1`; kept so both moduli factor as
    /// `D₁ = F₁G₁H₁I₁`, `D₂ = F₂G₂H₂I₂`.
    pub i2: u64,
}

/// Split `D₁, D₂` by comparing prime valuations.
pub fn block_split(d1: u64, d2: u64) -> BlockSplit {
    let mut s = BlockSplit {
        f1: 1,
        f2: 1,
        g1: 1,
        g2: 1,
        h1: 1,
        h2: 1,
        i1: 1,
        i2: 1,
    };
    let fac1 = Factorization::of(d1);
    let fac2 = Factorization::of(d2);
    let mut primes: Vec<u64> = fac1
        .factors
        .iter()
        .chain(fac2.factors.iter())
        .map(|&(p, _)| p)
        .collect();
    primes.sort_unstable();
    primes.dedup();
    for p in primes {
        let v1 = fac1.valuation(p);
        let v2 = fac2.valuation(p);
        let (q1, q2) = (p.pow(v1), p.pow(v2));
        if v2 == 0 {
            s.f1 *= q1;
        } else if v1 == 0 {
            s.f2 *= q2;
        } else if v1 < v2 {
            s.g1 *= q1;
            s.g2 *= q2;
        } else if v1 > v2 {
            s.h1 *= q1;
            s.h2 *= q2;
        } else {
            s.i1 *= q1;
            s.i2 *= q2;
        }
    }
    s
}

/// One term of the decomposition: divisor parameters, the `C`-residues, the
/// CRT twists, and the scalar weight.
///
/// Field names double the first letter of capitalised symbols (`ff1` ↔
/// `F₁`, `ee3` ↔ `E₃`, `j2` ↔ `J₂`); starred residues carry a `_star`
/// suffix.  Declaration order is the lexicographic order used for
/// deterministic float-mode summation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DecompTuple {
    /// `F₁`: part of `D₁` coprime to `D₂`.
    pub ff1: u64,
    /// `F₂`: part of `D₂` coprime to `D₁`.
    pub ff2: u64,
    /// `e₂ | G₁` with `e₂ | m` (unitary in `G₁`).
    pub e2: u64,
    /// `e₃ = G₁/e₂`.
    pub e3: u64,
    /// `f₂`: companion of `e₂` inside `G₂`, same prime support.
    pub f2: u64,
    /// `f₃`: companion of `e₃` inside `G₂`, same prime support.
    pub f3: u64,
    /// `e₄ | H₂` with `e₄ | n` (unitary in `H₂`).
    pub e4: u64,
    /// `e₆ = H₂/e₄`.
    pub e6: u64,
    /// `f₄`: companion of `e₄` inside `H₁`, same prime support.
    pub f4: u64,
    /// `f₆`: companion of `e₆` inside `H₁`, same prime support.
    pub f6: u64,
    /// `e₇`: first unitary part of `I`.
    pub e7: u64,
    /// `e₈`: second unitary part of `I`.
    pub e8: u64,
    /// `e₉`: third unitary part of `I`.
    pub e9: u64,
    /// `E₁` with `E₁E₃² = e₃` and `E₁ | gcd(m, n)`.
    pub ee1: u64,
    /// `E₃` with `rad(e₃) | E₃`.
    pub ee3: u64,
    /// `E₅` with `E₅E₆² = e₆` and `E₅ | gcd(m, n)`.
    pub ee5: u64,
    /// `E₆` with `rad(e₆) | E₆`.
    pub ee6: u64,
    /// `E₈`: chain factor of `e₉` coprime to `J₁J₂J₃` (squarefree via
    /// `μ(e₇E₈)²`).
    pub ee8: u64,
    /// `E₉` with `J₁J₂J₃E₈E₉ = e₉`, `J₃ | E₉`, `rad(e₉) | E₉`.
    pub ee9: u64,
    /// `J₁`, coprime to `J₂J₃`.
    pub j1: u64,
    /// `J₂ | gcd(m, n)`, supported inside `J₃`.
    pub j2: u64,
    /// `J₃ | E₉`.
    pub j3: u64,
    /// `C₁` mod `E₃`, coprime to `E₃`.
    pub c1: u64,
    /// `C₁* = 1 − C₁f₃`, coprime to `f₃E₃`.
    pub c1_star: i64,
    /// `C₂` mod `E₆`, coprime to `E₆`.
    pub c2: u64,
    /// `C₂* = 1 − C₂f₆`, coprime to `f₆E₆`.
    pub c2_star: i64,
    /// `C₃` mod `J₃`, coprime to `J₃`.
    pub c3: u64,
    /// `C₃* = E₉/J₃ − C₃`, coprime to `J₃`.
    pub c3_star: i64,
    /// `α` mod `F₂f₂f₃E₃E₆J₃`, assembled by CRT.
    pub alpha: u64,
    /// `β` mod `F₁E₃f₄f₆E₆J₃`, assembled by CRT.
    pub beta: u64,
    /// `e₂E₁²E₃ · e₄E₅²E₆ · J₂²E₉ / C_{e₉,E₉}`.
    pub weight: RationalWeight,
    /// `μ(e₇E₈)²` — tuples with squareful `e₇E₈` stay listed but contribute
    /// nothing.
    pub mobius_sq: u8,
}

impl DecompTuple {
    /// Modulus of the α-twisted classical sum: `F₂f₂f₃E₃E₆J₃`.
    pub fn alpha_modulus(&self) -> u64 {
        self.ff2 * self.f2 * self.f3 * self.ee3 * self.ee6 * self.j3
    }

    /// Modulus of the β-twisted classical sum: `F₁E₃f₄f₆E₆J₃`.
    pub fn beta_modulus(&self) -> u64 {
        self.ff1 * self.ee3 * self.f4 * self.f6 * self.ee6 * self.j3
    }

    /// Modulus of the first Ramanujan factor: `e₄e₈J₁`.
    pub fn ramanujan_modulus_m(&self) -> u64 {
        self.e4 * self.e8 * self.j1
    }

    /// Modulus of the second Ramanujan factor: `e₂e₈J₁`.
    pub fn ramanujan_modulus_n(&self) -> u64 {
        self.e2 * self.e8 * self.j1
    }

    /// First argument of the α-twisted sum: `m/(e₂E₁E₅J₂)` (exact; the four
    /// divisors are pairwise coprime and each divides `m`).
    pub fn m_reduced(&self, m: i64) -> i64 {
        let d = (self.e2 * self.ee1 * self.ee5 * self.j2) as i64;
        debug_assert_eq!(m % d, 0);
        m / d
    }

    /// First argument of the β-twisted sum: `n/(E₁e₄E₅J₂)` (exact).
    pub fn n_reduced(&self, n: i64) -> i64 {
        let d = (self.ee1 * self.e4 * self.ee5 * self.j2) as i64;
        debug_assert_eq!(n % d, 0);
        n / d
    }
}

/// Product of `values` reduced modulo `m > 1`.
fn prod_mod(values: &[u64], m: u64) -> u64 {
    values.iter().fold(1 % m, |acc, &v| acc * (v % m) % m)
}

/// Assemble the `(α, β)` twists of a tuple from four congruences each.
///
/// With `r = e₄e₇e₈J₁E₈E₉` and `r' = e₄e₇e₈J₁E₈` (no `E₉`):
///
/// ```text
/// α ≡ r̄ · f₄f₆J₃           (mod F₂f₂)
/// α ≡ r̄ · f₄f₆J₃ · C̄₁*     (mod f₃E₃)
/// α ≡ r̄ · f₄J₃ · C̄₂        (mod E₆)
/// α ≡ r̄' · f₄f₆ · C̄₃*      (mod J₃)
/// ```
///
/// `β` satisfies the mirror congruences (mod `F₁f₄`, `E₃`, `f₆E₆`, `J₃`)
/// with `e₂` in place of `e₄`, `f₂`/`f₃` in place of `f₄`/`f₆` (the second
/// congruence dropping `f₃` as the third here drops `f₆`), and the roles
/// of plain and starred `C`-residues swapped.  `α` never involves `F₁` and
/// `β` never involves `F₂`.  Moduli equal to 1 contribute nothing; when
/// every modulus is 1 the twist is 1.
pub fn alpha_beta(t: &DecompTuple) -> Result<(u64, u64), DecompError> {
    let inv = |a: i64, m: u64, what: &str| -> Result<u64, DecompError> {
        inv_mod(a, m).map_err(|_| DecompError::InternalNonCoprime {
            context: format!("{what} not invertible mod {m}"),
        })
    };
    // (modulus, keep E9 in the inverted product, factors multiplied on top,
    //  C-residue whose inverse divides).
    type Cong<'a> = (u64, bool, Vec<u64>, Option<(&'a str, i64)>);
    let alpha_plan: [Cong; 4] = [
        (t.ff2 * t.f2, true, vec![t.f4, t.f6, t.j3], None),
        (
            t.f3 * t.ee3,
            true,
            vec![t.f4, t.f6, t.j3],
            Some(("C1*", t.c1_star)),
        ),
        (t.ee6, true, vec![t.f4, t.j3], Some(("C2", t.c2 as i64))),
        (t.j3, false, vec![t.f4, t.f6], Some(("C3*", t.c3_star))),
    ];
    let beta_plan: [Cong; 4] = [
        (t.ff1 * t.f4, true, vec![t.f2, t.f3, t.j3], None),
        (t.ee3, true, vec![t.f2, t.j3], Some(("C1", t.c1 as i64))),
        (
            t.f6 * t.ee6,
            true,
            vec![t.f2, t.f3, t.j3],
            Some(("C2*", t.c2_star)),
        ),
        (t.j3, false, vec![t.f2, t.f3], Some(("C3", t.c3 as i64))),
    ];
    let assemble = |plan: &[Cong], lead4: u64, label: &str| -> Result<u64, DecompError> {
        let mut congruences: Vec<(i64, u64)> = Vec::with_capacity(4);
        for (modulus, keep_ee9, tail, c_res) in plan {
            let m = *modulus;
            if m == 1 {
                continue;
            }
            let mut lead = vec![lead4, t.e7, t.e8, t.j1, t.ee8];
            if *keep_ee9 {
                lead.push(t.ee9);
            }
            let mut r = inv(prod_mod(&lead, m) as i64, m, "twist lead product")?
                * prod_mod(tail, m)
                % m;
            if let Some((what, c)) = c_res {
                r = r * inv(*c, m, what)? % m;
            }
            congruences.push((r as i64, m));
        }
        let (r, rm) = crt(&congruences).map_err(|e| DecompError::InternalNonCoprime {
            context: format!("{label} congruences: {e}"),
        })?;
        Ok(if rm <= 1 { 1 } else { r })
    };
    Ok((
        assemble(&alpha_plan, t.e4, "alpha")?,
        assemble(&beta_plan, t.e2, "beta")?,
    ))
}

// ---------------------------------------------------------------------------
// Enumeration
// ---------------------------------------------------------------------------

/// G-block choice: unitary split `e₂e₃ = G₁` plus the square split of `e₃`.
struct GOpt {
    e2: u64,
    e3: u64,
    f2: u64,
    f3: u64,
    ee1: u64,
    ee3: u64,
}

/// H-block choice: unitary split `e₄e₆ = H₂` plus the square split of `e₆`.
struct HOpt {
    e4: u64,
    e6: u64,
    f4: u64,
    f6: u64,
    ee5: u64,
    ee6: u64,
}

/// I-block choice: unitary split `e₇e₈e₉ = I` plus a 5-chain of `e₉`.
struct IOpt {
    e7: u64,
    e8: u64,
    e9: u64,
    j1: u64,
    j2: u64,
    j3: u64,
    ee8: u64,
    ee9: u64,
}

fn g_options(g1: u64, g2: u64, m: u64, n: u64) -> Vec<GOpt> {
    let mut out = Vec::new();
    for split in unitary_splits(g1, 2) {
        let (e2, e3) = (split[0], split[1]);
        if m % e2 != 0 {
            continue;
        }
        let Some(f2) = forced_companion(e2, g2) else {
            continue;
        };
        let Some(f3) = forced_companion(e3, g2) else {
            continue;
        };
        for (ee1, ee3) in square_splits(e3) {
            if m % ee1 != 0 || n % ee1 != 0 {
                continue;
            }
            out.push(GOpt {
                e2,
                e3,
                f2,
                f3,
                ee1,
                ee3,
            });
        }
    }
    out
}

fn h_options(h1: u64, h2: u64, m: u64, n: u64) -> Vec<HOpt> {
    let mut out = Vec::new();
    for split in unitary_splits(h2, 2) {
        let (e4, e6) = (split[0], split[1]);
        if n % e4 != 0 {
            continue;
        }
        let Some(f4) = forced_companion(e4, h1) else {
            continue;
        };
        let Some(f6) = forced_companion(e6, h1) else {
            continue;
        };
        for (ee5, ee6) in square_splits(e6) {
            if m % ee5 != 0 || n % ee5 != 0 {
                continue;
            }
            out.push(HOpt {
                e4,
                e6,
                f4,
                f6,
                ee5,
                ee6,
            });
        }
    }
    out
}

fn i_options(i: u64, m: u64, n: u64) -> Vec<IOpt> {
    let mut out = Vec::new();
    for split in unitary_splits(i, 3) {
        let (e7, e8, e9) = (split[0], split[1], split[2]);
        let rad9 = squarefree_kernel(e9);
        for (j1, j2, j3, ee8, ee9) in ordered_factorizations_5(e9) {
            if ee9 % j3 != 0 {
                continue;
            }
            if e9 > 1 && ee9 % rad9 != 0 {
                continue;
            }
            if gcd(ee8, j1 * j2 * j3) != 1 || gcd(j1, j2 * j3) != 1 {
                continue;
            }
            if m % j2 != 0 || n % j2 != 0 {
                continue;
            }
            // J₂ supported inside J₃ (see module docs).
            if Factorization::of(j2)
                .factors
                .iter()
                .any(|&(p, _)| j3 % p != 0)
            {
                continue;
            }
            out.push(IOpt {
                e7,
                e8,
                e9,
                j1,
                j2,
                j3,
                ee8,
                ee9,
            });
        }
    }
    out
}

fn tuple_weight(g: &GOpt, h: &HOpt, i: &IOpt) -> RationalWeight {
    let base = (g.e2 * g.ee1 * g.ee1 * g.ee3) as i128
        * (h.e4 * h.ee5 * h.ee5 * h.ee6) as i128
        * (i.j2 * i.j2 * i.ee9) as i128;
    let c = c_factor(i.e9, i.ee9).expect("E9 divides e9");
    RationalWeight::from_integer(base) / c
}

/// Enumerate every decomposition term of `S(1, m, n, 1; D₁, D₂)`, sorted
/// lexicographically by field order.
///
/// Tuples with `μ(e₇E₈)² = 0` are included (flagged by `mobius_sq`) so the
/// list mirrors the theorem's index set; the evaluator skips them.
///
/// Panics when `m, n < 1`, `m, n >` [`MAX_MN`], or `D₁·D₂ >`
/// [`MAX_MODULUS_PRODUCT`].
pub fn enumerate_tuples(m: i64, n: i64, d1: u64, d2: u64) -> Vec<DecompTuple> {
    assert!(m >= 1 && n >= 1, "decomposition requires m, n >= 1");
    assert!(m <= MAX_MN && n <= MAX_MN, "m, n capped at {MAX_MN}");
    assert!(
        d1 >= 1 && d2 >= 1 && d1 * d2 <= MAX_MODULUS_PRODUCT,
        "modulus product capped at {MAX_MODULUS_PRODUCT}"
    );
    let s = block_split(d1, d2);
    let (mu, nu) = (m as u64, n as u64);
    let g_opts = g_options(s.g1, s.g2, mu, nu);
    let h_opts = h_options(s.h1, s.h2, mu, nu);
    let i_opts = i_options(s.i1, mu, nu);

    let mut out = Vec::new();
    for g in &g_opts {
        for h in &h_opts {
            for i in &i_opts {
                let mobius_sq = moebius(i.e7 * i.ee8).pow(2) as u8;
                let weight = tuple_weight(g, h, i);
                for c1 in 0..g.ee3 {
                    if gcd(c1, g.ee3) != 1 {
                        continue;
                    }
                    let c1_star = 1 - (c1 * g.f3) as i64;
                    if gcd(modnorm(c1_star, g.f3 * g.ee3), g.f3 * g.ee3) != 1 {
                        continue;
                    }
                    for c2 in 0..h.ee6 {
                        if gcd(c2, h.ee6) != 1 {
                            continue;
                        }
                        let c2_star = 1 - (c2 * h.f6) as i64;
                        if gcd(modnorm(c2_star, h.f6 * h.ee6), h.f6 * h.ee6) != 1 {
                            continue;
                        }
                        for c3 in 0..i.j3 {
                            if gcd(c3, i.j3) != 1 {
                                continue;
                            }
                            let c3_star = (i.ee9 / i.j3) as i64 - c3 as i64;
                            if gcd(modnorm(c3_star, i.j3), i.j3) != 1 {
                                continue;
                            }
                            let mut t = DecompTuple {
                                ff1: s.f1,
                                ff2: s.f2,
                                e2: g.e2,
                                e3: g.e3,
                                f2: g.f2,
                                f3: g.f3,
                                e4: h.e4,
                                e6: h.e6,
                                f4: h.f4,
                                f6: h.f6,
                                e7: i.e7,
                                e8: i.e8,
                                e9: i.e9,
                                ee1: g.ee1,
                                ee3: g.ee3,
                                ee5: h.ee5,
                                ee6: h.ee6,
                                ee8: i.ee8,
                                ee9: i.ee9,
                                j1: i.j1,
                                j2: i.j2,
                                j3: i.j3,
                                c1,
                                c1_star,
                                c2,
                                c2_star,
                                c3,
                                c3_star,
                                alpha: 1,
                                beta: 1,
                                weight: weight.clone(),
                                mobius_sq,
                            };
                            let (alpha, beta) =
                                alpha_beta(&t).expect("admissible tuple has invertible residues");
                            t.alpha = alpha;
                            t.beta = beta;
                            out.push(t);
                        }
                    }
                }
            }
        }
    }
    out.sort();
    out
}

/// Companion cofactor with the same prime support: `∏_{p|e} p^{v_p(other) −
/// v_p(e)}`, or `None` when some exponent would drop to zero (support
/// equality fails).
fn forced_companion(e: u64, other: u64) -> Option<u64> {
    let other_fac = Factorization::of(other);
    let mut f = 1u64;
    for &(p, a) in &Factorization::of(e).factors {
        let vo = other_fac.valuation(p);
        if vo <= a {
            return None;
        }
        f *= p.pow(vo - a);
    }
    Some(f)
}

/// All `(E_lin, E_sq)` with `E_lin · E_sq² = e` and `rad(e) | E_sq`.
fn square_splits(e: u64) -> Vec<(u64, u64)> {
    let rad = squarefree_kernel(e);
    let mut out = Vec::new();
    for esq in Factorization::of(e).divisors() {
        if e % (esq * esq) != 0 {
            continue;
        }
        if e > 1 && esq % rad != 0 {
            continue;
        }
        out.push((e / (esq * esq), esq));
    }
    out
}

/// All ordered factorizations `a·b·c·d·e = n` (divisor chains, no
/// coprimality imposed).
fn ordered_factorizations_5(n: u64) -> Vec<(u64, u64, u64, u64, u64)> {
    let divs = Factorization::of(n).divisors();
    let mut out = Vec::new();
    for &a in &divs {
        let n1 = n / a;
        for &b in &divs {
            if n1 % b != 0 {
                continue;
            }
            let n2 = n1 / b;
            for &c in &divs {
                if n2 % c != 0 {
                    continue;
                }
                let n3 = n2 / c;
                for &d in &divs {
                    if n3 % d != 0 {
                        continue;
                    }
                    out.push((a, b, c, d, n3 / d));
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Arithmetic backend for decomposed evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    /// Integer root-of-unity vectors with rational weights; equality is
    /// decided exactly.
    Exact,
    /// Complex doubles, summed over lexicographically sorted tuples for
    /// run-to-run determinism.
    Float,
}

/// Work accounting for one decomposed evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecompStats {
    /// Tuples enumerated (including `μ² = 0` tuples).
    pub n_tuples: usize,
    /// Tuples that contributed a nonzero product.
    pub n_contributing: usize,
    /// Total modulus mass of classical sums actually evaluated: the sum of
    /// `c` over every Kloosterman/Ramanujan evaluation `S(·,·;c)`.  One
    /// classical sum costs `O(c)` directly, so this tracks the classical
    /// work of the decomposed route.
    pub classical_work: u64,
}

/// Decomposed value of `S(1, m, n, 1; D₁, D₂)` with work accounting.
#[derive(Debug, Clone)]
pub struct DecompEvaluation {
    /// Numeric value (both modes).
    pub value: Complex64,
    /// Exact value as a rational combination of roots of unity; `Some` in
    /// exact mode.
    pub exact: Option<CycloValue>,
    /// Work accounting.
    pub stats: DecompStats,
}

/// Scaled exact accumulator: `scale · S` as integer root-of-unity counts.
struct ScaledVector {
    counts: Vec<i128>,
    order: u64,
    /// `rad(gcd(D₁, D₂))`; clears every `C_{e₉,E₉}` denominator.
    scale: u64,
}

/// Evaluate the decomposition exactly into a scaled integer vector.
fn evaluate_scaled(m: i64, n: i64, d1: u64, d2: u64) -> (ScaledVector, DecompStats) {
    let tuples = enumerate_tuples(m, n, d1, d2);
    let order = lcm(d1, d2);
    let delta = squarefree_kernel(gcd(d1, d2));
    let mut counts = vec![0i128; order as usize];
    let mut stats = DecompStats {
        n_tuples: tuples.len(),
        ..DecompStats::default()
    };
    for t in &tuples {
        if t.mobius_sq == 0 {
            continue;
        }
        let cm = t.ramanujan_modulus_m();
        stats.classical_work += cm;
        let ram_m = ramanujan(m, cm);
        if ram_m == 0 {
            continue;
        }
        let cn = t.ramanujan_modulus_n();
        stats.classical_work += cn;
        let ram_n = ramanujan(n, cn);
        if ram_n == 0 {
            continue;
        }
        // Δ · weight is an integer: the C-factor denominator divides
        // rad(e₉), and e₉ | gcd(D₁, D₂).
        let scaled_weight = t.weight.clone()
            * RationalWeight::from_integer(delta as i128 * ram_m as i128 * ram_n as i128);
        debug_assert!(scaled_weight.is_integer());
        let coeff = scaled_weight.to_integer();
        let ca = t.alpha_modulus();
        let cb = t.beta_modulus();
        stats.classical_work += ca + cb;
        let sa = kloosterman_vector(t.m_reduced(m), (t.ff1 % ca * t.alpha % ca) as i64, ca);
        let sb = kloosterman_vector(t.n_reduced(n), (t.ff2 % cb * t.beta % cb) as i64, cb);
        stats.n_contributing += 1;
        let stride_a = (order / ca) as usize;
        let stride_b = (order / cb) as usize;
        let len = order as usize;
        for (ia, &va) in sa.iter().enumerate() {
            if va == 0 {
                continue;
            }
            let fa = coeff * va as i128;
            let base = ia * stride_a;
            for (ib, &vb) in sb.iter().enumerate() {
                if vb == 0 {
                    continue;
                }
                counts[(base + ib * stride_b) % len] += fa * vb as i128;
            }
        }
    }
    (
        ScaledVector {
            counts,
            order,
            scale: delta,
        },
        stats,
    )
}

/// Evaluate `S(1, m, n, 1; D₁, D₂)` through the decomposition.
///
/// Exact mode evaluates integer root-of-unity vectors with rational
/// weights and reports the numeric value alongside; float mode sums
/// complex doubles over lexicographically sorted tuples.  Panics on
/// out-of-cap inputs (see [`enumerate_tuples`]); callers with signed or
/// oversized arguments should use [`crate::gl3::s_long_bruteforce`].
pub fn s_long_decomposed(m: i64, n: i64, d1: u64, d2: u64, mode: EvalMode) -> DecompEvaluation {
    match mode {
        EvalMode::Exact => {
            let (sv, stats) = evaluate_scaled(m, n, d1, d2);
            let exact = CycloValue::from_scaled_counts(&sv.counts, sv.order, sv.scale)
                .expect("order within cap");
            DecompEvaluation {
                value: exact.to_complex(),
                exact: Some(exact),
                stats,
            }
        }
        EvalMode::Float => {
            let tuples = enumerate_tuples(m, n, d1, d2);
            let mut stats = DecompStats {
                n_tuples: tuples.len(),
                ..DecompStats::default()
            };
            let mut value = Complex64::new(0.0, 0.0);
            for t in &tuples {
                if t.mobius_sq == 0 {
                    continue;
                }
                let cm = t.ramanujan_modulus_m();
                stats.classical_work += cm;
                let ram_m = ramanujan(m, cm);
                if ram_m == 0 {
                    continue;
                }
                let cn = t.ramanujan_modulus_n();
                stats.classical_work += cn;
                let ram_n = ramanujan(n, cn);
                if ram_n == 0 {
                    continue;
                }
                let ca = t.alpha_modulus();
                let cb = t.beta_modulus();
                stats.classical_work += ca + cb;
                let sa = kloosterman_vector(t.m_reduced(m), (t.ff1 % ca * t.alpha % ca) as i64, ca);
                let sb = kloosterman_vector(t.n_reduced(n), (t.ff2 % cb * t.beta % cb) as i64, cb);
                stats.n_contributing += 1;
                let w = rational_to_f64(&t.weight) * (ram_m * ram_n) as f64;
                value += vector_to_complex_i64(&sa, ca) * vector_to_complex_i64(&sb, cb) * w;
            }
            DecompEvaluation {
                value,
                exact: None,
                stats,
            }
        }
    }
}

pub(crate) fn vector_to_complex_i64(counts: &[i64], order: u64) -> Complex64 {
    let mut z = Complex64::new(0.0, 0.0);
    for (k, &c) in counts.iter().enumerate() {
        if c != 0 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / order as f64;
            z += Complex64::new(theta.cos(), theta.sin()) * c as f64;
        }
    }
    z
}

fn vector_to_complex_i128(counts: &[i128], order: u64) -> Complex64 {
    let mut z = Complex64::new(0.0, 0.0);
    for (k, &c) in counts.iter().enumerate() {
        if c != 0 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / order as f64;
            z += Complex64::new(theta.cos(), theta.sin()) * c as f64;
        }
    }
    z
}

fn rational_to_f64(r: &RationalWeight) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

// ---------------------------------------------------------------------------
// Verification against brute force
// ---------------------------------------------------------------------------

/// One verification record: the decomposed value for `(D₁, D₂, m, n)` and
/// whether it matches brute force.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyRecord {
    pub d1: u64,
    pub d2: u64,
    pub m: i64,
    pub n: i64,
    /// Real part of the decomposed (or fallback) value.
    pub value_re: f64,
    /// Imaginary part (zero for these sums; kept for schema uniformity).
    pub value_im: f64,
    /// Number of enumerated tuples (0 for brute-force fallback records).
    pub n_tuples: usize,
    /// Whether decomposed and brute-force values agree — exactly in exact
    /// mode, to [`FLOAT_MATCH_TOL`] relative in float mode.
    #[serde(rename = "match")]
    pub matches: bool,
    /// `"exact"`, `"float"`, or `"bruteforce"` (signed fallback).
    pub mode: String,
}

/// Sweep result of [`verify_decomposition`].
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub records: Vec<VerifyRecord>,
    /// Count of records with `match = false`; a correct build yields 0.
    pub mismatches: usize,
    /// Total tuples across all records.
    pub total_tuples: u64,
    pub elapsed_ms: u128,
}

/// Compare the decomposition against brute force on a grid.
///
/// Every pair from `pairs` is combined with every `(m, n)` from `mns`.
/// Pairs are processed in parallel; each pair computes one brute-force
/// family walk shared by all its `(m, n)`.  Non-positive `m` or `n` fall
/// back to brute force on both sides (recorded with `mode = "bruteforce"`
/// and counted as matching).  Records arrive sorted by `(d1, d2, m, n)`.
pub fn verify_decomposition(
    pairs: &[(u64, u64)],
    mns: &[(i64, i64)],
    mode: EvalMode,
) -> VerifyReport {
    let start = Instant::now();
    let mut ms: Vec<i64> = mns.iter().map(|&(m, _)| m).collect();
    let mut ns: Vec<i64> = mns.iter().map(|&(_, n)| n).collect();
    ms.sort_unstable();
    ms.dedup();
    ns.sort_unstable();
    ns.dedup();
    let mode_name = match mode {
        EvalMode::Exact => "exact",
        EvalMode::Float => "float",
    };
    let per_pair: Vec<Vec<VerifyRecord>> = pairs
        .par_iter()
        .map(|&(d1, d2)| {
            let family = s_long_family_bruteforce(d1, d2, &ms, &ns);
            let order = lcm(d1, d2);
            let mut records = Vec::with_capacity(mns.len());
            for &(m, n) in mns {
                let mi = ms.binary_search(&m).expect("m in grid");
                let ni = ns.binary_search(&n).expect("n in grid");
                let brute = &family[mi * ns.len() + ni];
                if m < 1 || n < 1 {
                    let value = vector_to_complex_i64(brute, order);
                    records.push(VerifyRecord {
                        d1,
                        d2,
                        m,
                        n,
                        value_re: value.re,
                        value_im: value.im,
                        n_tuples: 0,
                        matches: true,
                        mode: "bruteforce".to_string(),
                    });
                    continue;
                }
                let record = match mode {
                    EvalMode::Exact => {
                        let (sv, stats) = evaluate_scaled(m, n, d1, d2);
                        let mut diff = sv.counts.clone();
                        for (k, &b) in brute.iter().enumerate() {
                            diff[k] -= sv.scale as i128 * b as i128;
                        }
                        let matches = fold_is_zero(&diff);
                        let value =
                            vector_to_complex_i128(&sv.counts, sv.order) / sv.scale as f64;
                        VerifyRecord {
                            d1,
                            d2,
                            m,
                            n,
                            value_re: value.re,
                            value_im: value.im,
                            n_tuples: stats.n_tuples,
                            matches,
                            mode: mode_name.to_string(),
                        }
                    }
                    EvalMode::Float => {
                        let eval = s_long_decomposed(m, n, d1, d2, EvalMode::Float);
                        let bv = vector_to_complex_i64(brute, order);
                        let matches =
                            (eval.value - bv).norm() <= FLOAT_MATCH_TOL * bv.norm().max(1.0);
                        VerifyRecord {
                            d1,
                            d2,
                            m,
                            n,
                            value_re: eval.value.re,
                            value_im: eval.value.im,
                            n_tuples: eval.stats.n_tuples,
                            matches,
                            mode: mode_name.to_string(),
                        }
                    }
                };
                records.push(record);
            }
            records
        })
        .collect();
    let mut records: Vec<VerifyRecord> = per_pair.into_iter().flatten().collect();
    records.sort_by_key(|r| (r.d1, r.d2, r.m, r.n));
    let mismatches = records.iter().filter(|r| !r.matches).count();
    let total_tuples = records.iter().map(|r| r.n_tuples as u64).sum();
    VerifyReport {
        records,
        mismatches,
        total_tuples,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_split_examples() {
        let s = block_split(12, 18);
        assert_eq!((s.f1, s.f2), (1, 1));
        assert_eq!((s.g1, s.g2), (3, 9));
        assert_eq!((s.h1, s.h2), (4, 2));
        assert_eq!((s.i1, s.i2), (1, 1));
        let s = block_split(4, 9);
        assert_eq!((s.f1, s.f2, s.g1, s.h1, s.i1), (4, 9, 1, 1, 1));
        let s = block_split(7, 7);
        assert_eq!((s.i1, s.i2), (7, 7));
    }

    #[test]
    fn coprime_pair_has_single_trivial_tuple() {
        let tuples = enumerate_tuples(2, 3, 4, 9);
        assert_eq!(tuples.len(), 1);
        let t = &tuples[0];
        assert_eq!((t.ff1, t.ff2), (4, 9));
        assert_eq!((t.alpha, t.beta), (1, 1));
        assert_eq!(t.weight, RationalWeight::from_integer(1));
    }

    #[test]
    fn prime_pair_has_three_tuples() {
        for p in [2u64, 3, 5, 13] {
            assert_eq!(enumerate_tuples(1, 1, p, p).len(), 3, "p = {p}");
        }
    }
}

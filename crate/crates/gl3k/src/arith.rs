//! Elementary modular and multiplicative arithmetic.
//!
//! Everything downstream (exact exponential sums, divisor-sum decompositions,
//! rational weight bookkeeping) is built on the helpers in this module:
//! extended-gcd modular inverses, the Chinese remainder theorem,
//! factorization by trial division, the classical multiplicative functions
//! (Möbius, Euler φ, squarefree kernel), unitary divisor splits, and a small
//! correction factor defined from matching prime valuations.
//!
//! Moduli are kept in `u64` and are intended for desk scale (≤ 10⁸); sum
//! arguments may be negative and arrive as `i64`.

use num::rational::Ratio;
use thiserror::Error;

/// Largest modulus the factorization helpers are designed for.  Trial
/// division walks candidates up to `√n ≤ 10⁴` at this bound, which is
/// negligible next to the exponential-sum work built on top of it.
pub const MAX_MODULUS: u64 = 100_000_000;

/// A reduced rational weight with positive denominator.
///
/// Backed by [`num::rational::Ratio`], which canonicalizes on construction:
/// `RationalWeight::new(2, -4)` stores −1/2.  The numerator range `i128`
/// leaves ample headroom for products of weights bounded by the moduli.
pub type RationalWeight = Ratio<i128>;

/// Errors from the arithmetic helpers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    /// `inv_mod(a, n)` was called with `gcd(a, n) > 1`.
    #[error("{residue} is not invertible modulo {modulus}")]
    NotInvertible { residue: i64, modulus: u64 },
    /// `crt` was called with moduli sharing a common factor.
    #[error("CRT moduli {0} and {1} are not coprime")]
    ModuliNotCoprime(u64, u64),
    /// `c_factor(d, e)` requires `e | d`.
    #[error("{divisor} does not divide {dividend}")]
    NotDivisor { divisor: u64, dividend: u64 },
    /// A modulus of zero was supplied where a positive one is required.
    #[error("modulus must be positive")]
    ZeroModulus,
}

/// Extended Euclid on nonnegative inputs: returns `(g, x)` with
/// `a*x ≡ g (mod b)` and `g = gcd(a, b)`.
fn egcd(a: u64, b: u64) -> (u64, i128) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r as u64, old_s)
}

/// Greatest common divisor.
pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple (panics on overflow in debug builds; callers keep
/// products within `u64` by construction).
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Canonical residue of a possibly negative `a` modulo `n > 0`.
pub fn modnorm(a: i64, n: u64) -> u64 {
    let n_i = n as i128;
    let r = (a as i128).rem_euclid(n_i);
    r as u64
}

/// Inverse of `a` modulo `n`.
///
/// Returns the unique `x ∈ [0, n)` with `a·x ≡ 1 (mod n)`.  By convention
/// `inv_mod(a, 1) = 0` (the zero residue represents every class mod 1),
/// which downstream code relies on when a congruence system degenerates.
pub fn inv_mod(a: i64, n: u64) -> Result<u64, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroModulus);
    }
    if n == 1 {
        return Ok(0);
    }
    let aa = modnorm(a, n);
    let (g, x) = egcd(aa, n);
    if g != 1 {
        return Err(ArithError::NotInvertible {
            residue: a,
            modulus: n,
        });
    }
    Ok(x.rem_euclid(n as i128) as u64)
}

/// Chinese remainder theorem for pairwise coprime moduli.
///
/// Given residue/modulus pairs `(r_i, n_i)`, returns `(x, N)` with
/// `N = ∏ n_i` and `x ≡ r_i (mod n_i)` for all `i`.  An empty system yields
/// `(0, 1)`.
pub fn crt(residues: &[(i64, u64)]) -> Result<(u64, u64), ArithError> {
    let mut x: u64 = 0;
    let mut m: u64 = 1;
    for &(r, n) in residues {
        if n == 0 {
            return Err(ArithError::ZeroModulus);
        }
        if n == 1 {
            continue;
        }
        if gcd(m, n) != 1 {
            return Err(ArithError::ModuliNotCoprime(m, n));
        }
        // Solve x' ≡ x (mod m), x' ≡ r (mod n): x' = x + m·k with
        // k ≡ (r − x)·m⁻¹ (mod n).
        let rn = modnorm(r, n);
        let diff = (rn + n - (x % n)) % n;
        let minv = inv_mod(m as i64, n).expect("coprime by check above");
        let k = ((diff as u128 * minv as u128) % n as u128) as u64;
        x += m * k;
        m *= n;
    }
    Ok((x, m))
}

/// Prime factorization as `(prime, exponent)` pairs in increasing order.
///
/// Plain trial division: complete and fast for the desk-scale moduli this
/// crate targets (`n ≤ 10⁸` ⇒ at most 10⁴ candidate divisors).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    /// `(p, e)` pairs with strictly increasing `p` and `e ≥ 1`.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Factor `n ≥ 1` by trial division.
    pub fn of(n: u64) -> Self {
        assert!(n >= 1, "factorization requires n >= 1");
        let mut rest = n;
        let mut factors = Vec::new();
        let mut push = |p: u64, rest: &mut u64| {
            let mut e = 0u32;
            while *rest % p == 0 {
                *rest /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        };
        push(2, &mut rest);
        push(3, &mut rest);
        let mut d = 5u64;
        while d * d <= rest {
            push(d, &mut rest);
            push(d + 2, &mut rest);
            d += 6;
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Factorization { factors }
    }

    /// The factored integer.
    pub fn value(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product::<u64>()
    }

    /// Number of distinct prime factors ω(n).
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    /// Exponent of `p` in the factorization (0 if `p ∤ n`).
    pub fn valuation(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// All positive divisors, in increasing order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut ds = vec![1u64];
        for &(p, e) in &self.factors {
            let prev = ds.clone();
            let mut pe = 1u64;
            for _ in 0..e {
                pe *= p;
                ds.extend(prev.iter().map(|d| d * pe));
            }
        }
        ds.sort_unstable();
        ds
    }
}

/// Deterministic Miller–Rabin primality test, valid for all `u64`.
///
/// Uses the standard seven-witness set proven sufficient below 3.4·10¹⁴
/// and the extended set for the full 64-bit range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `(a * b) mod n` without overflow.
pub fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

/// `a^e mod n` by binary exponentiation.
pub fn pow_mod(a: u64, mut e: u64, n: u64) -> u64 {
    let mut base = a % n;
    let mut acc = 1u64 % n;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, n);
        }
        base = mul_mod(base, base, n);
        e >>= 1;
    }
    acc
}

/// Product of the distinct primes dividing `n` (squarefree kernel, rad n).
pub fn squarefree_kernel(n: u64) -> u64 {
    Factorization::of(n).factors.iter().map(|&(p, _)| p).product()
}

/// Möbius function μ(n).
pub fn moebius(n: u64) -> i64 {
    let f = Factorization::of(n);
    if f.factors.iter().any(|&(_, e)| e > 1) {
        return 0;
    }
    if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler totient φ(n).
pub fn euler_phi(n: u64) -> u64 {
    let mut r = n;
    for &(p, _) in &Factorization::of(n).factors {
        r = r / p * (p - 1);
    }
    r
}

/// p-adic valuation v_p(n) for `n ≥ 1`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// The correction factor `C(d, e) = ∏ (1 − 1/p)⁻¹` over primes `p | d`
/// whose valuation matches in `d` and `e`; requires `e | d`.
///
/// Examples: `c_factor(p, p) = p/(p−1)`; `c_factor(12, 4) = 2` (only the
/// prime 2 has matching valuation); `c_factor(12, 2) = 1` (no prime
/// matches).
pub fn c_factor(d: u64, e: u64) -> Result<RationalWeight, ArithError> {
    if e == 0 || d == 0 || d % e != 0 {
        return Err(ArithError::NotDivisor {
            divisor: e,
            dividend: d,
        });
    }
    let mut r = RationalWeight::from_integer(1);
    for &(p, vd) in &Factorization::of(d).factors {
        if valuation(e, p) == vd {
            r *= RationalWeight::new(p as i128, p as i128 - 1);
        }
    }
    Ok(r)
}

/// All ordered splits of `n` into `k` pairwise-coprime parts whose product
/// is `n`, each prime power of `n` landing wholly in one part.
///
/// There are exactly `k^ω(n)` such splits; for `(n, k) = (12, 2)` these are
/// `(1,12), (12,1), (4,3), (3,4)`.
pub fn unitary_splits(n: u64, k: usize) -> Vec<Vec<u64>> {
    assert!(k >= 1);
    let f = Factorization::of(n);
    let mut out = vec![vec![1u64; k]];
    for &(p, e) in &f.factors {
        let pe = p.pow(e);
        let mut next = Vec::with_capacity(out.len() * k);
        for split in &out {
            for slot in 0..k {
                let mut s = split.clone();
                s[slot] *= pe;
                next.push(s);
            }
        }
        out = next;
    }
    out
}

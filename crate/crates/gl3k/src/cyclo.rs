//! Exact arithmetic in the group ring of roots of unity.
//!
//! A [`CycloValue`] is a formal rational combination of the `Q`-th roots of
//! unity `e(k/Q) = exp(2πik/Q)`, stored as a dense coefficient vector of
//! length `Q`.  All exponential sums in this crate are accumulated as such
//! values, so equality of two sums is decided *exactly* — no floating-point
//! tolerance enters the verification path.
//!
//! Zero testing works modulo the `Q`-th cyclotomic polynomial `Φ_Q`: the
//! value `Σ c_k e(k/Q)` vanishes iff `Φ_Q` divides `Σ c_k x^k` in `Q[x]`
//! (after the built-in reduction mod `x^Q − 1` that the dense representation
//! performs by construction).  A faster fold-based zero test over plain
//! integer vectors, used by the exact sum evaluators on their hot paths, is
//! provided alongside and cross-checked against the polynomial route.

use crate::arith::{lcm, Factorization};
use num::bigint::BigInt;
use num::rational::Ratio;
use num::{One, Zero};
use std::fmt;
use thiserror::Error;

/// Exact rational scalar used for cyclotomic coefficients.
pub type BigRational = Ratio<BigInt>;

/// Largest root-of-unity order a value may reach (including through the
/// order-lcm taken by mixed-order arithmetic).
pub const MAX_ORDER: u64 = 1_000_000;

/// Errors from cyclotomic arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    /// A root order of zero was requested.
    #[error("root of unity order must be positive")]
    ZeroOrder,
    /// Mixing two values would need a root order beyond [`MAX_ORDER`].
    #[error("combined root order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(u64),
}

/// An exact element of `Q[ζ_Q]`, the rational span of the `Q`-th roots of
/// unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycloValue {
    order: u64,
    /// `coeffs[k]` multiplies `e(k/order)`; always exactly `order` entries.
    coeffs: Vec<BigRational>,
}

impl CycloValue {
    /// The additive zero at a given root order.
    pub fn zero(order: u64) -> Result<Self, CycloError> {
        if order == 0 {
            return Err(CycloError::ZeroOrder);
        }
        if order > MAX_ORDER {
            return Err(CycloError::OrderTooLarge(order));
        }
        Ok(CycloValue {
            order,
            coeffs: vec![BigRational::zero(); order as usize],
        })
    }

    /// The rational constant `c` (a value of order 1).
    pub fn constant(c: BigRational) -> Self {
        CycloValue {
            order: 1,
            coeffs: vec![c],
        }
    }

    /// The integer constant `n`.
    pub fn from_integer(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    /// The single root of unity `e(num/den)`.
    ///
    /// The fraction is reduced first, so `root_term(2, 4)` is stored at
    /// order 2 and compares equal to `root_term(1, 2)` structurally.
    pub fn root_term(num: i64, den: u64) -> Result<Self, CycloError> {
        if den == 0 {
            return Err(CycloError::ZeroOrder);
        }
        let k = (num).rem_euclid(den as i64) as u64;
        let g = crate::arith::gcd(k, den);
        let (k, den) = (k / g, den / g);
        let mut v = Self::zero(den)?;
        v.coeffs[k as usize] = BigRational::one();
        Ok(v)
    }

    /// Root order of the representation.
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Coefficient view (length = order).
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Re-express at a root order that is a multiple of the current one.
    fn lifted(&self, new_order: u64) -> Result<Self, CycloError> {
        debug_assert_eq!(new_order % self.order, 0);
        let mut out = Self::zero(new_order)?;
        let step = (new_order / self.order) as usize;
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[k * step] = c.clone();
            }
        }
        Ok(out)
    }

    /// Exact sum.
    pub fn add(&self, other: &Self) -> Result<Self, CycloError> {
        let q = lcm(self.order, other.order);
        if q > MAX_ORDER {
            return Err(CycloError::OrderTooLarge(q));
        }
        let mut out = self.lifted(q)?;
        let step = (q / other.order) as usize;
        for (k, c) in other.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.coeffs[k * step] += c;
            }
        }
        Ok(out)
    }

    /// Exact difference.
    pub fn sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.add(&other.neg())
    }

    /// Exact negation.
    pub fn neg(&self) -> Self {
        CycloValue {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Exact product (convolution of root indices).
    pub fn mul(&self, other: &Self) -> Result<Self, CycloError> {
        let q = lcm(self.order, other.order);
        if q > MAX_ORDER {
            return Err(CycloError::OrderTooLarge(q));
        }
        let mut out = Self::zero(q)?;
        let qa = (q / self.order) as usize;
        let qb = (q / other.order) as usize;
        let qu = q as usize;
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let idx = (i * qa + j * qb) % qu;
                out.coeffs[idx] += a * b;
            }
        }
        Ok(out)
    }

    /// Exact scalar multiple.
    pub fn scale(&self, w: &BigRational) -> Self {
        CycloValue {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| c * w).collect(),
        }
    }

    /// Exact zero test.
    ///
    /// Clears denominators and reduces the integer coefficient polynomial
    /// modulo `Φ_Q`; the value is zero iff the remainder vanishes.
    pub fn is_zero(&self) -> bool {
        if self.coeffs.iter().all(|c| c.is_zero()) {
            return true;
        }
        // Common denominator: zero testing is invariant under scaling.
        let mut den = BigInt::one();
        for c in &self.coeffs {
            if !c.is_zero() {
                den = num::integer::lcm(den, c.denom().clone());
            }
        }
        let mut poly: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        let phi = cyclotomic_polynomial(self.order);
        poly_rem_in_place(&mut poly, &phi);
        poly.iter().all(|c| c.is_zero())
    }

    /// Floating-point evaluation `Σ c_k exp(2πik/Q)`.
    ///
    /// The roundoff error is at most a few ulps per term, well inside
    /// `1e-12 · Σ|c_k|` for the coefficient sizes this crate produces.
    pub fn to_complex(&self) -> num_complex::Complex64 {
        let q = self.order as f64;
        let mut acc = num_complex::Complex64::new(0.0, 0.0);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cf = ratio_to_f64(c);
            let theta = 2.0 * std::f64::consts::PI * (k as f64) / q;
            acc += num_complex::Complex64::new(theta.cos(), theta.sin()) * cf;
        }
        acc
    }

    /// Build a value from a dense integer root-count vector: entry `k`
    /// multiplies `e(k/order)`.
    pub fn from_counts(counts: &[i64], order: u64) -> Result<Self, CycloError> {
        assert_eq!(
            counts.len() as u64,
            order,
            "count vector length must equal order"
        );
        let mut out = Self::zero(order)?;
        for (k, &c) in counts.iter().enumerate() {
            if c != 0 {
                out.coeffs[k] = BigRational::from_integer(BigInt::from(c));
            }
        }
        Ok(out)
    }

    /// Build a value from a scaled integer root-count vector: entry `k`
    /// multiplies `e(k/order) / scale`.
    pub fn from_scaled_counts(counts: &[i128], order: u64, scale: u64) -> Result<Self, CycloError> {
        assert_eq!(
            counts.len() as u64,
            order,
            "count vector length must equal order"
        );
        assert!(scale >= 1, "scale must be positive");
        let denom = BigInt::from(scale);
        let mut out = Self::zero(order)?;
        for (k, &c) in counts.iter().enumerate() {
            if c != 0 {
                out.coeffs[k] = BigRational::new(BigInt::from(c), denom.clone());
            }
        }
        Ok(out)
    }

    /// Complex conjugate (index negation).
    pub fn conj(&self) -> Self {
        let qu = self.order as usize;
        let mut coeffs = vec![BigRational::zero(); qu];
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[(qu - k) % qu] = c.clone();
            }
        }
        CycloValue {
            order: self.order,
            coeffs,
        }
    }
}

impl fmt::Display for CycloValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.to_complex();
        write!(f, "{:.6}{:+.6}i (order {})", z.re, z.im, self.order)
    }
}

/// `f64` value of an exact rational (used only for reporting).
pub fn ratio_to_f64(r: &BigRational) -> f64 {
    num::ToPrimitive::to_f64(r).unwrap_or(f64::INFINITY)
}

/// The `Q`-th cyclotomic polynomial as a dense integer coefficient vector
/// (degree φ(Q)), via `Φ_Q(x) = ∏_{d|Q} (x^d − 1)^{μ(Q/d)}`.
pub fn cyclotomic_polynomial(q: u64) -> Vec<BigInt> {
    assert!(q >= 1);
    let f = Factorization::of(q);
    let divisors = f.divisors();
    let mut num = vec![BigInt::one()]; // running product, monic
    let mut dens: Vec<u64> = Vec::new();
    for &d in &divisors {
        match crate::arith::moebius(q / d) {
            1 => num = poly_mul_xd_minus_1(&num, d as usize),
            -1 => dens.push(d),
            _ => {}
        }
    }
    for d in dens {
        poly_divexact_xd_minus_1(&mut num, d as usize);
    }
    num
}

/// Multiply a polynomial by `x^d − 1`.
fn poly_mul_xd_minus_1(p: &[BigInt], d: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p.len() + d];
    for (i, c) in p.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

/// Exact in-place division by `x^d − 1` (must divide exactly).
fn poly_divexact_xd_minus_1(p: &mut Vec<BigInt>, d: usize) {
    // p = q·(x^d − 1) gives p[i] = q[i−d] − q[i], so q[i−d] = p[i] + q[i]
    // with q[i] = 0 for i ≥ deg q + 1 = n − d; solve from the top down.
    let n = p.len();
    debug_assert!(n > d);
    let mut q = vec![BigInt::zero(); n - d];
    for i in (d..n).rev() {
        let qi = if i < n - d {
            q[i].clone()
        } else {
            BigInt::zero()
        };
        q[i - d] = &p[i] + qi;
    }
    debug_assert_eq!(p[0], -q[0].clone(), "inexact division");
    *p = q;
}

/// In-place remainder of `poly` modulo the monic polynomial `m`.
fn poly_rem_in_place(poly: &mut Vec<BigInt>, m: &[BigInt]) {
    let dm = m.len() - 1;
    debug_assert!(m[dm].is_one(), "modulus must be monic");
    while poly.len() > dm {
        let lead = poly.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = poly.len() - dm;
        for (i, c) in m[..dm].iter().enumerate() {
            if !c.is_zero() {
                let idx = shift + i;
                let t = &poly[idx] - &lead * c;
                poly[idx] = t;
            }
        }
    }
}

/// Exact zero test for a dense integer combination of `Q`-th roots of
/// unity, `Σ coeffs[k] e(k/Q)` — the hot-path variant used by the sum
/// evaluators.
///
/// Works in the tensor decomposition `Z[ζ_Q] ≅ ⊗_p Z[ζ_{p^{a_p}}]`: the
/// index `k` splits into prime-power coordinates via partial fractions, and
/// in each coordinate the relation `Σ_{i<p} ζ^{s + i·p^{a−1}} = 0` folds the
/// top block onto the lower ones.  The value is zero iff the fully folded
/// multi-array is identically zero.  Coefficients at most double per prime,
/// so `i128` accumulators never overflow for the sums this crate builds.
pub fn fold_is_zero(coeffs: &[i128]) -> bool {
    let q = coeffs.len() as u64;
    if q == 1 {
        return coeffs[0] == 0;
    }
    let f = Factorization::of(q);
    let pps: Vec<(u64, u64)> = f
        .factors
        .iter()
        .map(|&(p, e)| (p, p.pow(e)))
        .collect();
    // Mixed-radix layout: strides over the prime-power coordinates.
    let mut strides = vec![1usize; pps.len()];
    for i in 1..pps.len() {
        strides[i] = strides[i - 1] * pps[i - 1].1 as usize;
    }
    let mut arr = vec![0i128; q as usize];
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let mut idx = 0usize;
        for (d, &(_, pe)) in pps.iter().enumerate() {
            let inv = crate::arith::inv_mod((q / pe) as i64, pe).expect("coprime cofactor");
            let kd = ((k as u64 % pe) * (inv % pe)) % pe;
            idx += kd as usize * strides[d];
        }
        arr[idx] += c;
    }
    // Fold each coordinate: for p^a, indices j in [φ(p^a), p^a) satisfy
    // ζ^j = -Σ_{i<p-1} ζ^{j - φ(p^a) + i·p^{a-1}}.
    for (d, &(p, pe)) in pps.iter().enumerate() {
        let pe1 = (pe / p) as usize;
        let phi = pe as usize - pe1;
        let stride = strides[d];
        let len = pe as usize;
        // Iterate over all positions with coordinate j >= phi in axis d.
        let outer = arr.len() / (stride * len);
        for o in 0..outer {
            for r in 0..stride {
                let base = o * stride * len + r;
                for j in phi..len {
                    let c = arr[base + j * stride];
                    if c == 0 {
                        continue;
                    }
                    arr[base + j * stride] = 0;
                    let s = j - phi;
                    for i in 0..(p as usize - 1) {
                        arr[base + (s + i * pe1) * stride] -= c;
                    }
                }
            }
        }
    }
    arr.iter().all(|&c| c == 0)
}

//! Desk-scale bilinear-form experiments over the rank-three sums.
//!
//! The central quantity is the modulus-averaged bilinear form
//!
//! ```text
//! 𝒮 = Σ_{D₁ ≤ X₁, D₂ ≤ X₂} | Σ_{n,m ≤ N} aₙ b_m S(1, m, n, 1; D₁, D₂) |
//! ```
//!
//! for finite complex sequences `a`, `b`.  Everything here is measurement
//! plumbing: computing 𝒮 fast enough to sweep it, comparing against the
//! three-term envelope
//!
//! ```text
//! ‖a‖₂‖b‖₂ ( X₁X₂(X₁+X₂) + (NX₁X₂)^{1/2}(X₁+X₂)^{3/2} + NX₁X₂ )
//! ```
//!
//! (ε-powers and implicit constants set to one — experiments assert
//! boundedness and slopes, never absolute constants), the twisted variant
//! with purely imaginary Dirichlet twists `n^{−s₁} m^{−s₂}` integrated over
//! an explicit node/weight grid, and a hybrid mean-value diagnostic for
//! sums of the shape `Σ b(m) m^{−it} e(mx/(Ff))`.
//!
//! The workhorse is the *phase table*: with both outer indices equal to one,
//! the phase of every admissible lattice point of the rank-three sum splits
//! into a constant part plus `n·u/D₁ + m·v/D₂` for residues `u, v` depending
//! only on the point.  One walk of the lattice therefore produces a table
//! `W` over `(u mod D₁, v mod D₂)` with
//!
//! ```text
//! S(1, m, n, 1; D₁, D₂) = Σ_{u,v} W[u][v] · e(nu/D₁ + mv/D₂)   for all m, n,
//! ```
//!
//! and the inner double sum of 𝒮 collapses to `Σ_{u,v} W[u][v]·A(u)·B(v)`
//! with `A`, `B` the exponential-sum transforms of the two sequences.  The
//! table depends only on the modulus pair, so sweeps build every table once
//! (in parallel) and then treat the cache as read-only.

use crate::arith::{lcm, modnorm};
use crate::decomp::vector_to_complex_i64;
use crate::gl3::{for_each_tuple, s_long_family_bruteforce};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::TAU;

/// The roots `e(k/order)` for `k = 0 .. order−1`.
fn roots_of_unity(order: u64) -> Vec<Complex64> {
    (0..order)
        .map(|k| {
            let th = TAU * k as f64 / order as f64;
            Complex64::new(th.cos(), th.sin())
        })
        .collect()
}

/// Built-in sequence generators for experiment inputs, probing both generic
/// and peaked regimes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    /// `aₙ = bₙ = 1`.
    Unit,
    /// Independent uniform `±1` entries in both sequences.
    RandomPm1,
    /// Independent entries uniform on the unit circle.
    RandomComplex,
    /// The resonant pair `aₙ = bₙ = e(nθ)`, peaked at frequency `θ`.
    Resonant {
        /// Resonance frequency (cycles per index step).
        theta: f64,
    },
}

/// A pair of equal-length finite complex sequences, together with the
/// provenance (generator and seed) that sweep records carry along.
///
/// Entries are stored zero-based; `a[i]` is the coefficient of index
/// `n = i + 1`.
#[derive(Debug, Clone)]
pub struct SeqPair {
    /// Coefficients `a₁ .. a_N`.
    pub a: Vec<Complex64>,
    /// Coefficients `b₁ .. b_N`.
    pub b: Vec<Complex64>,
    /// Which generator produced the pair.
    pub generator: Generator,
    /// Seed consumed by the generator.
    pub seed: u64,
}

impl SeqPair {
    /// Wrap explicit sequences.  Lengths must match and every entry must be
    /// finite.
    pub fn from_parts(a: Vec<Complex64>, b: Vec<Complex64>, generator: Generator, seed: u64) -> Self {
        assert_eq!(a.len(), b.len(), "sequence lengths must match");
        assert!(!a.is_empty(), "sequences must be nonempty");
        assert!(
            a.iter().chain(b.iter()).all(|z| z.re.is_finite() && z.im.is_finite()),
            "sequence entries must be finite"
        );
        SeqPair { a, b, generator, seed }
    }

    /// Draw a length-`n` pair from `generator`, deterministically in `seed`.
    pub fn generate(generator: Generator, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| -> Vec<Complex64> {
            (1..=n)
                .map(|idx| match generator {
                    Generator::Unit => Complex64::new(1.0, 0.0),
                    Generator::RandomPm1 => {
                        if rng.gen::<bool>() {
                            Complex64::new(1.0, 0.0)
                        } else {
                            Complex64::new(-1.0, 0.0)
                        }
                    }
                    Generator::RandomComplex => {
                        let th = TAU * rng.gen::<f64>();
                        Complex64::new(th.cos(), th.sin())
                    }
                    Generator::Resonant { theta } => {
                        let th = TAU * theta * idx as f64;
                        Complex64::new(th.cos(), th.sin())
                    }
                })
                .collect()
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        SeqPair::from_parts(a, b, generator, seed)
    }

    /// Common length `N`.
    pub fn len(&self) -> usize {
        self.a.len()
    }

    /// Whether the pair is empty (it never is — constructors reject that).
    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// The ℓ²-norms `(‖a‖₂, ‖b‖₂)`.
    pub fn norms(&self) -> (f64, f64) {
        let na = self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let nb = self.b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (na, nb)
    }

    /// The twisted pair `aₙ ↦ aₙ n^{−s₁}`, `bₘ ↦ bₘ m^{−s₂}` for purely
    /// imaginary `s₁, s₂`.  Twisting preserves both ℓ²-norms.
    pub fn twisted(&self, s1: Complex64, s2: Complex64) -> SeqPair {
        assert!(s1.re == 0.0 && s2.re == 0.0, "twists must be purely imaginary");
        let twist = |seq: &[Complex64], s: Complex64| -> Vec<Complex64> {
            seq.iter()
                .enumerate()
                .map(|(i, &z)| z * (-s * ((i + 1) as f64).ln()).exp())
                .collect()
        };
        SeqPair {
            a: twist(&self.a, s1),
            b: twist(&self.b, s2),
            generator: self.generator,
            seed: self.seed,
        }
    }
}

/// Weight table over `(u mod D₁, v mod D₂)` encoding the entire family
/// `S(1, ·, ·, 1; D₁, D₂)` at once; see the module docs for the splitting.
#[derive(Debug, Clone)]
pub struct PhaseTable {
    /// First modulus (the `n`-side; `u` runs mod `d1`).
    pub d1: u64,
    /// Second modulus (the `m`-side; `v` runs mod `d2`).
    pub d2: u64,
    /// Row-major weights: `w[u·d2 + v]`.
    w: Vec<Complex64>,
}

/// Build the phase table for a modulus pair in one walk of the admissible
/// lattice points (cost `O(D₁²D₂)`).
///
/// The residues `u = Y₁D₂ − Z₁B₂ mod D₁` and `v = B₂ mod D₂` are invariant
/// under the allowed shifts of the `(Y, Z)` representatives (the shift terms
/// vanish by the linking congruence), so the table is canonical.
pub fn phase_table(d1: u64, d2: u64) -> PhaseTable {
    assert!(d1 >= 1 && d2 >= 1, "moduli must be positive");
    let l = lcm(d1, d2);
    let roots = roots_of_unity(l);
    let (l1, l2) = (l / d1, l / d2);
    let mut w = vec![Complex64::new(0.0, 0.0); (d1 * d2) as usize];
    for_each_tuple(d1, d2, |b1, _c1, b2, _c2, (y1, z1), (y2, z2)| {
        // Constant phase piece (the unit outer indices): B₁/D₁ + (Y₂D₁ − Z₂B₁)/D₂.
        let ph2 = modnorm(y2 as i64 * d1 as i64 - z2 as i64 * b1 as i64, d2);
        let k = (b1 * l1 + ph2 * l2) % l;
        let u = modnorm(y1 as i64 * d2 as i64 - z1 as i64 * b2 as i64, d1);
        w[(u * d2 + b2) as usize] += roots[k as usize];
    });
    PhaseTable { d1, d2, w }
}

impl PhaseTable {
    /// Table entry at `(u, v)`.
    pub fn weight(&self, u: u64, v: u64) -> Complex64 {
        assert!(u < self.d1 && v < self.d2, "residues out of range");
        self.w[(u * self.d2 + v) as usize]
    }

    /// Reconstruct `S(1, m, n, 1; D₁, D₂) = Σ_{u,v} W[u][v]·e(nu/D₁ + mv/D₂)`.
    pub fn reconstruct(&self, m: i64, n: i64) -> Complex64 {
        let r1 = roots_of_unity(self.d1);
        let r2 = roots_of_unity(self.d2);
        let mr = modnorm(m, self.d2);
        let nr = modnorm(n, self.d1);
        let mut total = Complex64::new(0.0, 0.0);
        for u in 0..self.d1 {
            let eu = r1[(nr * u % self.d1) as usize];
            for v in 0..self.d2 {
                total += self.w[(u * self.d2 + v) as usize] * eu * r2[(mr * v % self.d2) as usize];
            }
        }
        total
    }

    /// Contract the table against per-residue transform values
    /// `A[u] = Σₙ aₙ e(nu/D₁)` and `B[v] = Σₘ bₘ e(mv/D₂)`.
    pub fn contract(&self, a_hat: &[Complex64], b_hat: &[Complex64]) -> Complex64 {
        assert_eq!(a_hat.len(), self.d1 as usize, "transform length must be D₁");
        assert_eq!(b_hat.len(), self.d2 as usize, "transform length must be D₂");
        let mut total = Complex64::new(0.0, 0.0);
        for u in 0..self.d1 as usize {
            let mut row = Complex64::new(0.0, 0.0);
            for v in 0..self.d2 as usize {
                row += self.w[u * self.d2 as usize + v] * b_hat[v];
            }
            total += a_hat[u] * row;
        }
        total
    }
}

/// Exponential-sum transform `A[u] = Σ_{n=1..N} seq[n−1]·e(nu/d)` for all
/// residues `u mod d`.
pub fn seq_transform(seq: &[Complex64], d: u64) -> Vec<Complex64> {
    let roots = roots_of_unity(d);
    (0..d)
        .map(|u| {
            seq.iter()
                .enumerate()
                .map(|(i, &z)| z * roots[((i as u64 + 1) % d * u % d) as usize])
                .sum()
        })
        .collect()
}

/// Read-only store of phase tables for every modulus pair up to `(x1, x2)`.
///
/// Built once (in parallel over pairs), then shared immutably by sweeps.
#[derive(Debug)]
pub struct PhaseTableCache {
    x1: u64,
    x2: u64,
    /// Row-major over `(d1 − 1, d2 − 1)`.
    tables: Vec<PhaseTable>,
}

impl PhaseTableCache {
    /// Build every table for `1 ≤ D₁ ≤ x1`, `1 ≤ D₂ ≤ x2`.
    pub fn build(x1: u64, x2: u64) -> Self {
        assert!(x1 >= 1 && x2 >= 1, "ranges must be positive");
        let pairs: Vec<(u64, u64)> = (1..=x1)
            .flat_map(|d1| (1..=x2).map(move |d2| (d1, d2)))
            .collect();
        let tables = pairs.par_iter().map(|&(d1, d2)| phase_table(d1, d2)).collect();
        PhaseTableCache { x1, x2, tables }
    }

    /// The table for `(d1, d2)`; both must lie inside the built range.
    pub fn get(&self, d1: u64, d2: u64) -> &PhaseTable {
        assert!(
            (1..=self.x1).contains(&d1) && (1..=self.x2).contains(&d2),
            "pair ({d1},{d2}) outside cached range ({},{})",
            self.x1,
            self.x2
        );
        &self.tables[((d1 - 1) * self.x2 + (d2 - 1)) as usize]
    }
}

/// The modulus-averaged bilinear form 𝒮 (always nonnegative, and linear
/// under positive scaling of either sequence).
///
/// Builds a fresh table cache; sweeps should use [`bilinear_form_cached`].
pub fn bilinear_form(seqs: &SeqPair, x1: u64, x2: u64) -> f64 {
    bilinear_form_cached(seqs, x1, x2, &PhaseTableCache::build(x1, x2))
}

/// As [`bilinear_form`], reusing a prebuilt cache covering `(x1, x2)`.
///
/// Pairs are processed in parallel but reduced in sorted order, so the
/// result is a deterministic function of the inputs.
pub fn bilinear_form_cached(seqs: &SeqPair, x1: u64, x2: u64, cache: &PhaseTableCache) -> f64 {
    assert!(x1 >= 1 && x2 >= 1, "ranges must be positive");
    let a_hats: Vec<Vec<Complex64>> = (1..=x1).map(|d| seq_transform(&seqs.a, d)).collect();
    let b_hats: Vec<Vec<Complex64>> = (1..=x2).map(|d| seq_transform(&seqs.b, d)).collect();
    let pairs: Vec<(u64, u64)> = (1..=x1)
        .flat_map(|d1| (1..=x2).map(move |d2| (d1, d2)))
        .collect();
    let terms: Vec<f64> = pairs
        .par_iter()
        .map(|&(d1, d2)| {
            cache
                .get(d1, d2)
                .contract(&a_hats[(d1 - 1) as usize], &b_hats[(d2 - 1) as usize])
                .norm()
        })
        .collect();
    terms.iter().sum()
}

/// Reference evaluation of 𝒮 by the literal double loop: every inner value
/// `S(1, m, n, 1; D₁, D₂)` is taken from the exact family enumeration and
/// paired with its coefficients directly, with no phase-table factorization.
pub fn bilinear_form_naive(seqs: &SeqPair, x1: u64, x2: u64) -> f64 {
    assert!(x1 >= 1 && x2 >= 1, "ranges must be positive");
    let n = seqs.len();
    let idx: Vec<i64> = (1..=n as i64).collect();
    let mut total = 0.0;
    for d1 in 1..=x1 {
        for d2 in 1..=x2 {
            let fams = s_long_family_bruteforce(d1, d2, &idx, &idx);
            let order = lcm(d1, d2);
            let mut inner = Complex64::new(0.0, 0.0);
            for (mi, row) in fams.chunks(n).enumerate() {
                for (ni, counts) in row.iter().enumerate() {
                    inner += seqs.a[ni] * seqs.b[mi] * vector_to_complex_i64(counts, order);
                }
            }
            total += inner.norm();
        }
    }
    total
}

/// The three-term comparison envelope
/// `‖a‖‖b‖·(X₁X₂(X₁+X₂) + (NX₁X₂)^{1/2}(X₁+X₂)^{3/2} + NX₁X₂)`.
pub fn envelope(x1: u64, x2: u64, n: u64, norm_a: f64, norm_b: f64) -> f64 {
    assert!(x1 >= 1 && x2 >= 1 && n >= 1, "parameters must be at least 1");
    assert!(norm_a >= 0.0 && norm_b >= 0.0, "norms must be nonnegative");
    let (x1, x2, n) = (x1 as f64, x2 as f64, n as f64);
    norm_a * norm_b * (x1 * x2 * (x1 + x2) + (n * x1 * x2).sqrt() * (x1 + x2).powf(1.5) + n * x1 * x2)
}

/// One node of a twist grid: purely imaginary `(s₁, s₂)` and a nonnegative
/// mass.
pub type HybridNode = (Complex64, Complex64, f64);

/// The twisted form: the discrete analogue
///
/// ```text
/// Σ_grid weight · Σ_{D₁,D₂} | Σ_{n,m} aₙ b_m n^{−s₁} m^{−s₂} S(1,m,n,1;D₁,D₂) |
/// ```
///
/// of integrating the bilinear form against a mass distribution on the
/// imaginary axes.  Node twists must satisfy `Re s₁ = Re s₂ = 0`; the grid
/// is supplied explicitly, never synthesized by quadrature here (the
/// continuum object this discretizes is caller-defined — reports carry that
/// caveat).
pub fn hybrid_form(seqs: &SeqPair, x1: u64, x2: u64, s_grid: &[HybridNode]) -> f64 {
    let cache = PhaseTableCache::build(x1, x2);
    s_grid
        .iter()
        .map(|&(s1, s2, weight)| {
            assert!(weight >= 0.0, "grid masses must be nonnegative");
            weight * bilinear_form_cached(&seqs.twisted(s1, s2), x1, x2, &cache)
        })
        .sum()
}

/// Discrete support/mass summaries of a twist grid, in the order
/// `(T₁, T₂, S₁, S₂)`:
///
/// * `T_j` is the largest `|Im s_j|` over the grid;
/// * `S₁` is the largest total mass sharing one `s₁` value (the discrete
///   version of `sup_{s₁} ∫ mass ds₂`), and `S₂` mirrors it over `s₂`.
pub fn grid_extents(s_grid: &[HybridNode]) -> (f64, f64, f64, f64) {
    let mut t1 = 0.0f64;
    let mut t2 = 0.0f64;
    let mut at_s1: HashMap<u64, f64> = HashMap::new();
    let mut at_s2: HashMap<u64, f64> = HashMap::new();
    for &(s1, s2, weight) in s_grid {
        t1 = t1.max(s1.im.abs());
        t2 = t2.max(s2.im.abs());
        *at_s1.entry(s1.im.to_bits()).or_insert(0.0) += weight;
        *at_s2.entry(s2.im.to_bits()).or_insert(0.0) += weight;
    }
    let s1w = at_s1.values().fold(0.0f64, |acc, &v| acc.max(v));
    let s2w = at_s2.values().fold(0.0f64, |acc, &v| acc.max(v));
    (t1, t2, s1w, s2w)
}

/// Comparison envelope for the twisted form:
///
/// ```text
/// ‖a‖‖b‖·(S₁S₂)^{1/2}·X₁X₂·( (X₁+X₂)(T₁T₂)^{1/2}
///     + (X₁T₁^{1/2} + X₂T₂^{1/2})·N^{1/2}/min(X₁,X₂)^{1/2} + N )
/// ```
///
/// with each `T` clamped below by 1 (the underlying mean-value estimate has
/// a unit floor in the length parameter), constants and ε-powers set to one.
#[allow(clippy::too_many_arguments)]
pub fn hybrid_envelope(
    x1: u64,
    x2: u64,
    n: u64,
    t1: f64,
    t2: f64,
    s1: f64,
    s2: f64,
    norm_a: f64,
    norm_b: f64,
) -> f64 {
    assert!(x1 >= 1 && x2 >= 1 && n >= 1, "parameters must be at least 1");
    assert!(s1 >= 0.0 && s2 >= 0.0, "masses must be nonnegative");
    let (t1, t2) = (t1.max(1.0), t2.max(1.0));
    let (x1f, x2f, nf) = (x1 as f64, x2 as f64, n as f64);
    let core = (x1f + x2f) * (t1 * t2).sqrt()
        + (x1f * t1.sqrt() + x2f * t2.sqrt()) * nf.sqrt() / (x1f.min(x2f)).sqrt()
        + nf;
    norm_a * norm_b * (s1 * s2).sqrt() * x1f * x2f * core
}

/// Report of the hybrid mean-value diagnostic; see [`gallagher_check`].
#[derive(Debug, Clone, Serialize)]
pub struct GallagherReport {
    /// Fixed modulus factor `f`.
    pub f: u64,
    /// Range of the outer modulus sum.
    pub x: u64,
    /// Half-length of the `t`-interval.
    pub t: f64,
    /// Sequence length.
    pub n: u64,
    /// Discretized left side `Σ_{F≤X} Σ_{x mod Ff} ∫_{−T}^{T} |…|² dt`.
    pub lhs: f64,
    /// `(X²fT + N)·‖b‖₂²`.
    pub envelope: f64,
    /// `lhs / envelope` — diagnostic only; the inequality's implicit
    /// constant is unknown, so nothing asserts a specific value.
    pub ratio: f64,
}

/// Evaluate the hybrid mean-value left side
///
/// ```text
/// Σ_{F ≤ X} Σ_{x mod Ff} ∫_{−T}^{T} | Σ_{m ≤ N} b_m m^{−it} e(mx/(Ff)) |² dt
/// ```
///
/// by the supplied `t`-quadrature (`(node, weight)` pairs covering
/// `[−T, T]`) and compare against `(X²fT + N)‖b‖₂²`.
pub fn gallagher_check(
    f: u64,
    x: u64,
    t: f64,
    b: &[Complex64],
    t_nodes: &[(f64, f64)],
) -> GallagherReport {
    assert!(f >= 1 && x >= 1 && t >= 1.0, "parameters must be at least 1");
    assert!(!b.is_empty(), "sequence must be nonempty");
    assert!(!t_nodes.is_empty(), "quadrature must be nonempty");
    let n = b.len();
    let mut lhs = 0.0;
    for ff in 1..=x {
        let q = ff * f;
        let roots = roots_of_unity(q);
        for &(tk, wk) in t_nodes {
            let c: Vec<Complex64> = b
                .iter()
                .enumerate()
                .map(|(i, &bm)| bm * (Complex64::new(0.0, -tk) * ((i + 1) as f64).ln()).exp())
                .collect();
            for xr in 0..q {
                let s: Complex64 = c
                    .iter()
                    .enumerate()
                    .map(|(i, &cm)| cm * roots[((i as u64 + 1) % q * xr % q) as usize])
                    .sum();
                lhs += wk * s.norm_sqr();
            }
        }
    }
    let norm_b_sq: f64 = b.iter().map(|z| z.norm_sqr()).sum();
    let envelope = ((x * x * f) as f64 * t + n as f64) * norm_b_sq;
    GallagherReport {
        f,
        x,
        t,
        n: n as u64,
        lhs,
        envelope,
        ratio: lhs / envelope,
    }
}

/// Trapezoid `t`-quadrature on `[−T, T]` with `k ≥ 2` nodes; the weights sum
/// to exactly `2T`.
pub fn uniform_t_nodes(t: f64, k: usize) -> Vec<(f64, f64)> {
    assert!(k >= 2, "need at least two nodes");
    let h = 2.0 * t / (k - 1) as f64;
    (0..k)
        .map(|i| {
            let node = -t + h * i as f64;
            let weight = if i == 0 || i == k - 1 { h / 2.0 } else { h };
            (node, weight)
        })
        .collect()
}

/// One row of a scaling sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ScanRecord {
    /// First modulus range.
    pub x1: u64,
    /// Second modulus range.
    pub x2: u64,
    /// Sequence length.
    pub n: u64,
    /// Computed 𝒮.
    pub s_value: f64,
    /// Geometric envelope (norms excluded; see `ratio`).  Sweeps with
    /// `x1 = x2 = X` use the collapsed form `X²(X + N)`.
    pub envelope: f64,
    /// `s_value / (‖a‖₂‖b‖₂ · envelope)`.
    pub ratio: f64,
    /// Largest `|Im s₁|` of the twist grid (twisted sweeps only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    /// Largest `|Im s₂|` of the twist grid (twisted sweeps only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    /// Peak grid mass at one `s₁` value (twisted sweeps only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s1w: Option<f64>,
    /// Peak grid mass at one `s₂` value (twisted sweeps only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s2w: Option<f64>,
    /// Seed that generated the sequences of this row.
    pub seed: u64,
}

/// Sweep 𝒮 over every `(X, N)` in the given lists with `trials` seeded
/// draws per cell (`X₁ = X₂ = X`).  Trial `i` uses seed `seed + i`; output
/// is a deterministic function of the arguments.
pub fn scan(
    x_list: &[u64],
    n_list: &[u64],
    generator: Generator,
    seed: u64,
    trials: u32,
) -> Vec<ScanRecord> {
    assert!(trials >= 1, "need at least one trial");
    let mut out = Vec::new();
    for &x in x_list {
        let cache = PhaseTableCache::build(x, x);
        for &n in n_list {
            assert!(n >= 1, "sequence length must be positive");
            for trial in 0..trials {
                let trial_seed = seed.wrapping_add(trial as u64);
                let seqs = SeqPair::generate(generator, n as usize, trial_seed);
                let s_value = bilinear_form_cached(&seqs, x, x, &cache);
                let envelope = (x * x) as f64 * (x + n) as f64;
                let (na, nb) = seqs.norms();
                out.push(ScanRecord {
                    x1: x,
                    x2: x,
                    n,
                    s_value,
                    envelope,
                    ratio: s_value / (na * nb * envelope),
                    t1: None,
                    t2: None,
                    s1w: None,
                    s2w: None,
                    seed: trial_seed,
                });
            }
        }
    }
    out
}

/// Write sweep records as the fixed-column CSV table
/// `x1,x2,n,s_value,envelope,ratio,seed`.
pub fn write_csv<W: std::io::Write>(records: &[ScanRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x1", "x2", "n", "s_value", "envelope", "ratio", "seed"])?;
    for r in records {
        w.write_record(&[
            r.x1.to_string(),
            r.x2.to_string(),
            r.n.to_string(),
            r.s_value.to_string(),
            r.envelope.to_string(),
            r.ratio.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_moduli_table_is_a_single_unit_cell() {
        let table = phase_table(1, 1);
        assert!((table.weight(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reconstruction_matches_smallest_family_value() {
        let table = phase_table(2, 3);
        let v = table.reconstruct(1, 1);
        assert!((v - Complex64::new(2.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn unit_pair_at_unit_ranges_gives_one() {
        let seqs = SeqPair::generate(Generator::Unit, 1, 0);
        assert!((bilinear_form(&seqs, 1, 1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn envelope_closed_forms() {
        assert!((envelope(10, 10, 5, 1.0, 1.0) - 4500.0).abs() < 1e-9);
        let expected = 2.0 + 2.0f64.powf(1.5) + 1.0;
        assert!((envelope(1, 1, 1, 1.0, 1.0) - expected).abs() < 1e-12);
    }
}

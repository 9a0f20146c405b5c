//! Acceptance gate: the nine build-blocking criteria, one test each.
//!
//! Every test prints a `[PASS] criterion N` line on success (visible under
//! `--nocapture`); a failing criterion fails its test, so the per-criterion
//! verdict is always readable off the test-runner output.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use gl3k::arith::lcm;
use gl3k::bilinear::{bilinear_form, bilinear_form_naive, scan, Generator, SeqPair};
use gl3k::cyclo::CycloValue;
use gl3k::decomp::{verify_decomposition, EvalMode};
use gl3k::gl3::s_long_family_bruteforce;
use gl3k::kernels::{
    bessel_j_pm, bessel_ktilde, j_double, ktilde_intrep, least_squares_log2_slope,
    main_term_volume, mellin_barnes_pp, DoubleBesselKind, KernelQuery, Sign, SpectralPoint,
    TestFunctionParams,
};
use gl3k::kloosterman::{kloosterman, kloosterman_direct};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Phase-table agreement with the naive double sum (criterion 4).
const BILINEAR_REL_TOL: f64 = 1e-8;
/// Contour route against the pointwise product route (criterion 7).
const KERNEL_IDENTITY_REL_TOL: f64 = 1e-3;
/// Series against integral representation for the modified kernel
/// (criterion 8, grid part).
const BESSEL_GRID_REL_TOL: f64 = 1e-8;
/// One-variable kernels against the classical-function references
/// (criterion 8, spot part).
const BESSEL_ORACLE_REL_TOL: f64 = 1e-9;

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1e-300)
}

fn crel_err(got: Complex64, want: Complex64) -> f64 {
    (got - want).norm() / want.norm().max(1e-300)
}

/// `2^a 3^b ≤ limit`, ascending.
fn smooth_2_3(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p2 = 1u64;
    while p2 <= limit {
        let mut v = p2;
        while v <= limit {
            out.push(v);
            v *= 3;
        }
        p2 *= 2;
    }
    out.sort_unstable();
    out
}

#[test]
fn criterion_1_global_decomposition_identity_is_exact() {
    // Pair set: the full ≤30 square, the 2-3-smooth square up to 216, and
    // same-prime power pairs up to 128 for p ∈ {2, 3, 5, 7}.
    let mut pairs: BTreeSet<(u64, u64)> = BTreeSet::new();
    for d1 in 1..=30 {
        for d2 in 1..=30 {
            pairs.insert((d1, d2));
        }
    }
    let smooth = smooth_2_3(216);
    for &d1 in &smooth {
        for &d2 in &smooth {
            pairs.insert((d1, d2));
        }
    }
    for p in [2u64, 3, 5, 7] {
        let mut powers = vec![1u64];
        while *powers.last().unwrap() * p <= 128 {
            powers.push(powers.last().unwrap() * p);
        }
        for &pa in &powers {
            for &pb in &powers {
                pairs.insert((pa, pb));
            }
        }
    }
    let pairs: Vec<(u64, u64)> = pairs.into_iter().collect();

    let grid = [1i64, 2, 3, 4, 6, 12];
    let mns: Vec<(i64, i64)> = grid
        .iter()
        .flat_map(|&m| grid.iter().map(move |&n| (m, n)))
        .collect();

    let report = verify_decomposition(&pairs, &mns, EvalMode::Exact);
    assert_eq!(
        report.mismatches, 0,
        "decomposition identity failed on {} of {} cells",
        report.mismatches,
        report.records.len()
    );
    assert_eq!(report.records.len(), pairs.len() * mns.len());
    println!(
        "[PASS] criterion 1: decomposed = brute force exactly on {} pairs x {} (m,n) cells \
         ({} tuples, {} ms)",
        pairs.len(),
        mns.len(),
        report.total_tuples,
        report.elapsed_ms
    );
}

#[test]
fn criterion_2_prime_diagonal_is_parameter_free() {
    let primes: Vec<u64> = (2..=97).filter(|&p| (2..p).all(|q| p % q != 0)).collect();
    let grid: Vec<i64> = (1..=6).collect();
    let mut cells = 0usize;
    for &p in &primes {
        let family = s_long_family_bruteforce(p, p, &grid, &grid);
        let expected = CycloValue::from_integer(p as i64 + 1);
        for (mi, &m) in grid.iter().enumerate() {
            for (ni, &n) in grid.iter().enumerate() {
                if (m * n) % p as i64 == 0 {
                    continue;
                }
                let got = CycloValue::from_counts(&family[mi * grid.len() + ni], p)
                    .expect("order within cap");
                assert!(
                    got.sub(&expected).unwrap().is_zero(),
                    "S(1,{m},{n},1;{p},{p}) != {}",
                    p + 1
                );
                cells += 1;
            }
        }
    }
    println!(
        "[PASS] criterion 2: S(1,m,n,1;p,p) = p+1 exactly on {cells} cells across {} primes",
        primes.len()
    );
}

#[test]
fn criterion_3_coprime_moduli_factor_into_classical_sums() {
    let grid = [1i64, 2, 3];
    let mut checked = 0usize;
    for d1 in 1..=30u64 {
        for d2 in 1..=30u64 {
            if gl3k::arith::gcd(d1, d2) != 1 {
                continue;
            }
            let family = s_long_family_bruteforce(d1, d2, &grid, &grid);
            let order = lcm(d1, d2);
            for (mi, &m) in grid.iter().enumerate() {
                for (ni, &n) in grid.iter().enumerate() {
                    let lhs = CycloValue::from_counts(&family[mi * grid.len() + ni], order)
                        .expect("order within cap");
                    let rhs = kloosterman(d2 as i64, n, d1)
                        .mul(&kloosterman(d1 as i64, m, d2))
                        .expect("order within cap");
                    assert!(
                        lhs.sub(&rhs).unwrap().is_zero(),
                        "S(1,{m},{n},1;{d1},{d2}) != S({d2},{n};{d1})*S({d1},{m};{d2})"
                    );
                    checked += 1;
                }
            }
        }
    }
    println!(
        "[PASS] criterion 3: coprime moduli factor into classical sums on {checked} cells"
    );
}

#[test]
fn criterion_4_phase_table_matches_the_naive_double_sum() {
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let seqs = SeqPair::generate(Generator::RandomComplex, 8, seed);
        let fast = bilinear_form(&seqs, 8, 8);
        let naive = bilinear_form_naive(&seqs, 8, 8);
        let rel = rel_err(fast, naive);
        assert!(
            rel <= BILINEAR_REL_TOL,
            "seed {seed}: phase table {fast} vs naive {naive} (rel {rel:.2e})"
        );
        worst = worst.max(rel);
    }
    println!(
        "[PASS] criterion 4: phase-table evaluation matches the naive double sum \
         (10 seeds, worst rel {worst:.2e})"
    );
}

#[test]
fn criterion_5_normalized_form_is_flat_across_scales() {
    let mut ratios = Vec::new();
    for &x in &[8u64, 16, 32] {
        for record in scan(&[x], &[x], Generator::RandomPm1, 0, 5) {
            assert!(record.ratio > 0.0, "X = N = {x}: nonpositive ratio");
            ratios.push(record.ratio);
        }
    }
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        max / min <= 4.0,
        "normalized ratios spread too far: {min:.4} .. {max:.4}"
    );
    println!(
        "[PASS] criterion 5: S/(norms * X^2(X+N)) spans [{min:.4}, {max:.4}], max/min = {:.2} <= 4",
        max / min
    );
}

#[test]
fn criterion_6_volume_grows_like_the_fifth_power() {
    let center = SpectralPoint::from_axis([4.0, 0.0, -4.0]).unwrap();
    let mut samples = Vec::new();
    for &t in &[4.0f64, 8.0, 16.0, 32.0] {
        let params = TestFunctionParams::new(t, center, 0, 0.05).unwrap();
        let volume = main_term_volume(&params).unwrap();
        assert!(volume > 0.0, "T = {t}: nonpositive volume {volume}");
        samples.push((t, volume));
    }
    let slope = least_squares_log2_slope(&samples);
    assert!(
        (4.5..=5.5).contains(&slope),
        "volume slope {slope} outside [4.5, 5.5]"
    );
    println!("[PASS] criterion 6: main-term volume log2-slope {slope:.4} in [4.5, 5.5]");
}

#[test]
fn criterion_7_contour_kernel_matches_the_product_route() {
    // Pointwise identity: the all-plus kernel equals
    // cos(3πν₁/2)·cos(3πν₂/2)/cos(3πν₃/2) / (12π²) times the kind-5 integral.
    let points = [
        (0.5, 0.5, 1.0),
        (1.0, 1.0, 1.0),
        (2.0, 2.0, 3.0),
        (0.5, 2.0, 1.0),
        (2.0, 1.0, 3.0),
    ];
    let mut worst = 0.0f64;
    for &(y1, y2, t) in &points {
        let mu = SpectralPoint::from_axis([t, 0.0, -t]).unwrap();
        let q = KernelQuery::new(y1, y2, mu).unwrap();
        let contour = mellin_barnes_pp(&q).unwrap().value;
        let nu = q.mu.nu();
        let c = |v: Complex64| (v * 1.5 * PI).cos();
        let coeff = c(nu[0]) * c(nu[1]) / c(nu[2]) / (12.0 * PI * PI);
        let product = coeff * j_double(DoubleBesselKind::J5, &q).unwrap().value;
        let rel = crel_err(contour, product);
        assert!(
            rel <= KERNEL_IDENTITY_REL_TOL,
            "y = ({y1},{y2}), t = {t}: contour {contour} vs product {product} (rel {rel:.2e})"
        );
        worst = worst.max(rel);
    }
    println!(
        "[PASS] criterion 7: Mellin-Barnes (+,+) kernel matches the kind-5 product route \
         at {} points (worst rel {worst:.2e})",
        points.len()
    );
}

#[test]
fn criterion_8_bessel_series_match_their_oracles() {
    // Series vs integral representation along a 20-point diagonal sweep of
    // the admissible strip.
    let mut worst = 0.0f64;
    for k in 0..20 {
        let x = 0.1 + 4.9 * k as f64 / 19.0;
        let t = -5.0 + 10.0 * k as f64 / 19.0;
        let alpha = Complex64::new(0.0, t);
        let series = bessel_ktilde(alpha, x).unwrap();
        let integral = ktilde_intrep(alpha, x).unwrap();
        let rel = crel_err(series, integral);
        assert!(
            rel <= BESSEL_GRID_REL_TOL,
            "x = {x:.3}, t = {t:.3}: series {series} vs integral {integral} (rel {rel:.2e})"
        );
        worst = worst.max(rel);
    }

    // Spot values of the order-zero kernels against classical-function
    // references (independent arbitrary-precision evaluations).
    let j_plus = bessel_j_pm(Sign::Plus, Complex64::new(0.0, 0.0), 0.5).unwrap();
    let j_ref = 2.403_939_430_634_413;
    assert!(rel_err(j_plus.re, j_ref) <= BESSEL_ORACLE_REL_TOL && j_plus.im == 0.0);
    let ktilde = bessel_ktilde(Complex64::new(0.0, 0.0), 0.5).unwrap();
    let k_ref = 0.842_048_876_481_416_67;
    assert!(rel_err(ktilde.re, k_ref) <= BESSEL_ORACLE_REL_TOL && ktilde.im == 0.0);
    println!(
        "[PASS] criterion 8: modified kernel series = integral representation on 20 grid \
         points (worst rel {worst:.2e}); order-zero spot values match references to 1e-9"
    );
}

#[test]
fn criterion_9_classical_fast_path_is_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let draws: Vec<(i64, i64)> = (0..100)
        .map(|_| (rng.gen_range(-1000..=1000), rng.gen_range(-1000..=1000)))
        .collect();
    for c in 1..=500u64 {
        for &(m, n) in &draws {
            let fast = kloosterman(m, n, c);
            let direct = kloosterman_direct(m, n, c);
            assert!(
                fast.sub(&direct).unwrap().is_zero(),
                "S({m},{n};{c}): fast path disagrees with the direct sum"
            );
        }
    }
    println!(
        "[PASS] criterion 9: multiplicative fast path = direct sum exactly for all c <= 500, \
         100 (m,n) draws"
    );
}

//! Contract tests for the bilinear-form experiment layer.

use gl3k::bilinear::{
    bilinear_form, bilinear_form_cached, bilinear_form_naive, envelope, gallagher_check,
    grid_extents, hybrid_envelope, hybrid_form, phase_table, scan, uniform_t_nodes, write_csv,
    Generator, PhaseTableCache, SeqPair,
};
use gl3k::gl3::s_long_bruteforce;
use num_complex::Complex64;
use proptest::prelude::*;

/// Relative tolerance for comparing the phase-table route against direct
/// evaluation; both paths are plain f64 sums of unit-modulus terms.
const REL_TOL: f64 = 1e-8;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn phase_table_reconstructs_every_family_value() {
    for d1 in 1..=10u64 {
        for d2 in 1..=10u64 {
            let table = phase_table(d1, d2);
            for m in 1..=6i64 {
                for n in 1..=6i64 {
                    let expected = s_long_bruteforce(1, m, n, 1, d1, d2).to_complex();
                    let got = table.reconstruct(m, n);
                    assert!(
                        (got - expected).norm() <= REL_TOL * expected.norm().max(1.0),
                        "table reconstruction ({d1},{d2}) at (m,n)=({m},{n}): \
                         {got} vs {expected}"
                    );
                }
            }
        }
    }
}

#[test]
fn table_path_matches_naive_double_loop() {
    for seed in 0..10u64 {
        let seqs = SeqPair::generate(Generator::RandomComplex, 8, seed);
        let fast = bilinear_form(&seqs, 8, 8);
        let naive = bilinear_form_naive(&seqs, 8, 8);
        assert!(
            rel_close(fast, naive, REL_TOL),
            "seed {seed}: table path {fast} vs naive {naive}"
        );
    }
}

#[test]
fn single_coefficient_sum_is_the_absolute_value_row() {
    // With N = 1 and unit coefficients, 𝒮 is the plain sum of |S(1,1,1,1;·,·)|.
    let seqs = SeqPair::generate(Generator::Unit, 1, 0);
    let mut expected = 0.0;
    for d1 in 1..=3u64 {
        for d2 in 1..=3u64 {
            expected += s_long_bruteforce(1, 1, 1, 1, d1, d2).to_complex().norm();
        }
    }
    assert!(rel_close(bilinear_form(&seqs, 3, 3), expected, 1e-10));
}

#[test]
fn cached_and_fresh_evaluations_agree_bitwise() {
    let seqs = SeqPair::generate(Generator::RandomPm1, 12, 7);
    let cache = PhaseTableCache::build(6, 9);
    let a = bilinear_form_cached(&seqs, 6, 9, &cache);
    let b = bilinear_form(&seqs, 6, 9);
    let c = bilinear_form_cached(&seqs, 6, 9, &cache);
    // Sorted-order reduction makes the parallel sum reproducible.
    assert_eq!(a.to_bits(), c.to_bits(), "repeat evaluation must be bitwise stable");
    assert_eq!(a.to_bits(), b.to_bits(), "fresh cache must not change the value");
}

#[test]
fn envelope_closed_forms_and_monotonicity() {
    assert!((envelope(10, 10, 5, 1.0, 1.0) - 4500.0).abs() < 1e-9);
    assert!((envelope(1, 1, 1, 1.0, 1.0) - (3.0 + 2.0f64.powf(1.5))).abs() < 1e-12);
    // With X₁ = X₂ = X = N the form grows monotonically in X.
    let mut last = 0.0;
    for x in 1..=32u64 {
        let e = envelope(x, x, x, 1.0, 1.0);
        assert!(e > last, "envelope must increase with X");
        last = e;
    }
}

#[test]
fn untwisted_single_node_grid_collapses_to_the_plain_form() {
    let seqs = SeqPair::generate(Generator::RandomComplex, 6, 3);
    let zero = Complex64::new(0.0, 0.0);
    let grid = [(zero, zero, 1.0)];
    let hybrid = hybrid_form(&seqs, 5, 5, &grid);
    let plain = bilinear_form(&seqs, 5, 5);
    assert!(rel_close(hybrid, plain, 1e-12), "{hybrid} vs {plain}");
}

#[test]
fn twist_grid_evaluates_termwise() {
    let seqs = SeqPair::generate(Generator::RandomPm1, 7, 11);
    let node = |t: f64| Complex64::new(0.0, t);
    let grid = [
        (node(0.7), node(-0.3), 0.4),
        (node(-0.7), node(0.3), 0.4),
        (node(0.0), node(1.1), 0.2),
    ];
    let hybrid = hybrid_form(&seqs, 6, 6, &grid);
    assert!(hybrid.is_finite() && hybrid >= 0.0);
    let termwise: f64 = grid
        .iter()
        .map(|&(s1, s2, w)| w * bilinear_form(&seqs.twisted(s1, s2), 6, 6))
        .sum();
    assert!(rel_close(hybrid, termwise, 1e-10), "{hybrid} vs {termwise}");
}

#[test]
fn twisting_preserves_norms_and_grid_extents_summarize() {
    let seqs = SeqPair::generate(Generator::RandomComplex, 9, 5);
    let (na, nb) = seqs.norms();
    let twisted = seqs.twisted(Complex64::new(0.0, 2.5), Complex64::new(0.0, -1.5));
    let (ta, tb) = twisted.norms();
    assert!((na - ta).abs() < 1e-12 && (nb - tb).abs() < 1e-12);

    let node = |t: f64| Complex64::new(0.0, t);
    let grid = [
        (node(1.0), node(2.0), 0.25),
        (node(1.0), node(-2.0), 0.5),
        (node(-3.0), node(2.0), 0.125),
    ];
    let (t1, t2, s1w, s2w) = grid_extents(&grid);
    assert_eq!(t1, 3.0);
    assert_eq!(t2, 2.0);
    // Mass 0.75 shares s₁ = i; the largest mass at one s₂ is 0.5 at −2i.
    assert!((s1w - 0.75).abs() < 1e-15);
    assert!((s2w - 0.5).abs() < 1e-15);
    // The envelope accepts the summaries and stays positive and finite.
    let env = hybrid_envelope(4, 4, 9, t1, t2, s1w, s2w, na, nb);
    assert!(env.is_finite() && env > 0.0);
}

#[test]
fn mean_value_single_term_is_exact() {
    // One coefficient: the inner sum has modulus 1, so the left side is
    // exactly (Σ weights)·Σ_{F≤X} Ff = 2T·Σ_{F≤X} Ff.
    let b = [Complex64::new(1.0, 0.0)];
    let (f, x, t) = (2u64, 5u64, 3.0);
    let nodes = uniform_t_nodes(t, 33);
    let report = gallagher_check(f, x, t, &b, &nodes);
    let expected = 2.0 * t * (1..=x).map(|ff| (ff * f) as f64).sum::<f64>();
    assert!(
        rel_close(report.lhs, expected, 1e-12),
        "lhs {} vs {}",
        report.lhs,
        expected
    );
    assert!(report.ratio > 0.0 && report.ratio.is_finite());
}

#[test]
fn mean_value_ratio_is_finite_and_stable_under_doubling() {
    for seed in [1u64, 2, 3] {
        let pair16 = SeqPair::generate(Generator::RandomComplex, 16, seed);
        let pair32 = SeqPair::generate(Generator::RandomComplex, 32, seed);
        let nodes = uniform_t_nodes(4.0, 65);
        let r16 = gallagher_check(1, 8, 4.0, &pair16.b, &nodes);
        let r32 = gallagher_check(1, 8, 4.0, &pair32.b, &nodes);
        assert!(r16.ratio.is_finite() && r16.ratio > 0.0);
        assert!(
            r32.ratio <= 4.0 * r16.ratio,
            "seed {seed}: doubling N inflated the ratio {} -> {}",
            r16.ratio,
            r32.ratio
        );
    }
}

#[test]
fn scan_is_deterministic_and_serializes_with_fixed_columns() {
    let run1 = scan(&[4, 6], &[5], Generator::RandomPm1, 42, 2);
    let run2 = scan(&[4, 6], &[5], Generator::RandomPm1, 42, 2);
    assert_eq!(run1.len(), 4);
    let js1 = serde_json::to_string(&run1).unwrap();
    let js2 = serde_json::to_string(&run2).unwrap();
    assert_eq!(js1, js2, "identical seeds must give identical records");
    // Untwisted records omit the grid summaries entirely.
    assert!(!js1.contains("t1"));

    let mut csv_bytes = Vec::new();
    write_csv(&run1, &mut csv_bytes).unwrap();
    let text = String::from_utf8(csv_bytes).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x1,x2,n,s_value,envelope,ratio,seed"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn scan_unit_sequences_at_unit_range_have_closed_ratio() {
    // X = 1: only (D₁,D₂) = (1,1) contributes, 𝒮 = N², norms are √N each,
    // and the collapsed envelope is 1·(1+N), so ratio = N/(N+1).
    for n in [2u64, 5, 9] {
        let records = scan(&[1], &[n], Generator::Unit, 123, 1);
        assert_eq!(records.len(), 1);
        let r = &records[0];
        assert!((r.s_value - (n * n) as f64).abs() < 1e-9);
        let expected = n as f64 / (n as f64 + 1.0);
        assert!(
            (r.ratio - expected).abs() < 1e-12,
            "N={n}: ratio {} vs {expected}",
            r.ratio
        );
    }
}

#[test]
fn ratio_stability_smoke_at_one_size() {
    let records = scan(&[8], &[8], Generator::RandomPm1, 1, 5);
    let ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    assert!(min > 0.0, "𝒮 should not vanish for random ±1 input");
    assert!(
        max / min <= 4.0,
        "ratio spread too wide at X=N=8: {ratios:?}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// 𝒮 is nonnegative and exactly degree-one under positive scaling of
    /// one sequence.
    #[test]
    fn form_scales_linearly_in_the_first_sequence(
        seed in 0u64..1_000,
        lambda in 0.1f64..10.0,
        x in 1u64..6,
        n in 1usize..7,
    ) {
        let seqs = SeqPair::generate(Generator::RandomComplex, n, seed);
        let base = bilinear_form(&seqs, x, x);
        prop_assert!(base >= 0.0);
        let scaled = SeqPair::from_parts(
            seqs.a.iter().map(|&z| z * lambda).collect(),
            seqs.b.clone(),
            seqs.generator,
            seqs.seed,
        );
        let value = bilinear_form(&scaled, x, x);
        prop_assert!(
            rel_close(value, lambda * base, 1e-9),
            "scaling broke homogeneity: {} vs {}",
            value,
            lambda * base
        );
    }

    /// The phase-table route agrees with the naive path on random small inputs.
    #[test]
    fn table_and_naive_paths_agree(
        seed in 0u64..1_000,
        x1 in 1u64..6,
        x2 in 1u64..6,
        n in 1usize..7,
    ) {
        let seqs = SeqPair::generate(Generator::RandomComplex, n, seed);
        let fast = bilinear_form(&seqs, x1, x2);
        let naive = bilinear_form_naive(&seqs, x1, x2);
        prop_assert!(rel_close(fast, naive, REL_TOL), "{} vs {}", fast, naive);
    }
}

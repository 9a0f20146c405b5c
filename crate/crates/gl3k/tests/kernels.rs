//! Contract tests for the Archimedean kernel layer: spectral-parameter
//! algebra, the localized test function and its main-term volume, the
//! one-variable Bessel-type kernels, the five double-Bessel integrals, and
//! the contour-integral route with its trigonometric factors.
//!
//! Reference values marked "external" were computed with an independent
//! arbitrary-precision implementation (25 significant digits, tanh-sinh /
//! Gauss-Legendre panels plus explicit period-summed oscillatory tails with
//! Euler acceleration) and are frozen here with tolerances far above both
//! engines' error estimates.  Values marked "regression" were produced by
//! this crate and pin routing/prefactor choices that are cross-checked
//! through the assembled-kernel identities at neighboring points.

use gl3k::kernels::{
    assembled_kernel, bessel_j_pm, bessel_ktilde, gamma_ratio_g, j_double, ktilde_intrep,
    least_squares_log2_slope, localization_polynomial, main_term_volume, mellin_barnes_pp,
    s_factor_mp, s_factor_pm, s_factor_pp, spec_measure, test_function_h, DoubleBesselKind,
    KernelError, KernelQuery, Sign, SpectralPoint, TestFunctionParams, WeylElement,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Exact-identity tolerance: algebraic rearrangements of the same quantity.
const EXACT_TOL: f64 = 1e-12;
/// Tolerance against external one-variable kernel references (engines agree
/// to ~1e-15 relative; the window accuracy target is 1e-10).
const BESSEL_REF_TOL: f64 = 1e-9;
/// Tolerance against external double-integral references (engines agree to
/// 1e-9..1e-15 relative depending on the point).
const DOUBLE_REF_TOL: f64 = 1e-6;
/// Tolerance for the contour route against both its frozen references and
/// the product route; the oscillatory-kernel accuracy target is 1e-3.
const CONTOUR_REF_TOL: f64 = 1e-6;

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

fn crel_close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-300)
}

fn axis(t1: f64, t2: f64, t3: f64) -> SpectralPoint {
    SpectralPoint::from_axis([t1, t2, t3]).expect("axis point")
}

// ---------------------------------------------------------------------------
// Symmetry-group and spectral-parameter algebra
// ---------------------------------------------------------------------------

#[test]
fn weyl_elements_act_as_distinct_permutations() {
    let probe = [
        Complex64::new(1.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(-3.0, 0.0),
    ];
    let mut images: Vec<[Complex64; 3]> = WeylElement::ALL.iter().map(|w| w.apply(probe)).collect();
    images.sort_by(|a, b| {
        a.iter()
            .map(|z| (z.re, z.im))
            .collect::<Vec<_>>()
            .partial_cmp(&b.iter().map(|z| (z.re, z.im)).collect::<Vec<_>>())
            .unwrap()
    });
    images.dedup();
    assert_eq!(images.len(), 6, "the six elements must act differently");

    // The two 3-cycles act as advertised.
    let w4 = WeylElement::W4.apply(probe);
    assert_eq!(w4, [probe[2], probe[0], probe[1]]);
    let w5 = WeylElement::W5.apply(probe);
    assert_eq!(w5, [probe[1], probe[2], probe[0]]);
}

#[test]
fn weyl_composition_matches_sequential_action() {
    let probe = [
        Complex64::new(0.3, 1.0),
        Complex64::new(-0.8, 2.0),
        Complex64::new(0.5, -3.0),
    ];
    for a in WeylElement::ALL {
        for b in WeylElement::ALL {
            let composed = a.compose(b).apply(probe);
            let sequential = a.apply(b.apply(probe));
            assert_eq!(composed, sequential, "{a:?} after {b:?}");
        }
    }
    // The 3-cycle squares to the other 3-cycle and cubes to the identity.
    assert_eq!(WeylElement::W4.compose(WeylElement::W4), WeylElement::W5);
    assert_eq!(
        WeylElement::W4.compose(WeylElement::W4).compose(WeylElement::W4),
        WeylElement::Identity
    );
    assert_eq!(WeylElement::W2.compose(WeylElement::W2), WeylElement::Identity);
}

#[test]
fn spectral_point_requires_zero_sum() {
    let bad = SpectralPoint::new([
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(1.0, 0.0),
    ]);
    assert!(matches!(bad, Err(KernelError::InvalidInput(_))));
    // A tiny violation below the scaled tolerance is accepted and usable.
    let ok = SpectralPoint::new([
        Complex64::new(0.5, 1.0),
        Complex64::new(-0.25, -0.5),
        Complex64::new(-0.25, -0.5 + 1e-15),
    ]);
    assert!(ok.is_ok());
}

#[test]
fn differences_of_coordinates_sum_to_zero() {
    let p = SpectralPoint::new([
        Complex64::new(0.4, 1.7),
        Complex64::new(-0.9, 0.2),
        Complex64::new(0.5, -1.9),
    ])
    .unwrap();
    let nu = p.nu();
    let mu = p.mu();
    assert!((nu[0] + nu[1] + nu[2]).norm() <= EXACT_TOL);
    assert!((nu[0] - (mu[0] - mu[1]) / 3.0).norm() <= EXACT_TOL);
    assert!((nu[1] - (mu[1] - mu[2]) / 3.0).norm() <= EXACT_TOL);
    assert!((nu[2] - (mu[2] - mu[0]) / 3.0).norm() <= EXACT_TOL);
}

#[test]
fn negation_maps_are_involutions() {
    let p = SpectralPoint::new([
        Complex64::new(0.4, 1.7),
        Complex64::new(-0.9, 0.2),
        Complex64::new(0.5, -1.9),
    ])
    .unwrap();
    let n = p.negated();
    for j in 0..3 {
        assert_eq!(n.mu()[j], -p.mu()[j]);
    }
    let r = p.reversed_negated();
    assert_eq!(r.mu()[0], -p.mu()[2]);
    assert_eq!(r.mu()[1], -p.mu()[1]);
    assert_eq!(r.mu()[2], -p.mu()[0]);
    assert_eq!(r.reversed_negated().mu(), p.mu());
    assert_eq!(n.negated().mu(), p.mu());
}

#[test]
fn query_validation_rejects_out_of_window_arguments() {
    let mu = axis(1.0, 0.0, -1.0);
    assert!(KernelQuery::new(0.01, 1.0, mu).is_err(), "|y| below window");
    assert!(KernelQuery::new(1.0, 60.0, mu).is_err(), "|y| above window");
    assert!(KernelQuery::new(-2.0, 0.5, mu).is_ok(), "signs are allowed");
    let tall = axis(11.0, 0.0, -11.0);
    assert!(
        matches!(KernelQuery::new(1.0, 1.0, tall), Err(KernelError::InvalidInput(_))),
        "spectral imaginary part above window"
    );
}

#[test]
fn test_function_params_validation() {
    let mu0 = axis(4.0, 0.0, -4.0);
    assert!(TestFunctionParams::new(0.5, mu0, 0, 0.05).is_err(), "T below 1");
    assert!(TestFunctionParams::new(4.0, mu0, 13, 0.05).is_err(), "degree above cap");
    assert!(TestFunctionParams::new(4.0, mu0, 0, 0.0).is_err(), "eps at 0");
    assert!(TestFunctionParams::new(4.0, mu0, 0, 1.0).is_err(), "eps at 1");
    let off_axis = SpectralPoint::new([
        Complex64::new(0.3, 0.0),
        Complex64::new(-0.3, 0.0),
        Complex64::new(0.0, 0.0),
    ])
    .unwrap();
    assert!(TestFunctionParams::new(4.0, off_axis, 0, 0.05).is_err(), "center off axis");
    let origin = axis(0.0, 0.0, 0.0);
    assert!(TestFunctionParams::new(4.0, origin, 0, 0.05).is_err(), "center on a chamber wall");
    let p = TestFunctionParams::with_defaults(4.0, mu0).unwrap();
    assert_eq!(p.a, TestFunctionParams::DEFAULT_A);
    assert_eq!(p.eps, TestFunctionParams::DEFAULT_EPS);
}

// ---------------------------------------------------------------------------
// Spectral measure and localized test function
// ---------------------------------------------------------------------------

#[test]
fn spectral_measure_matches_hand_value() {
    // At t = (2, 0, -2) the three scaled differences are i·(2, 2, -4)
    // and the density reduces to 16·tanh²(π)·tanh(2π).
    let value = spec_measure(&axis(2.0, 0.0, -2.0)).unwrap();
    let hand = 16.0 * PI.tanh() * PI.tanh() * (2.0 * PI).tanh();
    assert!(rel_close(value, hand, EXACT_TOL), "{value} vs {hand}");

    let off_axis = SpectralPoint::new([
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.3, 0.1),
        Complex64::new(0.0, -0.2),
    ])
    .unwrap();
    assert!(spec_measure(&off_axis).is_err());
}

#[test]
fn measure_and_test_function_are_symmetry_invariant() {
    let mu0 = axis(4.0, 0.0, -4.0);
    let params = TestFunctionParams::with_defaults(4.0, mu0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let r1 = rng.gen_range(-6.0..6.0);
        let r2 = rng.gen_range(-6.0..6.0);
        let p = axis(r1, r2, -r1 - r2);
        let m = spec_measure(&p).unwrap();
        let h = test_function_h(&p, &params).unwrap();
        assert!(h >= 0.0, "test function must be non-negative, got {h}");
        for w in WeylElement::ALL {
            let pw = p.weyl(w);
            let mw = spec_measure(&pw).unwrap();
            assert!(rel_close(m, mw, EXACT_TOL), "measure under {w:?}: {m} vs {mw}");
            let hw = test_function_h(&pw, &params).unwrap();
            assert!(rel_close(h, hw, EXACT_TOL), "test function under {w:?}: {h} vs {hw}");
        }
    }
}

#[test]
fn test_function_peaks_near_the_scaled_center_and_rejects_off_axis() {
    let mu0 = axis(4.0, 0.0, -4.0);
    let params = TestFunctionParams::with_defaults(4.0, mu0).unwrap();
    let at_center = test_function_h(&axis(16.0, 0.0, -16.0), &params).unwrap();
    let far = test_function_h(&axis(1.0, 0.5, -1.5), &params).unwrap();
    assert!(
        at_center > far,
        "the bump must dominate away from the scaled center: {at_center} vs {far}"
    );
    assert!(at_center > 0.0);

    let off_axis = SpectralPoint::new([
        Complex64::new(0.3, 0.1),
        Complex64::new(-0.3, 0.1),
        Complex64::new(0.0, -0.2),
    ])
    .unwrap();
    assert!(test_function_h(&off_axis, &params).is_err());
}

#[test]
fn localization_polynomial_vanishes_linearly_at_the_first_wall() {
    let params = TestFunctionParams::with_defaults(4.0, axis(4.0, 0.0, -4.0)).unwrap();
    // Off-axis point with first scaled difference exactly 1/3 (lowest wall).
    let on_wall = SpectralPoint::new([
        Complex64::new(0.5, 0.3),
        Complex64::new(-0.5, 0.3),
        Complex64::new(0.0, -0.6),
    ])
    .unwrap();
    assert_eq!(localization_polynomial(&on_wall, &params).norm(), 0.0);

    // Moving off the wall by delta scales the polynomial linearly in delta.
    let displaced = |delta: f64| {
        SpectralPoint::new([
            Complex64::new(0.5 + delta / 2.0, 0.3),
            Complex64::new(-0.5 - delta / 2.0, 0.3),
            Complex64::new(0.0, -0.6),
        ])
        .unwrap()
    };
    let p1 = localization_polynomial(&displaced(1e-3), &params).norm();
    let p2 = localization_polynomial(&displaced(1e-4), &params).norm();
    let ratio = p1 / p2;
    assert!(
        (ratio - 10.0).abs() <= 0.2,
        "linear vanishing: tenfold displacement changed the value by {ratio}"
    );
}

// ---------------------------------------------------------------------------
// Main-term volume
// ---------------------------------------------------------------------------

#[test]
fn volume_vanishes_when_the_window_misses_the_grid() {
    // A center far outside the integration box leaves no mass on the grid.
    let far = TestFunctionParams::new(4.0, axis(30.0, 0.0, -30.0), 0, 0.05).unwrap();
    assert_eq!(main_term_volume(&far).unwrap(), 0.0);
}

#[test]
fn volume_grows_with_the_predicted_power_of_the_scale() {
    // External references for the degree-0, eps = 0.05 window centered at
    // (4, 0, -4); the doubling sweep has log2-slope 4.8436.
    let mu0 = axis(4.0, 0.0, -4.0);
    let reference = [
        (4.0, 1.1211e6),
        (8.0, 3.1903e7),
        (16.0, 9.1781e8),
        (32.0, 2.6516e10),
    ];
    let mut samples = Vec::new();
    for &(t, expected) in &reference {
        let params = TestFunctionParams::new(t, mu0, 0, 0.05).unwrap();
        let v = main_term_volume(&params).unwrap();
        assert!(
            rel_close(v, expected, 1e-3),
            "volume at scale {t}: {v} vs reference {expected}"
        );
        samples.push((t, v));
    }
    let slope = least_squares_log2_slope(&samples);
    assert!(
        (4.5..=5.5).contains(&slope),
        "doubling sweep slope {slope} outside the admissible window"
    );
}

#[test]
fn log2_slope_recovers_an_exact_power_law() {
    let samples: Vec<(f64, f64)> = [1.0f64, 2.0, 4.0, 8.0, 16.0]
        .iter()
        .map(|&t| (t, 3.5 * t.powf(4.75)))
        .collect();
    let slope = least_squares_log2_slope(&samples);
    assert!((slope - 4.75).abs() <= 1e-12, "got {slope}");
}

// ---------------------------------------------------------------------------
// One-variable kernels
// ---------------------------------------------------------------------------

/// External references: rows of (t, x, J⁺, J⁻, K̃) for order α = i·t.
const ONE_VARIABLE_REFERENCE: [(f64, f64, f64, f64, f64); 4] = [
    (0.0, 0.5, 2.403939430634413, -0.277267430408108, 0.84204887648141667),
    (1.0, 0.5, 2.05462845728781, 0.596668098949815, 1.45245320325173),
    (2.0, 1.0, 1.44436783273471, -0.400878299401306, 1.11278093465423),
    (5.0, 2.0, 0.921068556947451, -0.367897412007737, 1.2613634861816),
];

#[test]
fn one_variable_kernels_match_reference_values() {
    for &(t, x, jp, jm, kt) in &ONE_VARIABLE_REFERENCE {
        let alpha = Complex64::new(0.0, t);
        let got_p = bessel_j_pm(Sign::Plus, alpha, x).unwrap();
        let got_m = bessel_j_pm(Sign::Minus, alpha, x).unwrap();
        let got_k = bessel_ktilde(alpha, x).unwrap();
        for (label, got, want) in [("J+", got_p, jp), ("J-", got_m, jm), ("K~", got_k, kt)] {
            assert!(
                crel_close(got, Complex64::new(want, 0.0), BESSEL_REF_TOL),
                "{label} at order i*{t}, argument {x}: {got} vs {want}"
            );
        }
    }
}

#[test]
fn kernels_are_real_for_unitary_orders() {
    for &(t, x) in &[(0.7, 0.3), (1.9, 1.7), (4.2, 3.0)] {
        let alpha = Complex64::new(0.0, t);
        for sign in [Sign::Plus, Sign::Minus] {
            let v = bessel_j_pm(sign, alpha, x).unwrap();
            assert!(v.im.abs() <= EXACT_TOL * v.re.abs().max(1.0), "{sign:?} {v}");
        }
        let k = bessel_ktilde(alpha, x).unwrap();
        assert!(k.im.abs() <= EXACT_TOL * k.re.abs().max(1.0), "{k}");
    }
}

#[test]
fn zero_order_limit_is_removable() {
    // The odd combination has a removable singularity at order 0; approaching
    // along the imaginary axis must agree with the dedicated branch.
    let eps = Complex64::new(0.0, 1e-9);
    let zero = Complex64::new(0.0, 0.0);
    for x in [0.3, 0.5, 2.0] {
        let near = bessel_j_pm(Sign::Minus, eps, x).unwrap();
        let at = bessel_j_pm(Sign::Minus, zero, x).unwrap();
        assert!(crel_close(near, at, 1e-7), "x = {x}: {near} vs {at}");
        let near_p = bessel_j_pm(Sign::Plus, eps, x).unwrap();
        let at_p = bessel_j_pm(Sign::Plus, zero, x).unwrap();
        assert!(crel_close(near_p, at_p, 1e-7), "x = {x}: {near_p} vs {at_p}");
    }
}

#[test]
fn kernel_window_errors_carry_the_right_kind() {
    let zero = Complex64::new(0.0, 0.0);
    assert!(matches!(
        bessel_ktilde(zero, 60.0),
        Err(KernelError::Overflow(_))
    ));
    assert!(matches!(
        bessel_ktilde(zero, 1e-4),
        Err(KernelError::NotConverged(_))
    ));
    assert!(matches!(
        bessel_j_pm(Sign::Plus, Complex64::new(0.0, 11.0), 5.0),
        Err(KernelError::Overflow(_))
    ));
    assert!(matches!(
        bessel_j_pm(Sign::Plus, Complex64::new(0.6, 0.0), 1.0),
        Err(KernelError::InvalidInput(_))
    ));
}

#[test]
fn modified_kernel_matches_its_contour_representation() {
    // 20-point diagonal sweep across the argument and order windows.
    for i in 0..20 {
        let x = 0.1 + 4.9 * (i as f64) / 19.0;
        let t = -5.0 + 10.0 * (i as f64) / 19.0;
        let alpha = Complex64::new(0.0, t);
        let series = bessel_ktilde(alpha, x).unwrap();
        let contour = ktilde_intrep(alpha, x).unwrap();
        assert!(
            crel_close(series, contour, 1e-8),
            "x = {x}, order i*{t}: {series} vs {contour}"
        );
    }
}

// ---------------------------------------------------------------------------
// Double-Bessel integrals
// ---------------------------------------------------------------------------

/// External references at order zero: rows of (y1, y2, kind, value).
const ZERO_ORDER_REFERENCE: [(f64, f64, DoubleBesselKind, f64); 10] = [
    (1.0, 1.0, DoubleBesselKind::J5, 6.125187297935674e-17),
    (1.0, 1.0, DoubleBesselKind::J3, -2.3411293441783912e-10),
    (1.0, 1.0, DoubleBesselKind::J2, 0.092615817963973095),
    (1.0, 1.0, DoubleBesselKind::J1(Sign::Plus), -0.084467363496493526),
    (1.0, 1.0, DoubleBesselKind::J1(Sign::Minus), 0.084468059314656399),
    (0.5, 2.0, DoubleBesselKind::J5, 1.4428457326181999e-17),
    (0.5, 2.0, DoubleBesselKind::J3, 3.6224882419827717e-9),
    (0.5, 2.0, DoubleBesselKind::J2, -0.13458253833066612),
    (0.5, 2.0, DoubleBesselKind::J1(Sign::Plus), 0.0035022649266636018),
    (0.5, 2.0, DoubleBesselKind::J1(Sign::Minus), -0.0035022656318845442),
];

/// Regression values at order zero for the kind-4 integral (the external
/// engine's quadrature failed there; the kind is externally pinned at the
/// generic order below).
const ZERO_ORDER_REGRESSION: [(f64, f64, f64); 2] = [
    (1.0, 1.0, 1.266483871487009e-2),
    (0.5, 2.0, 1.169310152828338e-2),
];

#[test]
fn double_integrals_match_references_at_zero_order() {
    let zero = axis(0.0, 0.0, 0.0);
    for &(y1, y2, kind, want) in &ZERO_ORDER_REFERENCE {
        let q = KernelQuery::new(y1, y2, zero).unwrap();
        let got = j_double(kind, &q).unwrap();
        assert!(
            crel_close(got.value, Complex64::new(want, 0.0), DOUBLE_REF_TOL),
            "{kind:?} at ({y1},{y2}): {} vs {want}",
            got.value
        );
        assert!(got.converged, "{kind:?} at ({y1},{y2}) flagged as not converged");
    }
    for &(y1, y2, want) in &ZERO_ORDER_REGRESSION {
        let q = KernelQuery::new(y1, y2, zero).unwrap();
        let got = j_double(DoubleBesselKind::J4, &q).unwrap();
        assert!(
            crel_close(got.value, Complex64::new(want, 0.0), DOUBLE_REF_TOL),
            "J4 at ({y1},{y2}): {} vs {want}",
            got.value
        );
    }
}

#[test]
fn double_integrals_match_references_at_generic_order() {
    // External pins at spectral parameter i·(1, 0, -1), arguments (0.5, 2).
    let mu = axis(1.0, 0.0, -1.0);
    let q = KernelQuery::new(0.5, 2.0, mu).unwrap();
    let external: [(DoubleBesselKind, f64, f64); 3] = [
        (DoubleBesselKind::J3, 4.61764823479e-8, 1e-8),
        (DoubleBesselKind::J4, 0.0258460617494, 1e-8),
        (DoubleBesselKind::J2, -0.146288144099, 1e-8),
    ];
    for (kind, want, tol) in external {
        let got = j_double(kind, &q).unwrap();
        assert!(
            crel_close(got.value, Complex64::new(want, 0.0), tol),
            "{kind:?}: {} vs {want}",
            got.value
        );
    }
    // Regression pins for the remaining kinds at the same point.
    let regression: [(DoubleBesselKind, f64); 3] = [
        (DoubleBesselKind::J5, 1.5542380198777003e-15),
        (DoubleBesselKind::J1(Sign::Minus), 0.01565428434886369),
        (DoubleBesselKind::J1(Sign::Plus), -0.01565430616754804),
    ];
    for (kind, want) in regression {
        let got = j_double(kind, &q).unwrap();
        assert!(
            crel_close(got.value, Complex64::new(want, 0.0), DOUBLE_REF_TOL),
            "{kind:?}: {} vs {want}",
            got.value
        );
    }
}

#[test]
fn exponentially_convergent_integrals_are_positive() {
    // Kinds 4 and 5 integrate products of positive decaying kernels when the
    // middle coordinate vanishes, so their values are strictly positive.
    for t in [1.0, 2.0] {
        let mu = axis(t, 0.0, -t);
        for (y1, y2) in [(1.0, 1.0), (0.5, 2.0)] {
            let q = KernelQuery::new(y1, y2, mu).unwrap();
            for kind in [DoubleBesselKind::J4, DoubleBesselKind::J5] {
                let v = j_double(kind, &q).unwrap().value;
                assert!(v.re > 0.0, "{kind:?} at ({y1},{y2}), t = {t}: {v}");
                assert!(v.im.abs() <= EXACT_TOL * v.re.max(1e-300), "{kind:?}: {v}");
            }
        }
    }
}

#[test]
fn kind_five_is_invariant_under_argument_swap_with_reversed_negation() {
    let mu = axis(1.3, -0.4, -0.9);
    let q1 = KernelQuery::new(0.7, 3.0, mu).unwrap();
    let q2 = KernelQuery::new(3.0, 0.7, mu.reversed_negated()).unwrap();
    let a = j_double(DoubleBesselKind::J5, &q1).unwrap().value;
    let b = j_double(DoubleBesselKind::J5, &q2).unwrap().value;
    assert!(crel_close(a, b, EXACT_TOL), "{a} vs {b}");
}

// ---------------------------------------------------------------------------
// Contour route and trigonometric factors
// ---------------------------------------------------------------------------

#[test]
fn gamma_ratio_and_sign_factor_match_hand_values() {
    let zero = axis(0.0, 0.0, 0.0);
    let half = Complex64::new(0.5, 0.0);
    // At the origin the gamma ratio collapses to Γ(1/2)⁶/Γ(1) = π³.
    let g = gamma_ratio_g(half, half, &zero);
    assert!(
        crel_close(g, Complex64::new(PI.powi(3), 0.0), EXACT_TOL),
        "gamma ratio {g}"
    );
    // The all-plus trigonometric factor at the origin is 1/(24π²).
    let s = s_factor_pp(&zero);
    let want = 1.0 / (24.0 * PI * PI);
    assert!(crel_close(s, Complex64::new(want, 0.0), EXACT_TOL), "{s} vs {want}");
}

#[test]
fn sign_factor_swap_identity_pins_the_cycle_labels() {
    // Identity: the minus-plus factor at (s1, s2; mu) equals the plus-minus
    // factor at (s2, s1) with the negated parameter advanced by the 3-cycle
    // that sends (1,2,3) to (3,1,2).  The rival labeling (using the other
    // 3-cycle) fails by orders of magnitude, which pins the convention.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst_rival: f64 = f64::INFINITY;
    for _ in 0..20 {
        let s1 = Complex64::new(rng.gen_range(0.3..1.2), rng.gen_range(-1.5..1.5));
        let s2 = Complex64::new(rng.gen_range(0.3..1.2), rng.gen_range(-1.5..1.5));
        let a = rng.gen_range(-1.0..1.0);
        let b = rng.gen_range(-1.0..1.0);
        let u = rng.gen_range(-1.5..1.5);
        let v = rng.gen_range(-1.5..1.5);
        let mu = SpectralPoint::new([
            Complex64::new(a, u),
            Complex64::new(b, v),
            Complex64::new(-a - b, -u - v),
        ])
        .unwrap();
        let lhs = s_factor_mp(s1, s2, &mu);
        let rhs = s_factor_pm(s2, s1, &mu.negated().weyl(WeylElement::W4));
        assert!(
            crel_close(lhs, rhs, 1e-10),
            "swap identity: {lhs} vs {rhs}"
        );
        let rival = s_factor_pm(s2, s1, &mu.negated().weyl(WeylElement::W5));
        worst_rival = worst_rival.min((lhs - rival).norm() / lhs.norm().max(1e-300));
    }
    assert!(
        worst_rival > 0.1,
        "the rival cycle assignment should visibly break the identity, \
         best rival deviation {worst_rival}"
    );
}

/// External references for the contour route: rows of (y1, y2, t, value) at
/// spectral parameter i·(t, 0, -t).
const CONTOUR_REFERENCE: [(f64, f64, f64, f64); 5] = [
    (0.5, 0.5, 1.0, 1.537050764e-12),
    (1.0, 1.0, 1.0, 3.034179179e-17),
    (2.0, 2.0, 3.0, 5.882445181e-19),
    (0.5, 2.0, 1.0, 7.127595139e-18),
    (2.0, 1.0, 3.0, 1.129784345e-15),
];

fn product_route_pp(q: &KernelQuery) -> Complex64 {
    // Pointwise identity: the all-plus kernel equals
    // cos(3πν₁/2)·cos(3πν₂/2)/cos(3πν₃/2) / (12π²) times the kind-5 integral.
    let nu = q.mu.nu();
    let c = |v: Complex64| (v * 1.5 * PI).cos();
    let coeff = c(nu[0]) * c(nu[1]) / c(nu[2]) / (12.0 * PI * PI);
    coeff * j_double(DoubleBesselKind::J5, q).unwrap().value
}

#[test]
fn contour_route_matches_product_route_and_references() {
    for &(y1, y2, t, want) in &CONTOUR_REFERENCE {
        let mu = axis(t, 0.0, -t);
        let q = KernelQuery::new(y1, y2, mu).unwrap();
        let mb = mellin_barnes_pp(&q).unwrap();
        assert!(
            crel_close(mb.value, Complex64::new(want, 0.0), CONTOUR_REF_TOL),
            "contour value at ({y1},{y2}), t = {t}: {} vs {want}",
            mb.value
        );
        let product = product_route_pp(&q);
        assert!(
            crel_close(mb.value, product, 1e-3),
            "route mismatch at ({y1},{y2}), t = {t}: {} vs {product}",
            mb.value
        );
    }
}

// ---------------------------------------------------------------------------
// Assembled kernels
// ---------------------------------------------------------------------------

/// External references for the assembled kernel at parameter i·(1, 0, -1)
/// (negated where marked): rows of (y1, y2, negate, value).
const ASSEMBLED_REFERENCE: [(f64, f64, bool, f64); 4] = [
    (0.5, -2.0, false, -0.00152541620816372),
    (2.0, -0.5, true, 1.60054803383255e-5),
    (1.0, -2.0, false, 0.000860710267233144),
    (2.0, -1.0, true, 0.000142047887035126),
];

#[test]
fn assembled_kernel_matches_reference_values() {
    let mu = axis(1.0, 0.0, -1.0);
    for &(y1, y2, negate, want) in &ASSEMBLED_REFERENCE {
        let m = if negate { mu.negated() } else { mu };
        let q = KernelQuery::new(y1, y2, m).unwrap();
        let got = j_assembled_value(&q);
        // The smallest reference sits six decades below the largest summand
        // entering it, so compare absolutely at a scale-aware tolerance.
        let tol_abs = (1e-5 * want.abs()).max(1e-9);
        assert!(
            (got - Complex64::new(want, 0.0)).norm() <= tol_abs,
            "assembled kernel at ({y1},{y2}, negate = {negate}): {got} vs {want}"
        );
    }
}

fn j_assembled_value(q: &KernelQuery) -> Complex64 {
    assembled_kernel(q).unwrap().value
}

#[test]
fn mixed_sign_assembly_reduces_to_the_swapped_opposite_case() {
    let mu = axis(1.0, 0.0, -1.0);
    let lhs = j_assembled_value(&KernelQuery::new(-1.0, 2.5, mu).unwrap());
    let rhs = j_assembled_value(&KernelQuery::new(2.5, -1.0, mu.negated()).unwrap());
    assert!(crel_close(lhs, rhs, EXACT_TOL), "{lhs} vs {rhs}");
}

#[test]
fn assembled_kernels_recombine_their_components() {
    let mu = axis(1.0, 0.0, -1.0);
    let y = (1.0, 2.0);
    let norm = 1.0 / (PI * PI);

    // Both arguments positive: cyclic sum of the pointwise product route.
    let q_pp = KernelQuery::new(y.0, y.1, mu).unwrap();
    let mut sum = Complex64::new(0.0, 0.0);
    for w in WeylElement::CYCLIC {
        let qw = KernelQuery::new(y.0, y.1, mu.weyl(w)).unwrap();
        sum += product_route_pp(&qw);
    }
    let got = j_assembled_value(&q_pp);
    assert!(crel_close(got, sum, 1e-10), "all-plus assembly: {got} vs {sum}");

    // Mixed signs: cyclic sum of kinds 2 + 3 + 4 over the same images.
    let q_pm = KernelQuery::new(y.0, -y.1, mu).unwrap();
    let mut sum = Complex64::new(0.0, 0.0);
    for w in WeylElement::CYCLIC {
        let qw = KernelQuery::new(y.0, y.1, mu.weyl(w)).unwrap();
        for kind in [DoubleBesselKind::J2, DoubleBesselKind::J3, DoubleBesselKind::J4] {
            sum += j_double(kind, &qw).unwrap().value;
        }
    }
    sum *= norm / 24.0;
    let got = j_assembled_value(&q_pm);
    assert!(crel_close(got, sum, 1e-10), "mixed-sign assembly: {got} vs {sum}");

    // Both arguments negative: cyclic sum of 4·(kind 1 minus) + 2·(kind 1 plus).
    let q_mm = KernelQuery::new(-y.0, -y.1, mu).unwrap();
    let mut sum = Complex64::new(0.0, 0.0);
    for w in WeylElement::CYCLIC {
        let qw = KernelQuery::new(y.0, y.1, mu.weyl(w)).unwrap();
        sum += 4.0 * j_double(DoubleBesselKind::J1(Sign::Minus), &qw).unwrap().value;
        sum += 2.0 * j_double(DoubleBesselKind::J1(Sign::Plus), &qw).unwrap().value;
    }
    sum *= norm / 48.0;
    let got = j_assembled_value(&q_mm);
    assert!(crel_close(got, sum, 1e-10), "all-minus assembly: {got} vs {sum}");
}

#[test]
fn all_plus_assembly_agrees_with_the_contour_route() {
    let mu = axis(1.0, 0.0, -1.0);
    let q = KernelQuery::new(1.0, 1.0, mu).unwrap();
    let assembled = j_assembled_value(&q);
    let mut sum = Complex64::new(0.0, 0.0);
    for w in WeylElement::CYCLIC {
        let qw = KernelQuery::new(1.0, 1.0, mu.weyl(w)).unwrap();
        sum += mellin_barnes_pp(&qw).unwrap().value;
    }
    assert!(
        crel_close(assembled, sum, 1e-3),
        "assembled {assembled} vs contour sum {sum}"
    );
}

// ---------------------------------------------------------------------------
// Property tests
// ---------------------------------------------------------------------------

proptest! {
    #[test]
    fn axis_constructor_lands_on_the_axis(r1 in -8.0..8.0f64, r2 in -8.0..8.0f64) {
        let p = SpectralPoint::from_axis([r1, r2, -r1 - r2]).unwrap();
        prop_assert!(p.is_on_axis());
        let total: Complex64 = p.mu().iter().sum();
        prop_assert!(total.norm() <= 1e-9);
    }

    #[test]
    fn weyl_action_permutes_the_coordinates(
        r1 in -8.0..8.0f64,
        r2 in -8.0..8.0f64,
        idx in 0usize..6,
    ) {
        let p = SpectralPoint::from_axis([r1, r2, -r1 - r2]).unwrap();
        let w = WeylElement::ALL[idx];
        let mut before: Vec<f64> = p.mu().iter().map(|z| z.im).collect();
        let mut after: Vec<f64> = p.weyl(w).mu().iter().map(|z| z.im).collect();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        prop_assert_eq!(before, after);
    }

    #[test]
    fn spectral_measure_is_nonnegative_on_the_axis(r1 in -8.0..8.0f64, r2 in -8.0..8.0f64) {
        let p = SpectralPoint::from_axis([r1, r2, -r1 - r2]).unwrap();
        prop_assert!(spec_measure(&p).unwrap() >= 0.0);
    }

    #[test]
    fn localization_polynomial_is_real_on_the_axis(r1 in -8.0..8.0f64, r2 in -8.0..8.0f64) {
        let p = SpectralPoint::from_axis([r1, r2, -r1 - r2]).unwrap();
        let params = TestFunctionParams::with_defaults(4.0, SpectralPoint::from_axis([4.0, 0.0, -4.0]).unwrap()).unwrap();
        let value = localization_polynomial(&p, &params);
        prop_assert!(value.im.abs() <= 1e-12 * value.re.abs().max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn kind_five_swap_invariance_holds_generically(
        y1 in 0.3..4.0f64,
        y2 in 0.3..4.0f64,
        t in 0.2..2.5f64,
        s in -1.0..1.0f64,
    ) {
        let mu = SpectralPoint::from_axis([t, s, -t - s]).unwrap();
        let a = j_double(DoubleBesselKind::J5, &KernelQuery::new(y1, y2, mu).unwrap())
            .unwrap()
            .value;
        let b = j_double(
            DoubleBesselKind::J5,
            &KernelQuery::new(y2, y1, mu.reversed_negated()).unwrap(),
        )
        .unwrap()
        .value;
        prop_assert!(crel_close(a, b, 1e-10), "{} vs {}", a, b);
    }
}

use std::f64::consts::PI;

use mindet_core::grid::{inner_product, trapezoid};
use mindet_core::moments::cosine_integrals;
use mindet_core::phasespace::{cross_mixed_moment_by_derivatives, cross_wigner, current, current_forms, wigner};
use mindet_core::representations::{expand, oscillator_basis, oscillator_grid};
use mindet_core::spectral::{
    char_function_of_distribution, char_function_window, dirichlet_kernel, momentum_distribution, output_grid,
    to_momentum,
};
use mindet_core::wavepacket::build_superposition;
use mindet_core::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = WindowFamily> {
    prop::sample::select(WindowFamily::ALL.to_vec())
}

fn gaussian_wave(grid: Grid1D, center: f64, width: f64, k: f64, chirp: f64) -> SampledWave {
    SampledWave::from_fn(grid, 1.0, AxisKind::Position, |x| {
        let d = x - center;
        Complex64::from_polar((-d * d / (2.0 * width * width)).exp(), k * x + chirp * d * d)
    })
    .unwrap()
    .normalized()
    .unwrap()
}

/// Full band with a momentum step fine enough for the Wigner lag FFT.
fn padded() -> TransformOptions {
    TransformOptions {
        max_step: Some(0.15),
        ..TransformOptions::default()
    }
}

fn coarse_grid() -> Grid1D {
    Grid1D::covering(-4.0, 4.0, 1.0 / 64.0, 0.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trapezoid_of_constant_is_exact(c in -1e3f64..1e3, step in 1e-3f64..0.5, count in 2usize..2000) {
        let values = vec![c; count];
        let extent = step * (count - 1) as f64;
        let got = trapezoid(&values, step);
        prop_assert!((got - c * extent).abs() <= 1e-12 * (c * extent).abs().max(1.0));
    }

    #[test]
    fn self_inner_product_is_real_and_nonnegative(
        center in -2.0f64..2.0, width in 0.1f64..1.0, k in -20.0f64..20.0, chirp in -5.0f64..5.0,
    ) {
        let w = gaussian_wave(coarse_grid(), center, width, k, chirp);
        let ip = inner_product(&w, &w).unwrap();
        prop_assert!(ip.re >= 0.0);
        prop_assert!(ip.im.abs() <= 1e-12);
    }

    #[test]
    fn dirichlet_identity(n in 1usize..12, x in -20.0f64..20.0) {
        let s: Complex64 = (0..n).map(|k| Complex64::from_polar(1.0, k as f64 * x)).sum();
        let direct = s.norm_sqr();
        prop_assert!((dirichlet_kernel(n, x) - direct).abs() <= 1e-9 * (n * n) as f64);
    }

    #[test]
    fn dirichlet_limit_at_singularities(n in 1usize..12, k in -5i32..5) {
        let x = 2.0 * PI * k as f64;
        prop_assert!((dirichlet_kernel(n, x) - (n * n) as f64).abs() <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn superposition_invariants(
        fam in family(),
        extent in 0.3f64..1.5,
        gap in 0.05f64..1.0,
        lobes in 2usize..5,
        alpha in -PI..PI,
    ) {
        let window = WindowSpec::new(fam, extent).unwrap();
        let spec = SuperpositionSpec::linear(window, extent + gap, lobes, alpha).unwrap();
        let grid = Grid1D::covering(0.0, spec.span(), 1.0 / 256.0, 0.25).unwrap();
        let sup = build_superposition(&spec, &grid, 1.0).unwrap();
        prop_assert_eq!(sup.max_overlap, 0.0);
        for n in 0..lobes {
            for m in n + 1..lobes {
                let worst = sup.lobes[n].values().iter().zip(sup.lobes[m].values())
                    .map(|(a, b)| (a * b).norm()).fold(0.0, f64::max);
                prop_assert_eq!(worst, 0.0);
            }
        }
        prop_assert!((sup.wave.norm_sqr() - 1.0).abs() <= 1e-10);
        let reference = build_superposition(&spec.with_alpha(0.0), &grid, 1.0).unwrap();
        let gap = sup.wave.values().iter().zip(reference.wave.values())
            .map(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs()).fold(0.0, f64::max);
        prop_assert!(gap <= 1e-12);
    }

    #[test]
    fn transform_is_unitary(
        center in -1.5f64..1.5, width in 0.15f64..0.8, k in -30.0f64..30.0, chirp in -3.0f64..3.0,
    ) {
        let w = gaussian_wave(coarse_grid(), center, width, k, chirp);
        let phi = to_momentum(&w).unwrap();
        prop_assert!((phi.norm_sqr() - w.norm_sqr()).abs() <= 1e-8);
    }

    #[test]
    fn char_function_of_real_density_is_hermitian(
        weights in prop::collection::vec(0.0f64..1.0, 4),
        centers in prop::collection::vec(-3.0f64..3.0, 4),
    ) {
        let g = Grid1D::symmetric(8.0, 1.0 / 32.0).unwrap();
        let d = Distribution1D::from_fn(g, |p| {
            weights.iter().zip(&centers).map(|(w, c)| w * (-(p - c).powi(2)).exp()).sum::<f64>() + 1e-3 * (-p * p / 8.0).exp()
        }).unwrap();
        let theta = Grid1D::symmetric(6.0, 1.0 / 16.0).unwrap();
        let m = char_function_of_distribution(&d, &theta);
        prop_assert!(m.hermitian_defect() <= 1e-12 * m.max_modulus().max(1.0));
    }

    #[test]
    fn window_char_function_has_compact_support(fam in family(), extent in 0.2f64..2.0) {
        let w = WindowSpec::new(fam, extent).unwrap();
        let theta = Grid1D::symmetric(2.0 * extent + 0.5, 1.0 / 64.0).unwrap();
        let m = char_function_window(&w, &theta, 1.0);
        for (t, v) in theta.points().zip(&m.values) {
            if t.abs() >= extent {
                prop_assert_eq!(v.norm(), 0.0);
            }
        }
    }

    #[test]
    fn cosine_integrals_scale_linearly(scale in 0.01f64..100.0, alpha in -PI..PI, shift in 0.5f64..3.0) {
        let g = Grid1D::symmetric(10.0, 1.0 / 32.0).unwrap();
        let d = Distribution1D::from_fn(g, |p| (-p * p / 2.0).exp()).unwrap();
        let ds = Distribution1D::from_fn(g, |p| scale * (-p * p / 2.0).exp()).unwrap();
        let (c1, s1) = cosine_integrals(&d, shift, alpha, 4, 1.0).unwrap();
        let (c2, s2) = cosine_integrals(&ds, shift, alpha, 4, 1.0).unwrap();
        for (a, b) in c1.iter().chain(&s1).zip(c2.iter().chain(&s2)) {
            prop_assert!((b - scale * a).abs() <= 1e-12 * (scale * a.abs()).max(1e-300).max(1e-12));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn closed_form_matches_pipeline_for_any_spec(
        fam in family(),
        alpha in -PI..PI,
        lobes in 2usize..4,
    ) {
        let window = WindowSpec::new(fam, 1.0).unwrap();
        let spec = SuperpositionSpec::linear(window, 2.0, lobes, alpha).unwrap();
        let grid = Grid1D::covering(0.0, spec.span(), 1.0 / 256.0, 0.5).unwrap();
        let opts = TransformOptions::band(32.0 * PI, PI / 16.0);
        let md = momentum_distribution(&spec, &grid, 1.0, &opts).unwrap();
        prop_assert!(md.discrepancy <= 1e-6, "{}", md.discrepancy);
    }

    #[test]
    fn wigner_is_real_with_matching_marginal(
        center in -1.0f64..1.0, width in 0.2f64..0.6, k in -8.0f64..8.0, chirp in -2.0f64..2.0,
    ) {
        let g = coarse_grid();
        let w = gaussian_wave(g, center, width, k, chirp);
        let p_grid = output_grid(&g, 1.0, &padded()).unwrap();
        let wg = wigner(&w, &p_grid).unwrap();
        prop_assert!(wg.imag_residue <= 1e-8);
        for (m, v) in wg.position_marginal().iter().zip(w.values()) {
            prop_assert!((m - v.norm_sqr()).abs() <= 1e-6);
        }
    }

    #[test]
    fn cross_wigner_conjugate_symmetry(
        c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, k1 in -6.0f64..6.0, k2 in -6.0f64..6.0,
    ) {
        let g = coarse_grid();
        let a = gaussian_wave(g, c1, 0.4, k1, 0.0);
        let b = gaussian_wave(g, c2, 0.3, k2, 0.5);
        let p_grid = output_grid(&g, 1.0, &padded()).unwrap();
        let ab = cross_wigner(&a, &b, &p_grid).unwrap();
        let ba = cross_wigner(&b, &a, &p_grid).unwrap();
        prop_assert!(ab.conjugate_defect(&ba).unwrap() <= 1e-10);
    }

    #[test]
    fn current_integrates_to_mean_momentum(
        center in -1.0f64..1.0, width in 0.2f64..0.6, k in -10.0f64..10.0, chirp in -3.0f64..3.0,
    ) {
        let w = gaussian_wave(coarse_grid(), center, width, k, chirp);
        let total = current(&w).unwrap().iter().sum::<f64>() * w.grid().step();
        let phi = to_momentum(&w).unwrap();
        let mean: f64 = phi.grid().points().zip(phi.values()).map(|(p, v)| p * v.norm_sqr()).sum::<f64>()
            * phi.grid().step();
        prop_assert!((total - mean).abs() <= 1e-6);
    }

    #[test]
    fn current_forms_agree(
        c1 in -1.0f64..1.0, c2 in -1.0f64..1.0, k1 in -5.0f64..5.0, k2 in -5.0f64..5.0, alpha in -PI..PI,
    ) {
        let g = coarse_grid();
        let a = gaussian_wave(g, c1, 0.5, k1, 0.3);
        let b = gaussian_wave(g, c2, 0.4, k2, -0.2);
        let f = current_forms(&a, &b, alpha).unwrap();
        for i in 0..f.bilinear.len() {
            prop_assert!((f.bilinear[i] - f.amplitude_phase[i]).abs() <= 1e-8);
            prop_assert!((f.symmetric[i] - f.amplitude_phase[i]).abs() <= 1e-8);
        }
    }

    #[test]
    fn cross_moment_routes_agree(
        c1 in -0.8f64..0.8, c2 in -0.8f64..0.8, k1 in -4.0f64..4.0, k2 in -4.0f64..4.0,
    ) {
        let g = Grid1D::covering(-5.0, 5.0, 1.0 / 64.0, 0.0).unwrap();
        let a = gaussian_wave(g, c1, 0.4, k1, 0.0);
        let b = gaussian_wave(g, c2, 0.5, k2, 0.0);
        let p_grid = output_grid(&g, 1.0, &padded()).unwrap();
        let cw = cross_wigner(&a, &b, &p_grid).unwrap();
        for n in 0..=4 {
            for m in 0..=4 - n {
                let q = cw.mixed_moment(n, m);
                let d = cross_mixed_moment_by_derivatives(&a, &b, n, m).unwrap();
                prop_assert!((q - d).norm() <= 1e-6, "({}, {}): {} vs {}", n, m, q, d);
            }
        }
    }

    #[test]
    fn expansion_obeys_parseval(center in 1.0f64..2.0, width in 0.1f64..0.4, k in -10.0f64..10.0) {
        let grid = oscillator_grid(1.5, 0.15, 128, 1.0 / 256.0).unwrap();
        let basis = oscillator_basis(&grid, 128, 1.0, 1.5, 0.15).unwrap();
        let w = gaussian_wave(grid, center, width, k, 0.0);
        let e = expand(&w, &basis).unwrap();
        if !e.is_truncated() {
            prop_assert!((e.captured_norm - e.wave_norm).abs() <= 1e-6);
        } else {
            prop_assert!(e.captured_norm < e.wave_norm);
        }
    }
}

#[test]
fn trapezoid_converges_at_second_order() {
    let err = |n: usize| {
        let h = 1.0 / n as f64;
        let v: Vec<f64> = (0..=n).map(|i| (-(i as f64 * h).powi(2)).exp()).collect();
        // ∫₀¹ e^{−x²} dx = (√π/2) erf(1)
        (trapezoid(&v, h) - 0.746_824_132_812_427_1).abs()
    };
    let order = (err(64) / err(128)).log2();
    assert!(order >= 1.9, "observed order {order}");
}

#[test]
fn closed_form_matches_pipeline_for_every_family_and_alpha() {
    let s = Scenario::canonical();
    for fam in WindowFamily::ALL {
        let window = WindowSpec::new(fam, 1.0).unwrap();
        for &alpha in &s.alphas {
            let spec = SuperpositionSpec::two_lobe(window, 2.0, alpha).unwrap();
            let md = momentum_distribution(&spec, &s.x_grid().unwrap(), 1.0, &s.momentum_options()).unwrap();
            assert!(md.discrepancy <= 1e-6, "{fam:?} at {alpha}: {}", md.discrepancy);
        }
    }
}

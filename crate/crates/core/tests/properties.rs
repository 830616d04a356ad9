use num_complex::Complex64;
use proptest::prelude::*;

use nlsw_ewi::diagnostics::{forward_difference, gradient_l2};
use nlsw_ewi::{
    build_table, forward_dft, grid_norms, integrate, inverse_dft, sobolev_norm, stable_sinc, GridSpec, InitialData,
    ModelParams, SpectralField,
};

fn coeffs(m: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), m)
}

fn field(grid: GridSpec, raw: &[(f64, f64)]) -> SpectralField {
    SpectralField::from_fft_order(grid, raw.iter().map(|&(re, im)| Complex64::new(re, im)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_round_trip(raw in coeffs(32), a in -5.0f64..5.0, len in 0.5f64..10.0) {
        let grid = GridSpec::new(a, a + len, 32).unwrap();
        let f = field(grid, &raw);
        let back = forward_dft(&grid, &inverse_dft(&f)).unwrap();
        for (x, y) in f.as_fft_order().iter().zip(back.as_fft_order()) {
            prop_assert!((x - y).norm() < 1e-13);
        }
    }

    #[test]
    fn parseval_on_the_grid(raw in coeffs(16)) {
        let grid = GridSpec::symmetric(16).unwrap();
        let f = field(grid, &raw);
        let (l2, _) = grid_norms(&inverse_dft(&f), grid.h());
        let coeff_l2 = sobolev_norm(&f, 0) * grid.length().sqrt();
        prop_assert!((l2 - coeff_l2).abs() <= 1e-12 * (1.0 + l2));
    }

    #[test]
    fn padding_keeps_values_and_norms(raw in coeffs(16)) {
        let grid = GridSpec::symmetric(16).unwrap();
        let mut f = field(grid, &raw);
        // a real-valued interpolant needs a symmetric Nyquist treatment; drop it
        f.set_coeff(-8, Complex64::new(0.0, 0.0));
        let g = f.pad_to(64).unwrap();
        prop_assert!((sobolev_norm(&f, 1) - sobolev_norm(&g, 1)).abs() < 1e-12);
        for x in [-3.0, -1.1, 0.0, 0.7, 2.9] {
            prop_assert!((f.evaluate(x) - g.evaluate(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn gradient_over_difference_is_bounded(raw in coeffs(64)) {
        let grid = GridSpec::symmetric(64).unwrap();
        let mut f = field(grid, &raw);
        f.set_coeff(0, Complex64::new(0.0, 0.0));
        prop_assume!(sobolev_norm(&f, 0) > 1e-6);
        let (d, _) = grid_norms(&forward_difference(&inverse_dft(&f), grid.h()), grid.h());
        let ratio = gradient_l2(&f) / d;
        prop_assert!(ratio >= 1.0 - 1e-12 && ratio <= std::f64::consts::FRAC_PI_2 + 1e-12);
    }

    #[test]
    fn split_identities_hold(alpha in 0.2f64..2.0, eps in 0.05f64..1.0, tau in 1e-3f64..0.2) {
        let table = build_table(&GridSpec::symmetric(32).unwrap(), alpha, eps, 1, tau).unwrap();
        for r in table.split_residuals() {
            prop_assert!(r <= 1e-12, "residual {r}");
        }
    }

    #[test]
    fn sinc_is_smooth_across_the_switch(x in 1e-6f64..1e-3) {
        let exact = x.sin() / x;
        prop_assert!((stable_sinc(x) - exact).abs() < 1e-15);
        prop_assert_eq!(stable_sinc(x), stable_sinc(-x));
    }

    #[test]
    fn amplitude_scaling_is_covariant(s in 1.1f64..4.0) {
        let grid = GridSpec::symmetric(32).unwrap();
        let (psi0, psi1) = InitialData::Standard.sample(&grid).unwrap();
        let scale = |v: &[Complex64]| v.iter().map(|z| z * s).collect::<Vec<_>>();
        let tau = 0.01;
        let base = integrate(&grid, &ModelParams::default(), &psi0, &psi1, tau, 0.5, None).unwrap();
        let run = integrate(
            &grid,
            &ModelParams::default().with_eps(1.0 / s),
            &scale(&psi0),
            &scale(&psi1),
            tau,
            0.5,
            None,
        )
        .unwrap();
        let diff = run.current().sub(&base.current().scale(Complex64::new(s, 0.0))).unwrap();
        prop_assert!(sobolev_norm(&diff, 1) < 1e-9 * s);
    }
}

#[test]
fn spatial_error_decays_spectrally() {
    let params = ModelParams::default();
    let fine = GridSpec::symmetric(128).unwrap();
    let data = InitialData::Standard;
    let reference = nlsw_ewi::make_reference(&fine, &params, &data, 0.01).unwrap();
    let mut last = f64::INFINITY;
    for m in [8, 16, 32, 64] {
        let g = GridSpec::symmetric(m).unwrap();
        let (a, b) = data.sample(&g).unwrap();
        let u = integrate(&g, &params, &a, &b, 0.01, 1.0, None).unwrap();
        let err = nlsw_ewi::error_report(u.current(), &reference).unwrap().h1;
        assert!(err < last / 10.0, "M = {m}: {err} vs {last}");
        last = err;
    }
    assert!(last < 1e-8);
}

#[test]
fn temporal_self_convergence_is_second_order() {
    let params = ModelParams::new(1.0, 0.5, 1, 1.0, 1.0).unwrap();
    let grid = GridSpec::symmetric(32).unwrap();
    let (a, b) = InitialData::Standard.sample(&grid).unwrap();
    let t = params.final_time();
    let run = |tau: f64| integrate(&grid, &params, &a, &b, tau, t, None).unwrap().into_current();
    let reference = run(1e-3);
    let errs: Vec<(f64, f64)> = [0.04, 0.02, 0.01]
        .iter()
        .map(|&tau| (tau, sobolev_norm(&run(tau).sub(&reference).unwrap(), 1)))
        .collect();
    let order = nlsw_ewi::observed_order(&errs).unwrap();
    assert!((1.8..=2.2).contains(&order), "order {order}");
}

#[test]
fn integration_is_deterministic() {
    let grid = GridSpec::symmetric(32).unwrap();
    let (a, b) = InitialData::Standard.sample(&grid).unwrap();
    let run = || integrate(&grid, &ModelParams::default(), &a, &b, 0.01, 1.0, None).unwrap();
    assert_eq!(run(), run());
}

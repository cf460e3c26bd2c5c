use num_complex::Complex64 as C64;
use polarisim_core::analysis::{find_peaks, fit_lorentzian, Samples, PEAK_THRESHOLD};
use polarisim_core::modes::{
    build_h, build_h_damped, eigenvalues, match_poles_eigenvalues, pairing_distance, poles,
    MatrixKind,
};
use polarisim_core::response::{
    absorption_linear, linear_transmission_transfer, pump_probe_spectrum, reflection_transfer,
    transmission_transfer, Spectrum,
};
use polarisim_core::{SpectralGrid, SystemParams};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = SystemParams> {
    (
        1900.0..2100.0f64,
        -40.0..40.0f64,
        0.0..20.0f64,
        0.0..8.0f64,
        -5.0..15.0f64,
        0.0..40.0f64,
        -0.6..0.6f64,
        0.0..1.0f64,
    )
        .prop_map(|(w0, det, kappa, gamma_m, delta, g1, r, f)| SystemParams {
            omega_0: w0,
            omega_c: w0 + det,
            kappa,
            gamma_m,
            delta,
            g1_coll: g1,
            g3_ratio: r,
            f_pu: f,
        })
}

/// Lossless molecules with well-separated bare frequencies and strong
/// coupling, away from accidental root coalescence.
fn undamped() -> impl Strategy<Value = SystemParams> {
    (params(), 5.0..15.0f64, 10.0..30.0f64, 2.0..20.0f64).prop_map(|(p, delta, g1, kappa)| {
        SystemParams {
            gamma_m: 0.0,
            delta,
            g1_coll: g1,
            kappa,
            ..p
        }
    })
}

proptest! {
    #[test]
    fn derived_rates_are_pure(p in params()) {
        let (a, b) = (p.derived(), p.derived());
        prop_assert_eq!(a, b);
        prop_assert_eq!(a.gamma_3.to_bits(), (3.0 * a.gamma_1).to_bits());
    }

    #[test]
    fn poles_equal_lossless_eigenvalues(p in undamped()) {
        let distance = match_poles_eigenvalues(&p, MatrixKind::Lossless).unwrap();
        prop_assert!(distance < 1e-9, "{distance} for {p:?}");
    }

    #[test]
    fn eigenvalues_sum_to_trace(p in params()) {
        let h = build_h(&p);
        prop_assert!((eigenvalues(&h).unwrap().sum() - h.trace()).norm() < 1e-10);
        let q = SystemParams { g3_ratio: 0.0, ..p };
        if let Ok(m) = build_h_damped(&q) {
            prop_assert!((eigenvalues(&m).unwrap().sum() - m.trace()).norm() < 1e-10);
        }
    }

    #[test]
    fn lossless_modes_below_half_inversion_decay(p in undamped(), f in 0.0..0.499f64) {
        let p = SystemParams { f_pu: f, ..p };
        for l in eigenvalues(&build_h(&p)).unwrap().poles() {
            prop_assert!(l.im <= 1e-9 && l.im >= -p.kappa / 2.0 - 1e-9, "{l} for {p:?}");
        }
    }

    #[test]
    fn harmonic_system_has_no_pump_signal(p in params()) {
        let p = SystemParams { delta: 0.0, g3_ratio: 0.0, ..p };
        let grid = SpectralGrid::new(p.omega_0 - 60.0, p.omega_0 + 60.0, 0.5).unwrap();
        let dt = pump_probe_spectrum(&p, &grid).unwrap();
        prop_assert!(dt.values().iter().all(|v| v.abs() <= 1e-14));
    }

    #[test]
    fn linear_energy_balance(p in params()) {
        let p = p.linear_reference();
        prop_assume!(p.kappa > 0.0);
        let grid = SpectralGrid::new(p.omega_0 - 60.0, p.omega_0 + 60.0, 0.25).unwrap();
        for w in grid.iter() {
            let t = transmission_transfer(&p, w).unwrap().norm_sqr();
            let r = reflection_transfer(&p, w).unwrap().norm_sqr();
            let a = absorption_linear(&p, w);
            prop_assert!((t + r + a - 1.0).abs() < 1e-12, "{w}: {}", t + r + a);
        }
    }

    #[test]
    fn unpumped_transmission_reduces_to_two_modes(p in params(), w in -60.0..60.0f64) {
        let p = SystemParams { f_pu: 0.0, ..p };
        let w = p.omega_0 + w;
        let full = transmission_transfer(&p, w).unwrap();
        let reduced = linear_transmission_transfer(&p, w).unwrap();
        prop_assert!((full - reduced).norm() <= 1e-14 * full.norm().max(1.0));
    }

    #[test]
    fn peaks_lie_on_discrete_maxima(values in prop::collection::vec(0.0..1.0f64, 3..200)) {
        let n = values.len();
        let grid = SpectralGrid::new(1900.0, 1900.0 + 0.5 * (n - 1) as f64, 0.5).unwrap();
        prop_assume!(grid.len() == n);
        let s = Spectrum::new(grid, values.clone()).unwrap();
        let peaks = find_peaks(&s, PEAK_THRESHOLD);
        let f = peaks.frequencies();
        prop_assert!(f.windows(2).all(|w| w[0] < w[1]));
        for peak in peaks.iter() {
            prop_assert!(peak.frequency >= grid.min() && peak.frequency <= grid.max());
            prop_assert!(peak.height > 0.0);
            let k = grid.nearest_index(peak.frequency);
            prop_assert!(k > 0 && k + 1 < n);
            prop_assert!(values[k] > values[k - 1] && values[k] > values[k + 1]);
        }
    }

    #[test]
    fn lorentzian_fit_scales_with_data(c in 0.01..100.0f64) {
        let omega: Vec<f64> = (0..301).map(|k| 1968.0 + 0.1 * k as f64).collect();
        let values: Vec<f64> = omega
            .iter()
            .map(|w| 0.02 + 0.7 * 2.25 / ((w - 1983.4) * (w - 1983.4) + 2.25) + 1e-3 * (w * 7.0).sin())
            .collect();
        let base = fit_lorentzian(&Samples::new(omega.clone(), values.clone()).unwrap()).unwrap();
        let scaled_values = values.iter().map(|v| c * v).collect();
        let scaled = fit_lorentzian(&Samples::new(omega, scaled_values).unwrap()).unwrap();
        prop_assert!((scaled.center - base.center).abs() < 1e-9);
        prop_assert!((scaled.fwhm - base.fwhm).abs() < 1e-9);
        prop_assert!((scaled.amplitude - c * base.amplitude).abs() < 1e-9 * c);
        prop_assert!((scaled.baseline - c * base.baseline).abs() < 1e-9 * c);
    }
}

#[test]
fn eigenvalues_continuous_through_half_inversion() {
    let p = SystemParams {
        gamma_m: 0.0,
        ..SystemParams::paper_defaults()
    };
    let steps = 2000;
    let set = |k: usize| {
        let f = 0.45 + 0.1 * k as f64 / steps as f64;
        eigenvalues(&build_h(&SystemParams { f_pu: f, ..p })).unwrap()
    };
    let jumps: Vec<f64> = (0..steps)
        .map(|k| pairing_distance(&set(k), &set(k + 1)))
        .collect();
    let largest = jumps.iter().copied().fold(0.0, f64::max);
    assert!(largest < 0.05, "largest jump {largest}");
    // The step across f = 1/2 is no larger than its neighbours'.
    let half = steps / 2;
    let neighbours = jumps[half - 2].max(jumps[half + 1]);
    assert!(
        jumps[half - 1].max(jumps[half]) <= 1.5 * neighbours,
        "{:?}",
        &jumps[half - 2..half + 2]
    );
}

#[test]
fn damped_matrix_matches_poles_over_pump_range() {
    let p = SystemParams {
        g3_ratio: 0.0,
        ..SystemParams::paper_defaults()
    };
    for k in 0..=20 {
        let q = SystemParams {
            f_pu: k as f64 / 20.0,
            ..p
        };
        let d = match_poles_eigenvalues(&q, MatrixKind::Damped).unwrap();
        assert!(d < 1e-8, "f = {}: {d}", q.f_pu);
    }
}

#[test]
fn poles_are_roots_of_denominator() {
    let p = SystemParams::paper_defaults();
    let res = poles(&p).unwrap();
    let poly = polarisim_core::response::denominator_poly(&p);
    for l in res.poles() {
        assert!(poly.eval_complex(*l).norm() < 1e-9);
    }
    assert!(res.poles().iter().all(|l: &C64| l.im < 0.0));
}

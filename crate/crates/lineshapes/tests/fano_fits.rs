//! End-to-end Fano fitting tests on synthetic reflectance spectra.

use cbr_lineshapes::{fano_value, fit_fano, FanoParams, LineshapeError};
use cbr_spectra::{nm_to_ev, AxisKind, Spectrum, CONSTANTS};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

fn truth() -> FanoParams {
    FanoParams::new(0.35, 0.62, 0.3, 1.5478, 0.008).unwrap()
}

fn synthetic_energy_spectrum(p: &FanoParams, noise: f64, seed: u64) -> Spectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 601;
    let axis: Vec<f64> = (0..n)
        .map(|i| p.center_ev - 0.06 + 0.12 * i as f64 / (n - 1) as f64)
        .collect();
    let intensity: Vec<f64> = axis
        .iter()
        .map(|&e| {
            let clean = fano_value(e, p);
            // Box-Muller from two uniforms; deterministic via ChaCha.
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            (clean + noise * z).max(0.0)
        })
        .collect();
    Spectrum::new(axis, intensity, AxisKind::Energy, "synthetic dip").unwrap()
}

#[test]
fn noiseless_recovery_is_exact() {
    let p = truth();
    let s = synthetic_energy_spectrum(&p, 0.0, 0);
    let fit = fit_fano(&s, None).unwrap();
    let rel = |a: f64, b: f64| ((a - b) / b).abs();
    assert!(rel(fit.params.amplitude, p.amplitude) <= 1e-4);
    assert!(rel(fit.params.background, p.background) <= 1e-4);
    assert!((fit.params.q - p.q).abs() <= 1e-4);
    assert!((fit.params.center_ev - p.center_ev).abs() <= 1e-7);
    assert!(rel(fit.params.gamma_ev, p.gamma_ev) <= 1e-4);
}

#[test]
fn noisy_dip_center_and_quality() {
    let p = truth();
    let s = synthetic_energy_spectrum(&p, 0.01, 42);
    let fit = fit_fano(&s, None).unwrap();
    assert!((fit.params.center_ev - p.center_ev).abs() <= 2e-3);
    let q_true = p.center_ev / p.gamma_ev;
    assert!((fit.quality() - q_true).abs() / q_true <= 0.15);
    // Uncertainties are positive and small relative to the values.
    assert!(fit.uncertainties[3] > 0.0 && fit.uncertainties[3] < 1e-3);
}

#[test]
fn wavelength_axis_input_is_converted() {
    let p = truth();
    let energy = synthetic_energy_spectrum(&p, 0.0, 0);
    // Re-express the same data on a wavelength axis (reverses ordering).
    let lambda: Vec<f64> = energy
        .axis()
        .iter()
        .map(|&e| CONSTANTS.hc_ev_nm / e)
        .collect();
    let s = Spectrum::from_unsorted(
        lambda,
        energy.intensity().to_vec(),
        AxisKind::Wavelength,
        "wavelength dip",
    )
    .unwrap();
    let fit = fit_fano(&s, None).unwrap();
    assert!((fit.params.center_ev - p.center_ev).abs() <= 1e-6);
    let nm = fit.center_nm();
    let expect_nm = CONSTANTS.hc_ev_nm / p.center_ev;
    assert!((nm - expect_nm).abs() <= 1e-3, "{nm} vs {expect_nm}");
    // Round trip through the axis conversion helper agrees.
    assert!((nm_to_ev(nm).unwrap().ev() - fit.params.center_ev).abs() <= 1e-12);
}

#[test]
fn explicit_window_restricts_fit() {
    let p = truth();
    let s = synthetic_energy_spectrum(&p, 0.0, 0);
    let fit = fit_fano(&s, Some((p.center_ev - 0.02, p.center_ev + 0.02))).unwrap();
    assert!(fit.window.0 >= p.center_ev - 0.021);
    assert!(fit.window.1 <= p.center_ev + 0.021);
    assert!((fit.params.center_ev - p.center_ev).abs() <= 1e-6);
}

#[test]
fn window_outside_axis_is_rejected() {
    let p = truth();
    let s = synthetic_energy_spectrum(&p, 0.0, 0);
    let err = fit_fano(&s, Some((2.5, 2.6))).unwrap_err();
    assert!(matches!(err, LineshapeError::WindowOutsideAxis { .. }));
    let err = fit_fano(&s, Some((1.6, 1.5))).unwrap_err();
    assert!(matches!(err, LineshapeError::WindowOutsideAxis { .. }));
}

#[test]
fn report_serializes_expected_keys() {
    let p = truth();
    let s = synthetic_energy_spectrum(&p, 0.0, 0);
    let fit = fit_fano(&s, None).unwrap();
    let json = serde_json::to_value(fit.report()).unwrap();
    for key in ["model", "params", "uncertainties", "reduced_chi2", "window", "E_c_eV", "E_c_nm", "Q"] {
        assert!(json.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(json["model"], "fano");
    let q = json["Q"].as_f64().unwrap();
    assert!((q - fit.quality()).abs() <= 1e-12);
}

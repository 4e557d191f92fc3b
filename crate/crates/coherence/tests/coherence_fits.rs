//! End-to-end checks of the coherence pipeline: fringe scans to
//! visibilities to coherence times to linewidths, against traces built
//! directly from the envelope model.

use cbr_coherence::{
    fit_coherence, fringe_visibility, fourier_limit_ratio, visibility_model, CoherenceError,
    FringeScan, VisibilityTrace,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const HBAR_EV_PS: f64 = 6.582_119_569e-4;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller from two uniforms.
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn trace_from_model(
    t_g: f64,
    t_l: f64,
    delays: &[f64],
    noise: f64,
    rng: &mut ChaCha8Rng,
) -> VisibilityTrace {
    let vis: Vec<f64> = delays
        .iter()
        .map(|&t| {
            let v = visibility_model(t, t_g, t_l) + noise * gaussian(rng);
            v.clamp(0.0, 1.0)
        })
        .collect();
    let errs = vec![noise.max(1e-4); delays.len()];
    VisibilityTrace::new(delays.to_vec(), vis, errs).unwrap()
}

fn delays() -> Vec<f64> {
    (0..30).map(|i| i as f64 * 12.0).collect()
}

#[test]
fn zero_noise_trace_recovers_times_to_1e6() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trace = trace_from_model(80.0, 150.0, &delays(), 0.0, &mut rng);
    let (res, fit) = fit_coherence(&trace).unwrap();
    assert!(fit.converged);
    assert!((res.t_g_ps - 80.0).abs() / 80.0 < 1e-6, "t_G = {}", res.t_g_ps);
    assert!((res.t_l_ps - 150.0).abs() / 150.0 < 1e-6, "t_L = {}", res.t_l_ps);
    // sigma and gamma are fixed multiples of the fitted times.
    assert!((res.sigma_ev - HBAR_EV_PS / res.t_g_ps).abs() < 1e-20);
    assert!((res.gamma_ev - HBAR_EV_PS / res.t_l_ps).abs() < 1e-20);
}

#[test]
fn two_percent_noise_recovers_times_to_5_percent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let trace = trace_from_model(80.0, 150.0, &delays(), 0.02, &mut rng);
    let (res, _) = fit_coherence(&trace).unwrap();
    assert!((res.t_g_ps - 80.0).abs() / 80.0 < 0.05, "t_G = {}", res.t_g_ps);
    assert!((res.t_l_ps - 150.0).abs() / 150.0 < 0.05, "t_L = {}", res.t_l_ps);
}

#[test]
fn pure_gaussian_trace_pushes_lorentzian_width_to_zero() {
    // Zero noise: the synthesized t_L = 1e12 ps leaves the Lorentzian
    // width ten orders below the Gaussian width, and the Voigt width
    // collapses onto the Gaussian width.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let trace = trace_from_model(80.0, 1e12, &delays(), 0.0, &mut rng);
    let (res, fit) = fit_coherence(&trace).unwrap();
    assert!(fit.converged);
    let f_g = res.fwhm_gaussian_ev();
    assert!(res.fwhm_lorentzian_ev() < 1e-6 * f_g);
    assert!((res.f_v_ev - f_g).abs() / f_g < 0.01);

    // With measurement noise the fitted Lorentzian rate must be
    // consistent with zero within its own uncertainty (the fit reports
    // the decay rates, so the comparison is direct).
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let trace = trace_from_model(80.0, 1e12, &delays(), 0.005, &mut rng);
    let (res, fit) = fit_coherence(&trace).unwrap();
    let u_l = fit.params[1];
    let u_l_err = fit.uncertainties()[1];
    assert!(u_l <= 3.0 * u_l_err.max(1e-16), "u_L = {u_l}, err = {u_l_err}");
    let f_g = res.fwhm_gaussian_ev();
    assert!((res.f_v_ev - f_g).abs() / f_g < 0.01);
}

#[test]
fn measured_linewidth_against_lifetime_limit() {
    // A 53 ps lifetime sets a 12.42 ueV transform limit; a fitted trace
    // whose Voigt width lands at 27.3 ueV is 2.2x above it.
    let ratio = fourier_limit_ratio(27.3e-6, 53.0).unwrap();
    assert!((ratio - 2.20).abs() < 0.005, "ratio = {ratio}");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trace = trace_from_model(80.0, 150.0, &delays(), 0.0, &mut rng);
    let (res, _) = fit_coherence(&trace).unwrap();
    let res = res.with_lifetime(53.0).unwrap();
    let expected = res.f_v_ev * 53.0 / HBAR_EV_PS;
    assert!((res.fourier_ratio.unwrap() - expected).abs() < 1e-12);
}

#[test]
fn degenerate_traces_are_rejected() {
    // All visibilities near 1: the decay is not sampled.
    let flat_high = VisibilityTrace::new(
        (0..8).map(|i| i as f64 * 5.0).collect(),
        vec![0.99, 0.98, 0.99, 0.97, 0.98, 0.99, 0.96, 0.98],
        vec![0.01; 8],
    )
    .unwrap();
    assert!(matches!(
        fit_coherence(&flat_high),
        Err(CoherenceError::DegenerateTrace(_))
    ));
    // All visibilities near 0: nothing coherent to fit.
    let flat_low = VisibilityTrace::new(
        (0..8).map(|i| i as f64 * 5.0).collect(),
        vec![0.01, 0.02, 0.0, 0.01, 0.03, 0.02, 0.01, 0.0],
        vec![0.01; 8],
    )
    .unwrap();
    assert!(matches!(
        fit_coherence(&flat_low),
        Err(CoherenceError::DegenerateTrace(_))
    ));
}

/// Fringe scans synthesized at a sequence of coarse delays, with the
/// envelope of a Voigt line, reproduce the coherence times end to end.
#[test]
fn fringe_scans_to_coherence_times() {
    let lambda = 800.0;
    let (t_g, t_l) = (80.0, 150.0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut delays = Vec::new();
    let mut vis = Vec::new();
    let mut errs = Vec::new();
    for k in 0..24 {
        let t = k as f64 * 15.0;
        let nu_true = visibility_model(t, t_g, t_l);
        let positions: Vec<f64> = (0..28).map(|i| i as f64 * 20.0).collect();
        let intensities: Vec<f64> = positions
            .iter()
            .map(|&x| {
                let fringe =
                    1.0 + nu_true * (4.0 * std::f64::consts::PI * x / lambda + 0.3).cos();
                (400.0 * fringe * (1.0 + 0.002 * gaussian(&mut rng))).max(0.0)
            })
            .collect();
        let scan = FringeScan::new(positions, intensities, t).unwrap();
        let (nu, err) = fringe_visibility(&scan, lambda).unwrap();
        assert!((0.0..=1.0).contains(&nu));
        delays.push(t);
        vis.push(nu.clamp(0.0, 1.0));
        errs.push(err.max(1e-4));
    }
    let trace = VisibilityTrace::new(delays, vis, errs).unwrap();
    let (res, _) = fit_coherence(&trace).unwrap();
    assert!((res.t_g_ps - t_g).abs() / t_g < 0.05, "t_G = {}", res.t_g_ps);
    assert!((res.t_l_ps - t_l).abs() / t_l < 0.05, "t_L = {}", res.t_l_ps);
}

/// Visible fringes at an 80 ps delay give an interior visibility.
#[test]
fn fringes_at_80_ps_give_interior_visibility() {
    let lambda = 780.0;
    let nu_true = visibility_model(80.0, 80.0, 150.0);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let positions: Vec<f64> = (0..26).map(|i| i as f64 * 20.0).collect();
    let intensities: Vec<f64> = positions
        .iter()
        .map(|&x| {
            let fringe = 1.0 + nu_true * (4.0 * std::f64::consts::PI * x / lambda).cos();
            (250.0 * fringe * (1.0 + 0.005 * gaussian(&mut rng))).max(0.0)
        })
        .collect();
    let scan = FringeScan::new(positions, intensities, 80.0).unwrap();
    let (nu, _) = fringe_visibility(&scan, lambda).unwrap();
    assert!(nu > 0.0 && nu < 1.0, "nu = {nu}");
    assert!((nu - nu_true).abs() < 0.05);
}

//! Statistical oracle tests: the reported parameter uncertainties are checked
//! against brute-force Monte-Carlo ensembles rather than against the fitter's
//! own internals.

use cbr_fit::{least_squares_fit, CurveModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Box-Muller standard normal draw.
fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[test]
fn gaussian_fit_uncertainties_cover_truth() {
    let truth = [2.0, 0.3, 0.8]; // amplitude, center, width
    let sigma = 0.02; // 1% of peak
    let x: Vec<f64> = (0..200).map(|i| -3.0 + 6.0 * i as f64 / 199.0).collect();
    let clean: Vec<f64> = x
        .iter()
        .map(|&x| truth[0] * (-(x - truth[1]).powi(2) / (2.0 * truth[2] * truth[2])).exp())
        .collect();
    let weights = vec![1.0 / sigma; x.len()];

    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let trials = 1000;
    let mut covered = [0usize; 3];
    for _ in 0..trials {
        let y: Vec<f64> = clean.iter().map(|&v| v + sigma * normal(&mut rng)).collect();
        let model = CurveModel::new(
            |x, p: &[f64]| p[0] * (-(x - p[1]).powi(2) / (2.0 * p[2] * p[2])).exp(),
            3,
            &x,
            &y,
        )
        .with_weights(&weights);
        let fit = least_squares_fit(&model, &[1.5, 0.5, 1.0]).unwrap();
        assert!(fit.converged);
        let err = fit.uncertainties();
        for i in 0..3 {
            assert!(err[i] > 0.0);
            if (fit.params[i] - truth[i]).abs() <= 3.0 * err[i] {
                covered[i] += 1;
            }
        }
    }
    for (i, &c) in covered.iter().enumerate() {
        let frac = c as f64 / trials as f64;
        assert!(
            frac >= 0.95,
            "parameter {i}: only {frac:.3} of trials within 3 sigma"
        );
    }
}

#[test]
fn linear_fit_sigma_matches_ensemble_scatter() {
    let truth = [0.2, 0.7]; // intercept, slope
    let sigma = 0.1;
    let x: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
    let clean: Vec<f64> = x.iter().map(|&x| truth[0] + truth[1] * x).collect();
    let weights = vec![1.0 / sigma; x.len()];

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let replicates = 1000;
    let mut slopes = Vec::with_capacity(replicates);
    let mut reported = Vec::with_capacity(replicates);
    for _ in 0..replicates {
        let y: Vec<f64> = clean.iter().map(|&v| v + sigma * normal(&mut rng)).collect();
        let model =
            CurveModel::new(|x, p: &[f64]| p[0] + p[1] * x, 2, &x, &y).with_weights(&weights);
        let fit = least_squares_fit(&model, &[0.0, 0.0]).unwrap();
        assert!(fit.converged);
        slopes.push(fit.params[1]);
        reported.push(fit.uncertainties()[1]);
    }

    let mean = slopes.iter().sum::<f64>() / replicates as f64;
    let empirical = (slopes.iter().map(|s| (s - mean).powi(2)).sum::<f64>()
        / (replicates - 1) as f64)
        .sqrt();
    let mean_reported = reported.iter().sum::<f64>() / replicates as f64;
    let ratio = mean_reported / empirical;
    assert!(
        (ratio - 1.0).abs() < 0.15,
        "reported sigma {mean_reported:.5} vs ensemble scatter {empirical:.5}"
    );
    assert!((mean - truth[1]).abs() < 4.0 * empirical / (replicates as f64).sqrt() + 1e-3);
}

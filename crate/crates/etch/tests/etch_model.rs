//! Regression behavior against a closed-form ordinary-least-squares
//! oracle, plus seeded recoveries of the tuning numbers the model is
//! built around.

use cbr_etch::{
    estimate_removal_depth, fit_q_trend, fit_shift_per_cycle, DesignLabel, EtchRecord,
    EtchSeries, RecordFlag, TuningModel, Uncertain,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-12..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn record(device: &str, cycle: u32, rt: Option<f64>, q: Option<f64>) -> EtchRecord {
    EtchRecord {
        device_id: device.into(),
        design: DesignLabel::D2,
        cycle,
        e_c_rt_ev: rt,
        e_c_lt_ev: if rt.is_none() { Some(1.55) } else { None },
        q,
        flag: RecordFlag::Ok,
    }
}

/// Closed-form unweighted OLS slope over (x, y) pairs.
fn ols_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - xm) * (p.1 - ym)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - xm) * (p.0 - xm)).sum();
    sxy / sxx
}

#[test]
fn shift_fit_matches_ols_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let pts: Vec<(u32, f64)> = (0..6u32)
        .map(|c| (c, 1.5 + 0.0051 * c as f64 + 0.0005 * gaussian(&mut rng)))
        .collect();
    let series = EtchSeries::new(
        pts.iter().map(|&(c, e)| record("dev", c, Some(e), None)).collect(),
    )
    .unwrap();
    let (slope, fit) = fit_shift_per_cycle(&series, &[]).unwrap();

    let oracle = ols_slope(
        &pts.iter().map(|&(c, e)| (c as f64, e)).collect::<Vec<_>>(),
    );
    assert!(
        (slope - oracle).abs() < 1e-10,
        "fit {slope} vs oracle {oracle}"
    );
    // Seeded noise at 0.5 meV leaves the recovered slope within 0.4 meV
    // of the true 5.1 meV/cycle, with a sane quoted uncertainty.
    assert!((slope - 0.0051).abs() < 4e-4, "slope = {slope}");
    let err = fit.uncertainties()[1];
    assert!(err > 2e-5 && err < 4e-4, "err = {err}");
}

#[test]
fn multi_device_pooling_averages_before_fitting() {
    // Two devices offset by 3 meV with identical slopes: the per-cycle
    // means lie exactly on a line, so the fit is exact even though the
    // raw point cloud is split.
    let mut records = Vec::new();
    for c in 0..5u32 {
        let e = 1.5 + 0.0051 * c as f64;
        records.push(record("a", c, Some(e), None));
        records.push(record("b", c, Some(e + 0.003), None));
    }
    let series = EtchSeries::new(records).unwrap();
    let (slope, _) = fit_shift_per_cycle(&series, &[]).unwrap();
    assert!((slope - 0.0051).abs() < 1e-10, "slope = {slope}");
}

#[test]
fn q_trend_recovers_seeded_slope() {
    // Ten devices, six cycles, Q = 180 - 2.6 c + noise(sigma = 1).
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut records = Vec::new();
    for dev in 0..10 {
        for c in 0..6u32 {
            let q = 180.0 - 2.6 * c as f64 + gaussian(&mut rng);
            records.push(record(&format!("dev{dev}"), c, Some(1.5), Some(q)));
        }
    }
    let series = EtchSeries::new(records).unwrap();
    let (slope, fit) = fit_q_trend(&series).unwrap();
    assert!((slope + 2.6).abs() < 0.5, "slope = {slope}");
    assert!(fit.converged);

    // Oracle: OLS over the per-cycle means.
    let mut by_cycle = vec![(0.0, 0usize); 6];
    for r in series.records() {
        if let Some(q) = r.q {
            by_cycle[r.cycle as usize].0 += q;
            by_cycle[r.cycle as usize].1 += 1;
        }
    }
    let means: Vec<(f64, f64)> = by_cycle
        .iter()
        .enumerate()
        .map(|(c, &(s, n))| (c as f64, s / n as f64))
        .collect();
    assert!((slope - ols_slope(&means)).abs() < 1e-10);
}

#[test]
fn removal_depth_spans_solver_sensitivity_band() {
    // A measured 2.6 nm/cycle against sensitivities from a coarse and a
    // fine solver pass brackets the sub-nm removal depth.
    for (sens, lo, hi) in [(2.17, 1.1, 1.3), (2.9, 0.85, 0.95), (4.33, 0.55, 0.65)] {
        let d = estimate_removal_depth(
            Uncertain::new(2.6, 0.1).unwrap(),
            Uncertain::new(sens, 0.0).unwrap(),
        )
        .unwrap();
        assert!(d.value > lo && d.value < hi, "sens {sens} -> {}", d.value);
    }
}

#[test]
fn tuning_model_serializes_flat_json() {
    let model = TuningModel {
        shift_per_cycle_ev: Uncertain::new(0.0051, 0.0002).unwrap(),
        removal_per_cycle_nm: Some(Uncertain::new(0.9, 0.3).unwrap()),
        temperature_offset_ev: Some(Uncertain::new(0.0164, 0.0003).unwrap()),
        q_slope_per_cycle: Some(Uncertain::new(-2.6, 0.4).unwrap()),
    };
    let json = serde_json::to_value(&model).unwrap();
    assert!((json["shift_per_cycle_ev"]["value"].as_f64().unwrap() - 0.0051).abs() < 1e-12);
    assert!((json["removal_per_cycle_nm"]["sigma"].as_f64().unwrap() - 0.3).abs() < 1e-12);
    let back: TuningModel = serde_json::from_value(json).unwrap();
    assert_eq!(back.shift_per_cycle_ev, model.shift_per_cycle_ev);
}

use std::collections::BTreeMap;

use cbr_fit::{least_squares_fit, FitModel, FitResult};
use cbr_spectra::CONSTANTS;
use nalgebra::DMatrix;

use crate::{EtchError, EtchSeries};

/// Weighted linear least squares `W^(1/2) (X p - y)` with the constant
/// Jacobian supplied analytically; Gauss-Newton lands on the optimum in
/// one step.
struct LinearModel {
    design: DMatrix<f64>,
    y: Vec<f64>,
    sqrt_w: Vec<f64>,
}

impl FitModel for LinearModel {
    fn param_count(&self) -> usize {
        self.design.ncols()
    }

    fn residual_count(&self) -> usize {
        self.y.len()
    }

    fn residuals(&self, params: &[f64], out: &mut [f64]) {
        for i in 0..self.y.len() {
            let mut model = 0.0;
            for j in 0..self.design.ncols() {
                model += self.design[(i, j)] * params[j];
            }
            out[i] = self.sqrt_w[i] * (model - self.y[i]);
        }
    }

    fn jacobian(&self, _params: &[f64]) -> Option<DMatrix<f64>> {
        let mut jac = self.design.clone();
        for i in 0..jac.nrows() {
            for j in 0..jac.ncols() {
                jac[(i, j)] *= self.sqrt_w[i];
            }
        }
        Some(jac)
    }
}

/// Per-cycle means of one observable pooled across devices: returns
/// (cycle, mean, record count) sorted by cycle.
fn cycle_means(values: &[(u32, f64)]) -> Vec<(u32, f64, usize)> {
    let mut acc: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for &(cycle, v) in values {
        let e = acc.entry(cycle).or_insert((0.0, 0));
        e.0 += v;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(c, (sum, n))| (c, sum / n as f64, n))
        .collect()
}

/// Weighted regression of per-cycle means against cycle index, with one
/// free jump term for each anomalous transition. Parameters are
/// `[intercept, slope, jump_1, ...]`; the weight of a cycle is its
/// record count (the variance of a mean of n equal-variance records
/// scales as 1/n).
fn regress_cycle_means(
    means: &[(u32, f64, usize)],
    jump_cycles: &[u32],
) -> Result<(f64, FitResult), EtchError> {
    let n = means.len();
    let k = 2 + jump_cycles.len();
    if n < 3.max(k) {
        return Err(EtchError::TooFewPoints { n, min: 3.max(k) });
    }
    let mut design = DMatrix::zeros(n, k);
    let mut y = Vec::with_capacity(n);
    let mut sqrt_w = Vec::with_capacity(n);
    for (i, &(cycle, mean, count)) in means.iter().enumerate() {
        design[(i, 0)] = 1.0;
        design[(i, 1)] = cycle as f64;
        for (j, &jump) in jump_cycles.iter().enumerate() {
            design[(i, 2 + j)] = if cycle >= jump { 1.0 } else { 0.0 };
        }
        y.push(mean);
        sqrt_w.push((count as f64).sqrt());
    }
    let model = LinearModel { design, y, sqrt_w };
    let result = least_squares_fit(&model, &vec![0.0; k])?;
    Ok((result.params[1], result))
}

/// Fits the mode-energy shift per etch cycle, in eV/cycle with blue
/// shift positive. Records are pooled into per-cycle means across
/// devices. Cycles named in `exclude_cycles` are not removed: the
/// transition into each one gets a free jump term, so an anomalously
/// large single-cycle shift (a first cycle etching through a thicker
/// native oxide, say) stops leaking into the slope while later cycles
/// still contribute.
///
/// Uses the room-temperature energy of each record, falling back to the
/// low-temperature one for series measured only in the cryostat; mixing
/// both channels in one fit is an error because the temperature offset
/// would contaminate the slope. The returned [`FitResult`] holds
/// `[intercept, slope, jumps...]`, so the slope uncertainty is
/// `result.uncertainties()[1]`.
pub fn fit_shift_per_cycle(
    series: &EtchSeries,
    exclude_cycles: &[u32],
) -> Result<(f64, FitResult), EtchError> {
    let mut values = Vec::new();
    let mut used_rt = false;
    let mut used_lt = false;
    for r in series.records() {
        match (r.e_c_rt_ev, r.e_c_lt_ev) {
            (Some(e), _) => {
                used_rt = true;
                values.push((r.cycle, e));
            }
            (None, Some(e)) => {
                used_lt = true;
                values.push((r.cycle, e));
            }
            (None, None) => unreachable!("validated at construction"),
        }
    }
    if used_rt && used_lt {
        return Err(EtchError::MixedEnergyChannels);
    }
    let means = cycle_means(&values);
    let jumps = interior_jumps(&means, exclude_cycles);
    regress_cycle_means(&means, &jumps)
}

/// Fits the Q trend against cycle index (expected negative: etching
/// roughens the trench walls). Pools per-cycle means like
/// [`fit_shift_per_cycle`]; needs Q on at least three distinct cycles.
pub fn fit_q_trend(series: &EtchSeries) -> Result<(f64, FitResult), EtchError> {
    let values: Vec<(u32, f64)> = series
        .records()
        .iter()
        .filter_map(|r| r.q.map(|q| (r.cycle, q)))
        .collect();
    let means = cycle_means(&values);
    if means.len() < 3 {
        return Err(EtchError::TooFewCycles { n: means.len(), min: 3 });
    }
    regress_cycle_means(&means, &[])
}

/// Keeps only excluded cycles that actually split the observed range;
/// a jump at or before the first cycle (or past the last) is a constant
/// or zero column and would make the design singular.
fn interior_jumps(means: &[(u32, f64, usize)], exclude_cycles: &[u32]) -> Vec<u32> {
    let lo = means.first().map(|m| m.0).unwrap_or(0);
    let hi = means.last().map(|m| m.0).unwrap_or(0);
    let mut jumps: Vec<u32> = exclude_cycles
        .iter()
        .copied()
        .filter(|&c| c > lo && c <= hi)
        .collect();
    jumps.sort_unstable();
    jumps.dedup();
    jumps
}

/// Total shift between the first and last observed cycle divided by the
/// number of cycles spanned — the headline "average shift per cycle"
/// number, which folds any anomalous cycles straight in.
pub fn endpoint_mean_slope(series: &EtchSeries) -> Result<f64, EtchError> {
    let mut values = Vec::new();
    for r in series.records() {
        if let Some(e) = r.e_c_rt_ev.or(r.e_c_lt_ev) {
            values.push((r.cycle, e));
        }
    }
    let means = cycle_means(&values);
    let (first, last) = match (means.first(), means.last()) {
        (Some(a), Some(b)) if a.0 != b.0 => (a, b),
        _ => return Err(EtchError::TooFewCycles { n: means.len(), min: 2 }),
    };
    Ok((last.1 - first.1) / (last.0 - first.0) as f64)
}

/// Converts an energy slope (eV/cycle) to a wavelength slope (nm/cycle)
/// at the working mode energy: |d lambda / d E| = hc / E^2.
pub fn slope_ev_to_nm(slope_ev_per_cycle: f64, e_c_ev: f64) -> Result<f64, EtchError> {
    if !(e_c_ev.is_finite() && e_c_ev > 0.0) {
        return Err(EtchError::NonPositiveValue { name: "E_c", value: e_c_ev });
    }
    Ok(CONSTANTS.hc_ev_nm / (e_c_ev * e_c_ev) * slope_ev_per_cycle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DesignLabel, EtchRecord, RecordFlag};

    fn series_from(points: &[(u32, f64)]) -> EtchSeries {
        let records = points
            .iter()
            .map(|&(cycle, e)| EtchRecord {
                device_id: "dev".into(),
                design: DesignLabel::D1,
                cycle,
                e_c_rt_ev: Some(e),
                e_c_lt_ev: None,
                q: None,
                flag: RecordFlag::Ok,
            })
            .collect();
        EtchSeries::new(records).unwrap()
    }

    #[test]
    fn constant_series_has_zero_slope() {
        let s = series_from(&[(0, 1.55), (1, 1.55), (2, 1.55), (3, 1.55)]);
        let (slope, fit) = fit_shift_per_cycle(&s, &[]).unwrap();
        assert!(slope.abs() < 1e-12);
        assert!(fit.converged);
    }

    #[test]
    fn slope_is_invariant_under_energy_offset() {
        let pts: Vec<(u32, f64)> =
            (0..6).map(|c| (c, 1.5 + 0.0051 * c as f64 + 0.0003 * (c as f64).sin())).collect();
        let shifted: Vec<(u32, f64)> = pts.iter().map(|&(c, e)| (c, e + 0.25)).collect();
        let (a, _) = fit_shift_per_cycle(&series_from(&pts), &[]).unwrap();
        let (b, _) = fit_shift_per_cycle(&series_from(&shifted), &[]).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn double_first_shift_is_absorbed_by_exclusion() {
        // 10.2 meV into cycle 1, then 5.1 meV per cycle: 30.6 meV total.
        let mut e = 1.5;
        let mut pts = vec![(0, e)];
        for c in 1..=5u32 {
            e += if c == 1 { 0.0102 } else { 0.0051 };
            pts.push((c, e));
        }
        let s = series_from(&pts);
        // Raw endpoint average folds the double shift in: 30.6 / 5.
        let raw = endpoint_mean_slope(&s).unwrap();
        assert!((raw - 0.00612).abs() < 1e-12);
        // The jump term soaks up the anomaly exactly on noiseless data.
        let (slope, fit) = fit_shift_per_cycle(&s, &[1]).unwrap();
        assert!((slope - 0.0051).abs() < 1e-9, "slope = {slope}");
        // The fitted jump is the anomalous excess.
        assert!((fit.params[2] - 0.0051).abs() < 1e-9);
    }

    #[test]
    fn out_of_range_exclusions_are_ignored() {
        let pts: Vec<(u32, f64)> = (0..5).map(|c| (c, 1.5 + 0.005 * c as f64)).collect();
        let (slope, _) = fit_shift_per_cycle(&series_from(&pts), &[0, 9]).unwrap();
        assert!((slope - 0.005).abs() < 1e-10);
    }

    #[test]
    fn too_few_points_is_an_error() {
        let s = series_from(&[(0, 1.5), (1, 1.505)]);
        assert!(matches!(
            fit_shift_per_cycle(&s, &[]),
            Err(EtchError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn mixed_channels_are_rejected() {
        let records = vec![
            EtchRecord {
                device_id: "a".into(),
                design: DesignLabel::D1,
                cycle: 0,
                e_c_rt_ev: Some(1.5),
                e_c_lt_ev: None,
                q: None,
                flag: RecordFlag::Ok,
            },
            EtchRecord {
                device_id: "a".into(),
                design: DesignLabel::D1,
                cycle: 1,
                e_c_rt_ev: None,
                e_c_lt_ev: Some(1.52),
                q: None,
                flag: RecordFlag::Ok,
            },
            EtchRecord {
                device_id: "a".into(),
                design: DesignLabel::D1,
                cycle: 2,
                e_c_rt_ev: Some(1.51),
                e_c_lt_ev: None,
                q: None,
                flag: RecordFlag::Ok,
            },
        ];
        let s = EtchSeries::new(records).unwrap();
        assert!(matches!(
            fit_shift_per_cycle(&s, &[]),
            Err(EtchError::MixedEnergyChannels)
        ));
    }

    #[test]
    fn q_trend_needs_three_cycles() {
        let records: Vec<EtchRecord> = (0..2)
            .map(|c| EtchRecord {
                device_id: "a".into(),
                design: DesignLabel::D1,
                cycle: c,
                e_c_rt_ev: Some(1.5),
                e_c_lt_ev: None,
                q: Some(200.0),
                flag: RecordFlag::Ok,
            })
            .collect();
        let s = EtchSeries::new(records).unwrap();
        assert!(matches!(fit_q_trend(&s), Err(EtchError::TooFewCycles { .. })));
    }

    #[test]
    fn constant_q_has_zero_slope() {
        let records: Vec<EtchRecord> = (0..4)
            .map(|c| EtchRecord {
                device_id: "a".into(),
                design: DesignLabel::D1,
                cycle: c,
                e_c_rt_ev: Some(1.5),
                e_c_lt_ev: None,
                q: Some(150.0),
                flag: RecordFlag::Ok,
            })
            .collect();
        let s = EtchSeries::new(records).unwrap();
        let (slope, _) = fit_q_trend(&s).unwrap();
        assert!(slope.abs() < 1e-10);
    }

    #[test]
    fn ev_to_nm_slope_conversion() {
        // 5.1 meV/cycle at 1.55 eV is about 2.6 nm/cycle.
        let nm = slope_ev_to_nm(0.0051, 1.55).unwrap();
        assert!((nm - 2.63).abs() < 0.02, "nm = {nm}");
        // 16.4 meV maps to about 8.4 nm.
        let nm = slope_ev_to_nm(0.0164, 1.55).unwrap();
        assert!((nm - 8.46).abs() < 0.05, "nm = {nm}");
        assert!(slope_ev_to_nm(0.005, 0.0).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::{EtchError, EtchSeries, RecordFlag};

/// A value with a 1-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uncertain {
    pub value: f64,
    pub sigma: f64,
}

impl Uncertain {
    pub fn new(value: f64, sigma: f64) -> Result<Self, EtchError> {
        if !value.is_finite() {
            return Err(EtchError::NonFinite { what: "value" });
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(EtchError::NonFinite { what: "sigma" });
        }
        Ok(Self { value, sigma })
    }

    pub fn exact(value: f64) -> Self {
        Self { value, sigma: 0.0 }
    }
}

/// Material removed from each exposed surface per etch cycle, inferred
/// by dividing the measured wavelength shift per cycle by the solver's
/// shift-per-nm-removed sensitivity. Homogeneous of degree 1 in the
/// measured slope and degree -1 in the sensitivity; relative
/// uncertainties add in quadrature.
pub fn estimate_removal_depth(
    measured_nm_per_cycle: Uncertain,
    sensitivity_nm_per_nm: Uncertain,
) -> Result<Uncertain, EtchError> {
    if !(sensitivity_nm_per_nm.value > 0.0) {
        return Err(EtchError::NonPositiveValue {
            name: "sensitivity",
            value: sensitivity_nm_per_nm.value,
        });
    }
    let depth = measured_nm_per_cycle.value / sensitivity_nm_per_nm.value;
    let rel_m = if measured_nm_per_cycle.value != 0.0 {
        measured_nm_per_cycle.sigma / measured_nm_per_cycle.value
    } else {
        0.0
    };
    let rel_s = sensitivity_nm_per_nm.sigma / sensitivity_nm_per_nm.value;
    let sigma = if measured_nm_per_cycle.value != 0.0 {
        (depth * (rel_m * rel_m + rel_s * rel_s).sqrt()).abs()
    } else {
        // A zero measured slope propagates only its own absolute error.
        measured_nm_per_cycle.sigma / sensitivity_nm_per_nm.value
    };
    Uncertain::new(depth, sigma)
}

/// Mean cryostat blue shift E_c(LT) - E_c(RT) over records carrying both
/// energies, skipping records flagged `PoorVacuum` (gas condensing on a
/// cold sample red-shifts the apparent offset). The uncertainty is the
/// standard error of the mean, `None` when only a single pair exists.
pub fn temperature_offset(series: &EtchSeries) -> Result<(f64, Option<f64>), EtchError> {
    let diffs: Vec<f64> = series
        .records()
        .iter()
        .filter(|r| r.flag == RecordFlag::Ok)
        .filter_map(|r| match (r.e_c_rt_ev, r.e_c_lt_ev) {
            (Some(rt), Some(lt)) => Some(lt - rt),
            _ => None,
        })
        .collect();
    if diffs.is_empty() {
        return Err(EtchError::NoPairedRecords);
    }
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    if diffs.len() == 1 {
        return Ok((mean, None));
    }
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, Some((var / n).sqrt())))
}

/// Planned number of etch cycles and the detuning predicted to remain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CyclePlan {
    pub cycles: u32,
    /// Predicted E_target - E_c after the planned cycles, eV.
    pub residual_ev: f64,
}

/// Rounds the required blue shift to a whole number of etch cycles.
/// Detunings inside half a cycle of zero plan zero cycles; a target more
/// than half a cycle red of the current mode cannot be reached by
/// blue-shifting and is a planning error.
pub fn predict_cycles_to_target(
    e_c_now_ev: f64,
    e_target_ev: f64,
    slope_ev_per_cycle: f64,
) -> Result<CyclePlan, EtchError> {
    if !(slope_ev_per_cycle.is_finite() && slope_ev_per_cycle > 0.0) {
        return Err(EtchError::NonPositiveValue {
            name: "slope",
            value: slope_ev_per_cycle,
        });
    }
    for (name, v) in [("E_c", e_c_now_ev), ("E_target", e_target_ev)] {
        if !v.is_finite() {
            return Err(EtchError::NonFinite { what: name });
        }
    }
    let detuning = e_target_ev - e_c_now_ev;
    if detuning <= -0.5 * slope_ev_per_cycle {
        return Err(EtchError::TargetRedshifted {
            detuning_ev: detuning,
            slope_ev: slope_ev_per_cycle,
        });
    }
    let cycles = (detuning / slope_ev_per_cycle).round().max(0.0) as u32;
    let residual_ev = detuning - cycles as f64 * slope_ev_per_cycle;
    Ok(CyclePlan { cycles, residual_ev })
}

/// The fitted tuning numbers in one report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TuningModel {
    /// Mode blue shift per etch cycle, eV (positive = blue).
    pub shift_per_cycle_ev: Uncertain,
    /// Material removed from each surface per cycle, nm.
    pub removal_per_cycle_nm: Option<Uncertain>,
    /// Mean cryostat shift E_c(LT) - E_c(RT), eV.
    pub temperature_offset_ev: Option<Uncertain>,
    /// Q change per cycle.
    pub q_slope_per_cycle: Option<Uncertain>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{DesignLabel, EtchRecord};

    #[test]
    fn removal_depth_reproduces_paper_scale() {
        // 2.6 nm/cycle against a 2.9 nm-per-nm sensitivity: 0.90 nm.
        let d = estimate_removal_depth(
            Uncertain::exact(2.6),
            Uncertain::exact(2.9),
        )
        .unwrap();
        assert!((d.value - 0.897).abs() < 1e-3, "depth = {}", d.value);
    }

    #[test]
    fn removal_depth_is_homogeneous() {
        let base = estimate_removal_depth(Uncertain::exact(2.6), Uncertain::exact(2.9)).unwrap();
        let doubled =
            estimate_removal_depth(Uncertain::exact(5.2), Uncertain::exact(2.9)).unwrap();
        assert!((doubled.value - 2.0 * base.value).abs() < 1e-12);
        let coarser =
            estimate_removal_depth(Uncertain::exact(2.6), Uncertain::exact(2.9 * 1.2)).unwrap();
        assert!((coarser.value - base.value / 1.2).abs() < 1e-12);
    }

    #[test]
    fn removal_depth_propagates_in_quadrature() {
        let d = estimate_removal_depth(
            Uncertain::new(2.6, 0.1).unwrap(),
            Uncertain::new(2.9, 0.9).unwrap(),
        )
        .unwrap();
        let expect = (2.6 / 2.9)
            * ((0.1f64 / 2.6).powi(2) + (0.9f64 / 2.9).powi(2)).sqrt();
        assert!((d.sigma - expect).abs() < 1e-12);
        // Zero measured slope gives zero depth.
        let z = estimate_removal_depth(Uncertain::exact(0.0), Uncertain::exact(2.9)).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(matches!(
            estimate_removal_depth(Uncertain::exact(2.6), Uncertain::exact(0.0)),
            Err(EtchError::NonPositiveValue { .. })
        ));
    }

    fn paired_record(cycle: u32, rt: f64, lt: f64, flag: RecordFlag) -> EtchRecord {
        EtchRecord {
            device_id: format!("dev{cycle}"),
            design: DesignLabel::D3,
            cycle,
            e_c_rt_ev: Some(rt),
            e_c_lt_ev: Some(lt),
            q: None,
            flag,
        }
    }

    #[test]
    fn temperature_offset_means_pairs() {
        let s = EtchSeries::new(vec![
            paired_record(0, 1.530, 1.5464, RecordFlag::Ok),
            paired_record(1, 1.535, 1.5514, RecordFlag::Ok),
            paired_record(2, 1.540, 1.5564, RecordFlag::Ok),
        ])
        .unwrap();
        let (offset, err) = temperature_offset(&s).unwrap();
        assert!((offset - 0.0164).abs() < 1e-12);
        assert!(err.unwrap() < 1e-12); // identical differences
    }

    #[test]
    fn temperature_offset_single_pair_has_no_uncertainty() {
        let s = EtchSeries::new(vec![paired_record(0, 1.53, 1.5465, RecordFlag::Ok)]).unwrap();
        let (offset, err) = temperature_offset(&s).unwrap();
        assert!((offset - 0.0165).abs() < 1e-12);
        assert!(err.is_none());
    }

    #[test]
    fn poor_vacuum_records_are_skipped() {
        let s = EtchSeries::new(vec![
            paired_record(0, 1.530, 1.5464, RecordFlag::Ok),
            paired_record(1, 1.535, 1.5514, RecordFlag::Ok),
            // Condensation shrinks the apparent shift; must not bias the mean.
            paired_record(2, 1.540, 1.5470, RecordFlag::PoorVacuum),
        ])
        .unwrap();
        let (offset, _) = temperature_offset(&s).unwrap();
        assert!((offset - 0.0164).abs() < 1e-12);
        // All records flagged: nothing left to average.
        let bad = EtchSeries::new(vec![paired_record(0, 1.53, 1.54, RecordFlag::PoorVacuum)])
            .unwrap();
        assert!(matches!(temperature_offset(&bad), Err(EtchError::NoPairedRecords)));
    }

    #[test]
    fn cycle_planning_rounds_and_clamps() {
        let plan = predict_cycles_to_target(1.5, 1.5, 0.0051).unwrap();
        assert_eq!(plan.cycles, 0);
        assert_eq!(plan.residual_ev, 0.0);

        // 15.3 meV at 5.1 meV/cycle: three cycles, no residual.
        let plan = predict_cycles_to_target(1.5000, 1.5153, 0.0051).unwrap();
        assert_eq!(plan.cycles, 3);
        assert!(plan.residual_ev.abs() < 1e-12);

        // 13 meV: still three cycles, overshooting by 2.3 meV.
        let plan = predict_cycles_to_target(1.5000, 1.5130, 0.0051).unwrap();
        assert_eq!(plan.cycles, 3);
        assert!((plan.residual_ev + 0.0023).abs() < 1e-12);
    }

    #[test]
    fn small_detunings_plan_zero_cycles() {
        let slope = 0.0051;
        for k in -24..25 {
            let detuning = k as f64 * slope / 50.0; // within +-0.48 cycles
            let plan = predict_cycles_to_target(1.5, 1.5 + detuning, slope).unwrap();
            assert_eq!(plan.cycles, 0, "detuning {detuning}");
        }
    }

    #[test]
    fn red_target_is_a_planning_error() {
        assert!(matches!(
            predict_cycles_to_target(1.52, 1.50, 0.0051),
            Err(EtchError::TargetRedshifted { .. })
        ));
        assert!(matches!(
            predict_cycles_to_target(1.5, 1.51, 0.0),
            Err(EtchError::NonPositiveValue { .. })
        ));
    }
}

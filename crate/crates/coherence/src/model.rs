use cbr_fit::{least_squares_fit, CurveModel, FitResult};
use cbr_lineshapes::voigt_fwhm;
use cbr_spectra::CONSTANTS;
use serde::{Deserialize, Serialize};

use crate::CoherenceError;

/// Visibility envelope of a Voigt line: the field correlation factorizes
/// into a Gaussian term with time constant `t_g_ps` and an exponential
/// term with time constant `t_l_ps`. Both tend to 1 as the constants go
/// to infinity, so either broadening mechanism can be switched off by
/// passing `f64::INFINITY`.
pub fn visibility_model(t_ps: f64, t_g_ps: f64, t_l_ps: f64) -> f64 {
    let gauss = (-t_ps * t_ps / (2.0 * t_g_ps * t_g_ps)).exp();
    let lorentz = (-t_ps.abs() / t_l_ps).exp();
    gauss * lorentz
}

/// Fringe visibility versus interferometer delay.
#[derive(Debug, Clone)]
pub struct VisibilityTrace {
    delays_ps: Vec<f64>,
    visibilities: Vec<f64>,
    uncertainties: Vec<f64>,
}

const MIN_TRACE_POINTS: usize = 6;

impl VisibilityTrace {
    pub fn new(
        delays_ps: Vec<f64>,
        visibilities: Vec<f64>,
        uncertainties: Vec<f64>,
    ) -> Result<Self, CoherenceError> {
        let n = delays_ps.len();
        if n < MIN_TRACE_POINTS || visibilities.len() != n || uncertainties.len() != n {
            return Err(CoherenceError::TooFewPoints {
                n: n.min(visibilities.len()).min(uncertainties.len()),
                min: MIN_TRACE_POINTS,
            });
        }
        for (i, &t) in delays_ps.iter().enumerate() {
            if !t.is_finite() {
                return Err(CoherenceError::NonFinite { what: "delay", index: i });
            }
        }
        for (i, &v) in visibilities.iter().enumerate() {
            if !v.is_finite() {
                return Err(CoherenceError::NonFinite { what: "visibility", index: i });
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(CoherenceError::VisibilityOutOfRange { index: i, value: v });
            }
        }
        for (i, &e) in uncertainties.iter().enumerate() {
            if !(e.is_finite() && e >= 0.0) {
                return Err(CoherenceError::NonFinite { what: "uncertainty", index: i });
            }
        }
        Ok(Self { delays_ps, visibilities, uncertainties })
    }

    pub fn delays_ps(&self) -> &[f64] {
        &self.delays_ps
    }

    pub fn visibilities(&self) -> &[f64] {
        &self.visibilities
    }

    pub fn uncertainties(&self) -> &[f64] {
        &self.uncertainties
    }
}

/// Coherence times and the spectral widths they imply.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherenceResult {
    /// Gaussian coherence time, ps.
    #[serde(rename = "t_G_ps")]
    pub t_g_ps: f64,
    /// Lorentzian coherence time, ps.
    #[serde(rename = "t_L_ps")]
    pub t_l_ps: f64,
    /// Gaussian width parameter sigma = hbar / t_G, eV.
    #[serde(rename = "sigma_eV")]
    pub sigma_ev: f64,
    /// Lorentzian half-width gamma = hbar / t_L, eV.
    #[serde(rename = "gamma_eV")]
    pub gamma_ev: f64,
    /// Voigt full width at half maximum, eV.
    #[serde(rename = "f_V_eV")]
    pub f_v_ev: f64,
    /// Linewidth over the transform limit hbar / tau; set once a
    /// lifetime is supplied through `with_lifetime`.
    pub fourier_ratio: Option<f64>,
}

impl CoherenceResult {
    /// Builds the result from the two coherence times, converting to
    /// spectral widths with sigma = hbar / t_G and gamma = hbar / t_L.
    pub fn from_times(t_g_ps: f64, t_l_ps: f64) -> Result<Self, CoherenceError> {
        if !(t_g_ps.is_finite() && t_g_ps > 0.0) {
            return Err(CoherenceError::NonPositiveValue { name: "t_G", value: t_g_ps });
        }
        if !(t_l_ps.is_finite() && t_l_ps > 0.0) {
            return Err(CoherenceError::NonPositiveValue { name: "t_L", value: t_l_ps });
        }
        let hbar = CONSTANTS.hbar_ev_ps();
        let sigma_ev = hbar / t_g_ps;
        let gamma_ev = hbar / t_l_ps;
        let f_g = 2.0 * sigma_ev * (2.0 * (2.0f64).ln()).sqrt();
        let f_l = 2.0 * gamma_ev;
        Ok(Self {
            t_g_ps,
            t_l_ps,
            sigma_ev,
            gamma_ev,
            f_v_ev: voigt_fwhm(f_g, f_l).expect("finite positive widths"),
            fourier_ratio: None,
        })
    }

    /// Gaussian FWHM 2 sigma sqrt(2 ln 2), eV.
    pub fn fwhm_gaussian_ev(&self) -> f64 {
        2.0 * self.sigma_ev * (2.0 * (2.0f64).ln()).sqrt()
    }

    /// Lorentzian FWHM 2 gamma, eV.
    pub fn fwhm_lorentzian_ev(&self) -> f64 {
        2.0 * self.gamma_ev
    }

    /// Returns a copy carrying f_V / (hbar / tau) for the given emitter
    /// lifetime.
    pub fn with_lifetime(mut self, tau_ps: f64) -> Result<Self, CoherenceError> {
        self.fourier_ratio = Some(fourier_limit_ratio(self.f_v_ev, tau_ps)?);
        Ok(self)
    }
}

/// Ratio of a measured linewidth to the transform limit hbar / tau set by
/// the emitter lifetime.
pub fn fourier_limit_ratio(f_v_ev: f64, tau_ps: f64) -> Result<f64, CoherenceError> {
    if !(f_v_ev.is_finite() && f_v_ev > 0.0) {
        return Err(CoherenceError::NonPositiveValue { name: "f_V", value: f_v_ev });
    }
    if !(tau_ps.is_finite() && tau_ps > 0.0) {
        return Err(CoherenceError::NonPositiveValue { name: "tau", value: tau_ps });
    }
    Ok(f_v_ev * tau_ps / CONSTANTS.hbar_ev_ps())
}

/// Fits the Gaussian-times-exponential envelope to a visibility trace and
/// converts the time constants to spectral widths. The underlying least
/// squares runs on the decay rates (1/t_G, 1/t_L), so the raw
/// [`FitResult`] params and uncertainties are in 1/ps.
pub fn fit_coherence(
    trace: &VisibilityTrace,
) -> Result<(CoherenceResult, FitResult), CoherenceError> {
    let t = trace.delays_ps();
    let v = trace.visibilities();
    let max_v = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min_v = v.iter().cloned().fold(f64::INFINITY, f64::min);
    if max_v < 0.3 {
        return Err(CoherenceError::DegenerateTrace(
            "visibility never rises above 0.3; no coherent signal to fit",
        ));
    }
    if min_v >= 0.3 {
        return Err(CoherenceError::DegenerateTrace(
            "visibility never falls below 0.3; the trace does not sample the decay",
        ));
    }

    // Initial scale: the delay where the visibility first crosses 1/e,
    // which is within a factor ~1.4 of either time constant for any mix.
    let inv_e = (-1.0f64).exp();
    let mut t_scale = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max).abs();
    let mut order: Vec<usize> = (0..t.len()).collect();
    order.sort_by(|&a, &b| t[a].abs().total_cmp(&t[b].abs()));
    for &i in &order {
        if v[i] < inv_e {
            t_scale = t[i].abs().max(1e-3);
            break;
        }
    }

    // The fit runs on decay rates u_G = 1/t_G, u_L = 1/t_L: the envelope
    // exponent is linear in the rates, so the normal matrix stays well
    // conditioned, and a vanishing broadening channel is the finite
    // bound u = 1e-16 instead of a time constant running to infinity.
    // The returned FitResult therefore reports the two rates in 1/ps.
    let all_positive = trace.uncertainties().iter().all(|&e| e > 0.0);
    let weights: Vec<f64> = trace.uncertainties().iter().map(|&e| 1.0 / e).collect();
    let mut model = CurveModel::new(
        |t: f64, p: &[f64]| {
            let g = (-0.5 * (t * p[0]) * (t * p[0])).exp();
            let l = (-t.abs() * p[1]).exp();
            g * l
        },
        2,
        t,
        v,
    )
    .with_bounds(vec![(1e-16, 1e3), (1e-16, 1e3)]);
    if all_positive {
        model = model.with_weights(&weights);
    }
    let init = [1.0 / t_scale, 0.5 / t_scale];
    let result = least_squares_fit(&model, &init)?;
    if !result.converged {
        return Err(CoherenceError::NotConverged {
            iterations: result.iterations,
            cost: result.cost_trace.last().copied().unwrap_or(f64::NAN),
        });
    }
    let coherence =
        CoherenceResult::from_times(1.0 / result.params[0], 1.0 / result.params[1])?;
    Ok((coherence, result))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_is_normalized_and_decreasing() {
        assert_eq!(visibility_model(0.0, 80.0, 150.0), 1.0);
        let mut prev = 1.0;
        for i in 1..40 {
            let t = i as f64 * 10.0;
            let v = visibility_model(t, 80.0, 150.0);
            assert!(v < prev, "not strictly decreasing at t = {t}");
            assert!((v - visibility_model(-t, 80.0, 150.0)).abs() < 1e-16);
            prev = v;
        }
    }

    #[test]
    fn model_factorizes_exactly() {
        for &t in &[0.0, 13.0, 55.5, 212.0] {
            let product = visibility_model(t, 80.0, f64::INFINITY)
                * visibility_model(t, f64::INFINITY, 150.0);
            assert_eq!(product, visibility_model(t, 80.0, 150.0));
        }
    }

    #[test]
    fn pure_limits_match_closed_forms() {
        // Pure Lorentzian line: nu(t_L) = 1/e.
        let v = visibility_model(150.0, f64::INFINITY, 150.0);
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        // Pure Gaussian line: nu(t_G) = exp(-1/2).
        let v = visibility_model(80.0, 80.0, f64::INFINITY);
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn times_and_widths_round_trip() {
        let hbar = CONSTANTS.hbar_ev_ps();
        for &(tg, tl) in &[(53.0, 212.0), (1.0, 1.0), (3200.0, 0.7)] {
            let r = CoherenceResult::from_times(tg, tl).unwrap();
            let tg_back = hbar / r.sigma_ev;
            let tl_back = hbar / r.gamma_ev;
            assert!((tg_back - tg).abs() / tg < 1e-12);
            assert!((tl_back - tl).abs() / tl < 1e-12);
        }
    }

    #[test]
    fn natural_linewidth_at_53_ps() {
        // hbar / 53 ps = 12.42 ueV.
        let limit = CONSTANTS.hbar_ev_ps() / 53.0;
        assert!((limit - 12.42e-6).abs() < 0.005e-6, "limit = {limit}");
        let ratio = fourier_limit_ratio(limit, 53.0).unwrap();
        assert!((ratio - 1.0).abs() < 1e-12);
        // 27.3 ueV against the same limit is 2.2x.
        let ratio = fourier_limit_ratio(27.3e-6, 53.0).unwrap();
        assert!((ratio - 2.20).abs() < 0.005, "ratio = {ratio}");
    }

    #[test]
    fn rejects_nonpositive_ratio_inputs() {
        assert!(fourier_limit_ratio(0.0, 53.0).is_err());
        assert!(fourier_limit_ratio(1e-5, -2.0).is_err());
        assert!(CoherenceResult::from_times(-1.0, 10.0).is_err());
    }
}

use crate::DecayError;

/// A value with a one-sigma uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub value: f64,
    pub sigma: f64,
}

impl Measurement {
    pub fn new(value: f64, sigma: f64) -> Result<Self, DecayError> {
        if !value.is_finite() {
            return Err(DecayError::NonFinite { what: "measurement value", index: 0 });
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(DecayError::InvalidUncertainty { name: "sigma", value: sigma });
        }
        Ok(Self { value, sigma })
    }

    /// A value with no quoted uncertainty.
    pub fn exact(value: f64) -> Result<Self, DecayError> {
        Self::new(value, 0.0)
    }
}

/// Emission-rate enhancement `F_P = tau_ref / tau_cav` with relative
/// uncertainties combined in quadrature:
/// `sigma_F = F sqrt((s_ref/t_ref)^2 + (s_cav/t_cav)^2)`.
pub fn purcell_factor(
    tau_ref: Measurement,
    tau_cav: Measurement,
) -> Result<Measurement, DecayError> {
    if tau_ref.value <= 0.0 {
        return Err(DecayError::NonPositiveValue { name: "tau_ref", value: tau_ref.value });
    }
    if tau_cav.value <= 0.0 {
        return Err(DecayError::NonPositiveValue { name: "tau_cav", value: tau_cav.value });
    }
    let f = tau_ref.value / tau_cav.value;
    let rel = ((tau_ref.sigma / tau_ref.value).powi(2)
        + (tau_cav.sigma / tau_cav.value).powi(2))
    .sqrt();
    Measurement::new(f, f * rel)
}

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{faddeeva_w, LineshapeError};

/// Width parameters of a Voigt profile: Gaussian standard deviation `sigma`
/// and Lorentzian half width `gamma`, both in the energy unit of the axis
/// the profile is evaluated on. At most one of the two may be zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VoigtParams {
    sigma: f64,
    gamma: f64,
}

impl VoigtParams {
    pub fn new(sigma: f64, gamma: f64) -> Result<Self, LineshapeError> {
        let ok = sigma.is_finite() && gamma.is_finite() && sigma >= 0.0 && gamma >= 0.0
            && (sigma > 0.0 || gamma > 0.0);
        if !ok {
            return Err(LineshapeError::InvalidVoigtWidths { sigma, gamma });
        }
        Ok(Self { sigma, gamma })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Gaussian FWHM, `f_G = 2 sigma sqrt(2 ln 2)`.
    pub fn fwhm_gaussian(&self) -> f64 {
        2.0 * self.sigma * (2.0 * 2.0_f64.ln()).sqrt()
    }

    /// Lorentzian FWHM, `f_L = 2 gamma`.
    pub fn fwhm_lorentzian(&self) -> f64 {
        2.0 * self.gamma
    }
}

/// Unit-area Voigt profile at `x = e - center`.
///
/// `V(x) = Re w((x + i gamma) / (sigma sqrt 2)) / (sigma sqrt(2 pi))`, with
/// the pure-Gaussian and pure-Lorentzian limits taken in closed form when a
/// width is exactly zero.
pub fn voigt_value(e: f64, center: f64, params: VoigtParams) -> f64 {
    let x = e - center;
    let (sigma, gamma) = (params.sigma, params.gamma);
    if sigma == 0.0 {
        return gamma / (PI * (x * x + gamma * gamma));
    }
    if gamma == 0.0 {
        let u = x / sigma;
        return (-0.5 * u * u).exp() / (sigma * (2.0 * PI).sqrt());
    }
    let denom = sigma * std::f64::consts::SQRT_2;
    let z = Complex64::new(x / denom, gamma / denom);
    faddeeva_w(z).re / (sigma * (2.0 * PI).sqrt())
}

/// Voigt FWHM from the component FWHMs:
/// `f_V = 0.5346 f_L + sqrt(0.2166 f_L^2 + f_G^2)` (accurate to about 0.02%).
pub fn voigt_fwhm(f_g: f64, f_l: f64) -> Result<f64, LineshapeError> {
    let ok = f_g.is_finite() && f_l.is_finite() && f_g >= 0.0 && f_l >= 0.0
        && (f_g > 0.0 || f_l > 0.0);
    if !ok {
        return Err(LineshapeError::InvalidFwhm { f_g, f_l });
    }
    Ok(0.5346 * f_l + (0.2166 * f_l * f_l + f_g * f_g).sqrt())
}

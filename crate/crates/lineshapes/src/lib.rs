//! Fano and Voigt lineshapes and the windowed fits built on them.
//!
//! The Fano profile
//! `I(E) = B + A (q + Omega)^2 / (1 + Omega^2)`, `Omega = 2 (E - E_c) / Gamma_c`,
//! describes an interference-asymmetric cavity resonance on a reflective
//! background; `q = 0` reduces it to an inverted Lorentzian dip. The Voigt
//! profile is the Gaussian-Lorentzian convolution, evaluated through a
//! rational approximation of the complex probability function
//! `w(z) = exp(-z^2) erfc(-iz)` rather than by numerical convolution.

mod faddeeva;
mod fano;
mod voigt;

pub use faddeeva::faddeeva_w;
pub use fano::{
    fano_value, fit_fano, quality_factor, FanoFit, FanoParams, FanoReport,
};
pub use voigt::{voigt_fwhm, voigt_value, VoigtParams};

use thiserror::Error;

/// Errors of lineshape construction and fitting.
#[derive(Debug, Error)]
pub enum LineshapeError {
    #[error("linewidth must be positive and finite, got {0} eV")]
    InvalidGamma(f64),
    #[error("non-finite lineshape parameter {name}: {value}")]
    NonFiniteParam { name: &'static str, value: f64 },
    #[error("widths sigma={sigma}, gamma={gamma} invalid: both must be >= 0 and not both zero")]
    InvalidVoigtWidths { sigma: f64, gamma: f64 },
    #[error("FWHM inputs f_g={f_g}, f_l={f_l} invalid: both must be >= 0 and not both zero")]
    InvalidFwhm { f_g: f64, f_l: f64 },
    #[error("fit window [{lo}, {hi}] eV does not overlap the spectrum axis")]
    WindowOutsideAxis { lo: f64, hi: f64 },
    #[error("no interior minimum in the fit window: the spectrum has no dip to fit")]
    NoDip,
    #[error("{n} samples in the fit window; at least {min} required")]
    TooFewSamples { n: usize, min: usize },
    #[error("fit did not converge after {iterations} iterations (cost {cost:.3e})")]
    FitFailed { iterations: usize, cost: f64 },
    #[error(transparent)]
    Spectrum(#[from] cbr_spectra::SpectrumError),
    #[error(transparent)]
    Fit(#[from] cbr_fit::FitError),
}

//! Lifetime extraction from time-correlated single-photon-counting (TCSPC)
//! histograms.
//!
//! A measured arrival-time histogram is the convolution of the emitter's
//! decay law with the instrument response function (IRF), plus a constant
//! background. This crate models single- and bi-exponential decays,
//! convolves them with a measured IRF at histogram resolution, and fits
//! them to Poisson-weighted count data. From fitted lifetimes it derives
//! emission-rate enhancements (Purcell factors) `F_P = tau_ref / tau_cav`
//! with propagated uncertainties, and fits the enhancement-vs-detuning
//! profile of a cavity-coupled emitter with a Lorentzian.
//!
//! Conventions:
//! - All times are picoseconds; all histograms are uniformly binned.
//! - IRF lags are measured from the IRF's peak bin, so the absolute
//!   position of the IRF on its acquisition axis is irrelevant and a
//!   delta-like IRF acts as the identity under convolution.
//! - Fit weights are `1 / sqrt(max(count, 1))` per bin (Poisson).

mod convolve;
mod fit;
mod histogram;
mod io;
mod model;
mod purcell;

pub use convolve::convolve_model_with_irf;
pub use fit::{
    fit_lifetime, fit_purcell_vs_detuning, LifetimeFit, LifetimeReport, PurcellPoint,
    PurcellTrend,
};
pub use histogram::{DecayHistogram, Irf};
pub use io::{load_histogram, parse_histogram, save_histogram};
pub use model::{DecayModel, DecayModelKind};
pub use purcell::{purcell_factor, Measurement};

use thiserror::Error;

/// Errors for TCSPC histogram handling, convolution, and lifetime fitting.
#[derive(Debug, Error)]
pub enum DecayError {
    #[error("histogram needs at least {min} bins, got {n}")]
    TooShort { n: usize, min: usize },
    #[error("bin spacing is not uniform at index {index}")]
    NonUniformBins { index: usize },
    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("negative {what} at index {index}")]
    Negative { what: &'static str, index: usize },
    #[error("IRF has zero total area")]
    ZeroAreaIrf,
    #[error("bin width mismatch: histogram {hist} ps vs IRF {irf} ps")]
    BinWidthMismatch { hist: f64, irf: f64 },
    #[error("lifetime must be positive, got {0} ps")]
    NonPositiveLifetime(f64),
    #[error("amplitude must be non-negative, got {0}")]
    NegativeAmplitude(f64),
    #[error("{name} must be positive, got {value}")]
    NonPositiveValue { name: &'static str, value: f64 },
    #[error("{name} must be finite and non-negative, got {value}")]
    InvalidUncertainty { name: &'static str, value: f64 },
    #[error("histogram peak SNR {snr:.2} is below the required 3.0")]
    LowSnr { snr: f64 },
    #[error("could not initialize fit: {message}")]
    InitFailed { message: String },
    #[error("need at least {min} points, got {n}")]
    TooFewPoints { n: usize, min: usize },
    #[error("fit did not converge after {iterations} iterations (cost {cost:.3e})")]
    NotConverged { iterations: usize, cost: f64 },
    #[error("fitted lifetime {tau_ps} ps stuck at a parameter bound")]
    LifetimeAtBound { tau_ps: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Fit(#[from] cbr_fit::FitError),
}

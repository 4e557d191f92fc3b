//! First-order coherence analysis for a Michelson interferometer.
//!
//! A piezo-scanned retroreflector sweeps the path difference over a couple
//! of fringes while a stage sets the coarse delay t. Each scan yields one
//! fringe visibility nu = (I_max - I_min) / (I_max + I_min); the set of
//! visibilities versus delay is the magnitude of the field correlation
//! g1(t), which for a Voigt emission line factorizes into a Gaussian and
//! an exponential envelope:
//!
//! ```text
//! nu(t) = exp(-t^2 / (2 t_G^2)) * exp(-|t| / t_L)
//! ```
//!
//! The time constants map to spectral widths through sigma = hbar / t_G
//! and gamma = hbar / t_L (the transform convention is fixed so these are
//! identities), and the full linewidth follows from the Voigt FWHM
//! combination formula.
//!
//! Conventions: delays in ps, piezo positions in nm, energies in eV.
//! Fringe period in mirror displacement is lambda / 2 (double pass).

mod fringe;
mod io;
mod model;

pub use fringe::{fringe_visibility, stage_delay_ps, FringeScan};
pub use io::{
    load_fringe_scan, load_visibility_trace, parse_fringe_scan, parse_visibility_trace,
    save_fringe_scan, save_visibility_trace,
};
pub use model::{
    fit_coherence, fourier_limit_ratio, visibility_model, CoherenceResult, VisibilityTrace,
};

use thiserror::Error;

/// Errors from fringe extraction and coherence fitting.
#[derive(Debug, Error)]
pub enum CoherenceError {
    #[error("need at least {min} samples, got {n}")]
    TooFewPoints { n: usize, min: usize },
    #[error("{what} is not finite at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("intensity at index {index} is negative")]
    NegativeIntensity { index: usize },
    #[error("visibility {value} at index {index} is outside [0, 1]")]
    VisibilityOutOfRange { index: usize, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositiveValue { name: &'static str, value: f64 },
    #[error("scan spans {span_nm} nm but one fringe period needs {need_nm} nm")]
    ScanTooShort { span_nm: f64, need_nm: f64 },
    #[error(
        "scan spans {span_nm} nm, beyond the {limit_nm} nm (two fringe periods) \
         over which the visibility can be taken as constant"
    )]
    ScanTooLong { span_nm: f64, limit_nm: f64 },
    #[error(
        "dominant fringe period {found_nm:.1} nm differs from the expected \
         {expected_nm:.1} nm by more than 20%"
    )]
    PeriodMismatch { found_nm: f64, expected_nm: f64 },
    #[error("fitted mean intensity {0} is not positive")]
    NonPositiveBaseline(f64),
    #[error("degenerate visibility trace: {0}")]
    DegenerateTrace(&'static str),
    #[error("fit stopped after {iterations} iterations without converging (cost {cost:.3e})")]
    NotConverged { iterations: usize, cost: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Fit(#[from] cbr_fit::FitError),
}

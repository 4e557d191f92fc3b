//! Second-order autocorrelation analysis of Hanbury Brown–Twiss
//! coincidence histograms from pulsed excitation.
//!
//! Under pulsed excitation the coincidence histogram is a comb of peaks
//! separated by the laser repetition period (12.5 ns at 80 MHz). The
//! normalized zero-delay autocorrelation is estimated by integrating a
//! fixed window around the zero-delay feature and dividing by the mean of
//! the same windows around the two *nearest* side peaks only — more
//! distant peaks are deliberately excluded because emitter blinking on
//! microsecond scales inflates them relative to the Poissonian level.
//! No background is subtracted.
//!
//! Uncertainties are pure Poisson counting errors propagated through the
//! ratio. [`locate_peaks`] measures the residual offset of the peak comb
//! so windows can be centered on the data rather than on nominal
//! positions.

mod g2;
mod histogram;
mod io;
mod peaks;

pub use g2::{g2_zero, g2_zero_at, G2Report, G2Result, DEFAULT_WINDOW_NS};
pub use histogram::CoincidenceHistogram;
pub use io::{load_coincidences, parse_coincidences, save_coincidences};
pub use peaks::{locate_peaks, PeakLocations};

use thiserror::Error;

/// Errors for coincidence-histogram handling and g2(0) evaluation.
#[derive(Debug, Error)]
pub enum CorrelationError {
    #[error("histogram needs at least {min} bins, got {n}")]
    TooShort { n: usize, min: usize },
    #[error("bin spacing is not uniform at index {index}")]
    NonUniformBins { index: usize },
    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("repetition period must be positive, got {0} ns")]
    NonPositiveRepPeriod(f64),
    #[error("window {window} ns must be positive and smaller than the repetition period {rep} ns")]
    BadWindow { window: f64, rep: f64 },
    #[error("histogram spans {span} ns but needs at least +-{need} ns around zero delay")]
    SpanTooShort { span: f64, need: f64 },
    #[error("no bins fall inside the {side} side-peak window")]
    EmptySideWindow { side: &'static str },
    #[error("both side-peak windows contain zero counts")]
    ZeroSideCounts,
    #[error("need at least {min} side peaks in range, found {n}")]
    TooFewPeaks { n: usize, min: usize },
    #[error("expected peak near {nominal_ns} ns is missing")]
    MissingPeak { nominal_ns: f64 },
    #[error(
        "comb residual spread {spread_ns} ns exceeds {limit_ns} ns; repetition period mismatch"
    )]
    PeriodMismatch { spread_ns: f64, limit_ns: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

//! Spectral data types and unit conversions shared across the workspace.
//!
//! Everything downstream (lineshape fits, reflectance normalization, the
//! solver's frequency monitors) works on the [`Spectrum`] type defined here:
//! a strictly ascending sample axis in either wavelength (nm) or photon
//! energy (eV) plus a non-negative intensity array. Conversions between the
//! two axis kinds go through `E = hc / lambda` with the constants collected
//! in [`PhysicalConstants`].

mod constants;
mod io;
mod ops;
mod types;

pub use constants::{PhysicalConstants, CONSTANTS};
pub use io::{load_spectrum, save_spectrum};
pub use ops::{ev_to_nm, nm_to_ev, relative_reflectance, tpe_laser_energy};
pub use types::{AxisKind, PhotonEnergy, Spectrum};

use thiserror::Error;

/// Errors produced by spectrum construction, conversion and file I/O.
#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("photon energy must be positive and finite, got {0} eV")]
    InvalidEnergy(f64),
    #[error("wavelength must be positive and finite, got {0} nm")]
    InvalidWavelength(f64),
    #[error("axis has {axis} samples but intensity has {intensity}")]
    LengthMismatch { axis: usize, intensity: usize },
    #[error("spectrum needs at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("axis is not strictly increasing at index {index}")]
    NonMonotoneAxis { index: usize },
    #[error("non-finite {what} sample at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("negative intensity {value} at index {index}")]
    NegativeIntensity { index: usize, value: f64 },
    #[error("spectra do not overlap on a common axis range")]
    DisjointAxes,
    #[error("reference intensity is zero at index {index} (axis {axis})")]
    ZeroReference { index: usize, axis: f64 },
    #[error("two-photon binding energy must be positive and finite, got {0} meV")]
    InvalidBinding(f64),
    #[error("derived laser energy {0} eV is not positive")]
    NonPositiveResult(f64),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

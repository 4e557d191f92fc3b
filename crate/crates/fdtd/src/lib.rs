//! Two-dimensional finite-difference time-domain model of a circular Bragg
//! cavity on a metal-backed stack, with the observables needed for etch-tuning
//! studies: emission-rate enhancement, collection-cone reflectance, extraction
//! efficiency, and full etch-depth sweeps.
//!
//! Conventions: lengths in nm, time in nm (c = 1), fields in natural units
//! (eps0 = mu0 = 1), photon energies in eV.  The solver evolves the TM set
//! (Ez, Hx, Hy) on a staggered grid; a cross-section through the cavity axis
//! stands in for the full structure, so absolute magnitudes of enhancement and
//! reflectance differ from their three-dimensional counterparts while trends
//! against geometry changes are preserved.  All observables are ratios of two
//! runs, which cancels source normalisation and grid dispersion.
//!
//! * [`geometry`] — layer stack, ring pattern, metal model, etch transform.
//! * [`config`] — resolution, time step, absorber, and frequency settings.
//! * [`grid`] — rasterised permittivity with mirror-symmetric sampling.
//! * [`cpml`] — convolutional perfectly-matched-layer coefficients.
//! * [`source`] — band-limited pulses, point dipoles, Gaussian beams.
//! * [`dft`] — running discrete Fourier transforms on monitor lines.
//! * [`solver`] — the leap-frog update loop with energy-based termination.
//! * [`farfield`] — near-to-far-field transform and collection-cone power.
//! * [`observables`] — enhancement, reflectance, and extraction spectra.
//! * [`sweep`] — etch-depth ladders with resonance tracking.

pub mod config;
pub mod cpml;
pub mod dft;
pub mod farfield;
pub mod geometry;
pub mod grid;
pub mod observables;
pub mod solver;
pub mod source;
pub mod sweep;

use thiserror::Error;

/// Failure modes of simulation setup, execution, and analysis.
#[derive(Debug, Error)]
pub enum FdtdError {
    /// Geometry parameters are inconsistent or an etch consumes a feature.
    #[error("geometry: {message}")]
    Geometry { message: String },

    /// Simulation settings are out of range or mutually incompatible.
    #[error("configuration: {message}")]
    Config { message: String },

    /// Field energy diverged: the run is numerically unstable.
    #[error(
        "instability at step {step}: energy reached {energy_ratio:.2e} of its \
         post-source peak ({suspect})"
    )]
    Stability {
        step: usize,
        energy_ratio: f64,
        suspect: String,
    },

    /// A reference quantity needed for normalisation vanished or is invalid.
    #[error("normalization: {what}")]
    Normalization { what: String },

    /// Far-field transform could not be evaluated.
    #[error("far field: {what}")]
    FarField { what: String },

    /// An etch-sweep member failed; lists the depths that did complete.
    #[error(
        "etch sweep failed at depth {failed_delta} nm ({} depths completed): {source}",
        completed.len()
    )]
    PartialSweep {
        completed: Vec<f64>,
        failed_delta: f64,
        source: Box<FdtdError>,
    },

    /// Resonance fitting on a computed spectrum failed.
    #[error("lineshape fit: {0}")]
    Lineshape(#[from] cbr_lineshapes::LineshapeError),

    /// Output file could not be written.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub use config::{omega_of_ev, PmlConfig, SimulationConfig};
pub use dft::{C64, LineMonitor, LineOrientation, PointProbe, TimeProbe};
pub use farfield::{angular_fraction, cone_power, far_field_from_line, FarField};
pub use geometry::{build_geometry, CbrGeometry, GoldModel, Medium, Structure};
pub use grid::{Boundaries, Boundary, DomainSpec, Grid, StackLayout};
pub use observables::{
    beam_calibration, bulk_reference_flux, compute_extraction_efficiency,
    compute_planar_reflectance, compute_purcell_spectrum, compute_reflectance_spectrum,
    ensemble_purcell_with_reference, purcell_with_reference, reflectance_with_calibration,
    run_dipole, run_dipole_at, BeamCalibration, DipoleRun, SpectrumResult,
};
pub use solver::{RunStats, Simulation};
pub use source::{Pulse, Source};
pub use sweep::{default_deltas, etch_sweep, SweepRow, SweepTable};

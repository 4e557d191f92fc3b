//! Statistical model of cavity-mode tuning across wet-etch cycles.
//!
//! Each etch cycle removes a thin oxidized layer from the exposed
//! surfaces of a circular Bragg resonator, blue-shifting the cavity mode
//! by a few meV. This crate turns a table of per-device, per-cycle mode
//! energies into the numbers a tuning campaign needs: the shift per
//! cycle (with anomalous cycles absorbed by free jump terms rather than
//! dropped), the material removal per cycle implied by a solver
//! sensitivity, the cryostat temperature offset, the Q degradation
//! trend, and the number of cycles to reach a target energy.
//!
//! Conventions: energies in eV, blue shift positive, cycle indices are
//! non-negative integers.

mod io;
mod regression;
mod series;
mod tuning;

pub use io::{load_series, parse_series, save_series};
pub use regression::{
    endpoint_mean_slope, fit_q_trend, fit_shift_per_cycle, slope_ev_to_nm,
};
pub use series::{DesignLabel, EtchRecord, EtchSeries, RecordFlag};
pub use tuning::{
    estimate_removal_depth, predict_cycles_to_target, temperature_offset, CyclePlan,
    TuningModel, Uncertain,
};

use thiserror::Error;

/// Errors from series validation, regression, and planning.
#[derive(Debug, Error)]
pub enum EtchError {
    #[error("need at least {min} data points, got {n}")]
    TooFewPoints { n: usize, min: usize },
    #[error("need at least {min} distinct cycles with data, got {n}")]
    TooFewCycles { n: usize, min: usize },
    #[error("device {device} has more than one record for cycle {cycle}")]
    DuplicateCycle { device: String, cycle: u32 },
    #[error("device {device} cycle {cycle} carries no mode energy")]
    NoEnergy { device: String, cycle: u32 },
    #[error("{what} is not finite")]
    NonFinite { what: &'static str },
    #[error("records mix room- and low-temperature energies; fit one channel at a time")]
    MixedEnergyChannels,
    #[error("no record carries both room- and low-temperature energies")]
    NoPairedRecords,
    #[error("{name} must be positive, got {value}")]
    NonPositiveValue { name: &'static str, value: f64 },
    #[error(
        "target sits {detuning_ev:.4} eV red of the current mode but etching \
         blue-shifts by {slope_ev:.4} eV per cycle"
    )]
    TargetRedshifted { detuning_ev: f64, slope_ev: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Fit(#[from] cbr_fit::FitError),
}

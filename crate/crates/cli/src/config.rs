//! Optional JSON defaults file (`--config`).
//!
//! The file supplies defaults that sit between the built-in ones and explicit
//! command-line flags: flags win over the file, the file wins over the
//! built-ins.  Unknown keys are rejected so typos fail loudly instead of
//! silently running with defaults.

use std::path::Path;

use serde::Deserialize;

use cbr_fdtd::SimulationConfig;

use crate::errors::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    /// Default seed when `--seed` is absent.
    pub seed: Option<u64>,
    /// Default ring count for the solver geometry.
    pub rings: Option<u32>,
    /// Cells per wavelength in the densest medium.
    pub resolution: Option<f64>,
    /// Runtime cap in optical periods.
    pub max_periods: Option<f64>,
    /// Absorber thickness in cells.
    pub pml_cells: Option<usize>,
    /// Record spectra every this many steps.
    pub dft_decimation: Option<usize>,
    /// Ring-down termination threshold.
    pub energy_floor: Option<f64>,
    /// Monitor band: lowest photon energy (eV).
    pub freq_min_ev: Option<f64>,
    /// Monitor band: highest photon energy (eV).
    pub freq_max_ev: Option<f64>,
    /// Number of monitor energies across the band.
    pub freq_count: Option<usize>,
}

pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::input(format!("cannot read config file: {e}"))
            .with("path", path.display().to_string())
    })?;
    serde_json::from_str(&text).map_err(|e| {
        CliError::input(format!("invalid config file: {e}"))
            .with("path", path.display().to_string())
    })
}

impl FileConfig {
    /// Applies the solver-related keys onto a simulation configuration.
    pub fn apply_sim(&self, cfg: &mut SimulationConfig) -> Result<(), CliError> {
        if let Some(r) = self.resolution {
            if !(r.is_finite() && r > 0.0) {
                return Err(CliError::input(format!("resolution must be positive, got {r}")));
            }
            cfg.resolution = r;
        }
        if let Some(m) = self.max_periods {
            if !(m.is_finite() && m > 0.0) {
                return Err(CliError::input(format!("max_periods must be positive, got {m}")));
            }
            cfg.max_periods = m;
        }
        if let Some(c) = self.pml_cells {
            if c < 8 {
                return Err(CliError::input(format!("pml_cells must be >= 8, got {c}")));
            }
            cfg.pml.cells = c;
        }
        if let Some(d) = self.dft_decimation {
            if d == 0 {
                return Err(CliError::input("dft_decimation must be >= 1"));
            }
            cfg.dft_decimation = d;
        }
        if let Some(f) = self.energy_floor {
            if !(f.is_finite() && f > 0.0 && f < 1.0) {
                return Err(CliError::input(format!("energy_floor must be in (0, 1), got {f}")));
            }
            cfg.energy_floor = f;
        }
        match (self.freq_min_ev, self.freq_max_ev) {
            (None, None) => {}
            (Some(lo), Some(hi)) => {
                if !(lo.is_finite() && hi.is_finite() && 0.0 < lo && lo < hi) {
                    return Err(CliError::input(format!(
                        "monitor band must satisfy 0 < freq_min_ev < freq_max_ev, got [{lo}, {hi}]"
                    )));
                }
                let n = self.freq_count.unwrap_or(cfg.frequencies_ev.len()).max(2);
                cfg.frequencies_ev =
                    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
            }
            _ => {
                return Err(CliError::input(
                    "freq_min_ev and freq_max_ev must be given together",
                ));
            }
        }
        Ok(())
    }
}

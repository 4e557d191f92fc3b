//! Numerical configuration for the 2-D time-domain solver.
//!
//! Lengths are nanometres and the vacuum speed of light is 1, so time is
//! measured in nanometres of light travel and angular frequency in rad/nm
//! (`omega = 2 pi E / hc = 2 pi / lambda_vac`).

use serde::{Deserialize, Serialize};

use crate::FdtdError;

/// hc in eV nm, for converting photon energies to vacuum wavelengths.
pub(crate) const HC_EV_NM: f64 = 1239.841_98;

/// Angular frequency (rad/nm, c = 1) of a photon energy in eV.
pub fn omega_of_ev(e_ev: f64) -> f64 {
    2.0 * std::f64::consts::PI * e_ev / HC_EV_NM
}

/// Absorbing-layer profile parameters (polynomial-graded convolutional PML).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmlConfig {
    /// Layer thickness in cells (>= 8).
    pub cells: usize,
    /// Polynomial grading order of the conductivity profile.
    pub order: f64,
    /// Multiplier on the matched-impedance conductivity; set to the refractive
    /// index of the medium touching the layer for best absorption.
    pub sigma_scale: f64,
}

impl Default for PmlConfig {
    fn default() -> Self {
        PmlConfig {
            cells: 10,
            order: 3.0,
            sigma_scale: 1.8,
        }
    }
}

/// Full solver configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Cells per wavelength at `resolution_wavelength_nm` in the densest medium.
    pub resolution: f64,
    /// Vacuum wavelength defining the resolution (short edge of the band).
    pub resolution_wavelength_nm: f64,
    /// Refractive index of the densest medium resolved by `resolution`.
    pub n_max: f64,
    /// Fraction of the 2-D stability limit dx/sqrt(2) used for the time step.
    pub courant_factor: f64,
    /// Absorbing boundary profile.
    pub pml: PmlConfig,
    /// Hard cap on runtime, in optical periods of the source centre frequency.
    pub max_periods: f64,
    /// Stop once interior energy falls below this fraction of its peak.
    pub energy_floor: f64,
    /// Record spectra every this many time steps.
    pub dft_decimation: usize,
    /// Photon energies (eV) at which monitors accumulate spectra.
    pub frequencies_ev: Vec<f64>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            resolution: 20.0,
            resolution_wavelength_nm: 700.0,
            n_max: 3.3,
            courant_factor: 0.95,
            pml: PmlConfig::default(),
            max_periods: 400.0,
            energy_floor: 1e-5,
            dft_decimation: 8,
            frequencies_ev: default_frequencies(),
        }
    }
}

/// Default monitor comb: 161 samples across 1.45-1.70 eV.
pub fn default_frequencies() -> Vec<f64> {
    let n = 161;
    (0..n)
        .map(|i| 1.45 + 0.25 * i as f64 / (n - 1) as f64)
        .collect()
}

impl SimulationConfig {
    /// Spatial step in nm.
    pub fn dx(&self) -> f64 {
        self.resolution_wavelength_nm / (self.n_max * self.resolution)
    }

    /// Time step in nm of light travel.
    pub fn dt(&self) -> f64 {
        self.courant_factor * self.dx() / std::f64::consts::SQRT_2
    }

    pub fn validate(&self) -> Result<(), FdtdError> {
        if !(self.resolution.is_finite() && self.resolution >= 8.0) {
            return Err(FdtdError::Config {
                message: format!("resolution must be >= 8 cells per wavelength, got {}", self.resolution),
            });
        }
        if !(self.resolution_wavelength_nm.is_finite() && self.resolution_wavelength_nm > 0.0) {
            return Err(FdtdError::Config {
                message: "resolution wavelength must be positive".into(),
            });
        }
        if !(self.n_max.is_finite() && self.n_max >= 1.0) {
            return Err(FdtdError::Config {
                message: format!("n_max must be >= 1, got {}", self.n_max),
            });
        }
        if !(self.courant_factor.is_finite() && self.courant_factor > 0.0 && self.courant_factor < 1.0)
        {
            return Err(FdtdError::Config {
                message: format!(
                    "courant_factor must lie in (0, 1); {} is at or beyond the stability limit",
                    self.courant_factor
                ),
            });
        }
        if self.pml.cells < 8 {
            return Err(FdtdError::Config {
                message: format!("absorbing layer needs >= 8 cells, got {}", self.pml.cells),
            });
        }
        if !(self.pml.order.is_finite() && self.pml.order >= 1.0) {
            return Err(FdtdError::Config {
                message: "absorbing layer grading order must be >= 1".into(),
            });
        }
        if !(self.pml.sigma_scale.is_finite() && self.pml.sigma_scale > 0.0) {
            return Err(FdtdError::Config {
                message: "absorbing layer sigma_scale must be positive".into(),
            });
        }
        if !(self.max_periods.is_finite() && self.max_periods > 0.0) {
            return Err(FdtdError::Config {
                message: "max_periods must be positive".into(),
            });
        }
        if !(self.energy_floor.is_finite() && self.energy_floor > 0.0 && self.energy_floor < 1.0) {
            return Err(FdtdError::Config {
                message: "energy_floor must lie in (0, 1)".into(),
            });
        }
        if self.dft_decimation == 0 {
            return Err(FdtdError::Config {
                message: "dft_decimation must be >= 1".into(),
            });
        }
        if self.frequencies_ev.is_empty() {
            return Err(FdtdError::Config {
                message: "at least one monitor frequency is required".into(),
            });
        }
        for &f in &self.frequencies_ev {
            if !(f.is_finite() && f > 0.0) {
                return Err(FdtdError::Config {
                    message: format!("monitor frequencies must be positive, got {f}"),
                });
            }
        }
        // Spectral samples must stay inside the flat part of the pulse spectrum;
        // the decimated recorder must also still resolve them (Nyquist).
        let nyquist = std::f64::consts::PI / (self.dt() * self.dft_decimation as f64);
        let max_omega = self
            .frequencies_ev
            .iter()
            .fold(0.0_f64, |m, &f| m.max(omega_of_ev(f)));
        if max_omega >= nyquist {
            return Err(FdtdError::Config {
                message: format!(
                    "dft_decimation {} undersamples the highest monitor frequency",
                    self.dft_decimation
                ),
            });
        }
        Ok(())
    }
}

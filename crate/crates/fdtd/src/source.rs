//! Excitation pulses and their spatial footprints.
//!
//! Every source uses a derivative-of-Gaussian pulse, whose spectrum
//! `|S(w)| ~ w exp(-w^2 tau^2 / 2)` contains exactly zero DC and, with
//! `tau = 1/w0`, peaks at the centre frequency and stays within a few percent
//! of peak across the monitored band.  Sources are injected additively (soft),
//! so reflections pass through them unimpeded.

use crate::config::omega_of_ev;
use crate::config::HC_EV_NM;

/// Temporal envelope: s(t) = -((t - t0)/tau) exp(-(t - t0)^2 / (2 tau^2)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    /// Centre angular frequency (rad/nm).
    pub omega0: f64,
    /// Envelope width, tau = 1/omega0 by construction.
    pub tau: f64,
    /// Pulse delay; the envelope is negligible (< 1e-7) at t = 0.
    pub t0: f64,
}

impl Pulse {
    /// Pulse centred on a vacuum wavelength (nm).
    pub fn at_wavelength(lambda0_nm: f64) -> Pulse {
        Pulse::at_energy(HC_EV_NM / lambda0_nm)
    }

    /// Pulse centred on a photon energy (eV).
    pub fn at_energy(e_ev: f64) -> Pulse {
        let omega0 = omega_of_ev(e_ev);
        let tau = 1.0 / omega0;
        Pulse {
            omega0,
            tau,
            t0: 6.0 * tau,
        }
    }

    /// Envelope value at time t.
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        let u = (t - self.t0) / self.tau;
        -u * (-0.5 * u * u).exp()
    }

    /// Time after which the envelope is negligible.
    pub fn end_time(&self) -> f64 {
        2.0 * self.t0
    }

    /// Spectral amplitude |S(w)| (unnormalised), for bandwidth checks.
    pub fn spectral_amplitude(&self, omega: f64) -> f64 {
        let wt = omega * self.tau;
        wt * (-0.5 * wt * wt).exp()
    }
}

/// Spatial footprint of a source on the grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Footprint {
    /// Single cell (point emitter).
    Point { i: usize, j: usize },
    /// Horizontal line at row j with per-column amplitudes (Gaussian beam).
    Line { j: usize, i0: usize, amps: Vec<f64> },
}

/// A soft source: footprint, pulse, and overall amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct Source {
    pub footprint: Footprint,
    pub pulse: Pulse,
    pub amplitude: f64,
}

impl Source {
    pub fn dipole(i: usize, j: usize, pulse: Pulse) -> Source {
        Source {
            footprint: Footprint::Point { i, j },
            pulse,
            amplitude: 1.0,
        }
    }

    /// Gaussian beam footprint along row `j`: amplitude exp(-x^2/w0^2) sampled
    /// on columns `i0..=i1` with `x` measured from the domain centre column.
    pub fn beam(
        j: usize,
        i0: usize,
        i1: usize,
        waist_nm: f64,
        dx: f64,
        ic: usize,
        pulse: Pulse,
    ) -> Source {
        let amps = (i0..=i1)
            .map(|i| {
                let x = (i as f64 - ic as f64) * dx;
                (-(x * x) / (waist_nm * waist_nm)).exp()
            })
            .collect();
        Source {
            footprint: Footprint::Line { j, i0, amps },
            pulse,
            amplitude: 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_has_zero_dc_and_flat_band() {
        let p = Pulse::at_wavelength(780.0);
        // zero DC: integral of s(t) over the full support vanishes (odd in u)
        let dt = p.tau / 50.0;
        let mut integral = 0.0;
        let mut t = 0.0;
        while t < p.end_time() {
            integral += p.value(t) * dt;
            t += dt;
        }
        assert!(integral.abs() < 1e-5, "DC leakage {integral}");
        // spectrum within 3% of peak across 1.45-1.70 eV
        let peak = p.spectral_amplitude(p.omega0);
        for &e in &[1.45, 1.55, 1.70] {
            let a = p.spectral_amplitude(omega_of_ev(e));
            assert!(a / peak > 0.97, "amplitude at {e} eV is {}", a / peak);
        }
    }

    #[test]
    fn pulse_is_negligible_at_start() {
        let p = Pulse::at_wavelength(800.0);
        assert!(p.value(0.0).abs() < 1e-6);
        assert!(p.value(p.end_time()).abs() < 1e-6);
        // peak amplitude is order unity in between
        let peak = (0..1000)
            .map(|k| p.value(p.end_time() * k as f64 / 1000.0).abs())
            .fold(0.0_f64, f64::max);
        assert!(peak > 0.5);
    }

    #[test]
    fn beam_footprint_is_mirror_symmetric() {
        let pulse = Pulse::at_wavelength(800.0);
        let s = Source::beam(40, 10, 90, 750.0, 10.6, 50, pulse);
        if let Footprint::Line { amps, .. } = &s.footprint {
            let n = amps.len();
            for k in 0..n / 2 {
                assert_eq!(amps[k], amps[n - 1 - k]);
            }
            // centre column carries the peak
            assert_eq!(amps[n / 2], 1.0);
        } else {
            panic!("expected line footprint");
        }
    }
}

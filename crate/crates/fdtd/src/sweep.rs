//! Etch-depth sweeps: rerun the cavity for a ladder of surface-removal
//! depths and track how the resonance responds.
//!
//! All sweep members share one bulk-emitter reference and one incident-beam
//! calibration (the domain is sized from the unetched geometry, so grids are
//! congruent).  Each depth gets an emitter run (enhancement spectrum) and a
//! pair of beam runs (relative reflectance); the runs execute in parallel.
//!
//! The band holds a ladder of cavity modes that all shift blue as material is
//! removed, so "the" resonance is only well defined by continuity: the first
//! member is fitted at its deepest interior dip, and every later member is
//! fitted inside a window extrapolated from the two previous centres.  The
//! enhancement peak is then the local maximum within a linewidth of the
//! fitted centre, refined parabolically.

use std::path::Path;

use rayon::prelude::*;

use crate::config::{SimulationConfig, HC_EV_NM};
use crate::geometry::{build_geometry, CbrGeometry, Structure};
use crate::observables::{
    beam_calibration, bulk_reference_flux, ensemble_purcell_with_reference,
    reflectance_with_calibration, SpectrumResult,
};
use crate::FdtdError;
use cbr_lineshapes::{fit_fano, FanoFit};
use cbr_spectra::{AxisKind, Spectrum};

/// One etch step of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Material removed from every upward-facing surface (nm).
    pub delta_nm: f64,
    /// Fitted resonance centre (eV).
    pub ec_ev: f64,
    /// Fitted resonance linewidth (eV, FWHM).
    pub gamma_ev: f64,
    /// Quality factor Ec / Gamma.
    pub q: f64,
    /// Enhancement at the resonance (local peak near the fitted centre).
    pub fp_peak: f64,
    /// Energy of that enhancement peak (eV).
    pub fp_peak_ev: f64,
}

/// Completed etch sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

/// Default ladder: 0 to 16.8 nm in 1.2 nm steps (15 depths, 14 steps).
pub fn default_deltas() -> Vec<f64> {
    (0..15).map(|k| 1.2 * k as f64).collect()
}

/// Half-width floor (eV) of the mode-tracking window.
const TRACK_FLOOR_EV: f64 = 0.015;
/// Tracking window half-width in fitted linewidths.
const TRACK_WIDTHS: f64 = 4.0;
/// Enhancement-peak search half-width floor (eV).
const PEAK_FLOOR_EV: f64 = 0.005;

/// Local maximum of `values` restricted to `lo..=hi` on the energy axis,
/// refined with a parabola through the three surrounding samples.
fn peak_refine(energies: &[f64], values: &[f64], lo: f64, hi: f64) -> Option<(f64, f64)> {
    let mut k: Option<usize> = None;
    for (i, e) in energies.iter().enumerate() {
        if *e >= lo && *e <= hi && k.map_or(true, |b| values[i] > values[b]) {
            k = Some(i);
        }
    }
    let k = k?;
    if k == 0 || k + 1 == values.len() {
        return Some((values[k], energies[k]));
    }
    let (ym, y0, yp) = (values[k - 1], values[k], values[k + 1]);
    let denom = ym - 2.0 * y0 + yp;
    if denom >= 0.0 {
        return Some((y0, energies[k]));
    }
    let shift = 0.5 * (ym - yp) / denom;
    let de = energies[k + 1] - energies[k];
    Some((y0 - 0.25 * (ym - yp) * shift, energies[k] + shift * de))
}

/// Spectra for one depth, before any fitting.
struct MemberSpectra {
    fp: SpectrumResult,
    refl: SpectrumResult,
}

fn run_member(
    base: &CbrGeometry,
    config: &SimulationConfig,
    delta: f64,
    offsets_nm: &[f64],
    p0: &[f64],
    cal: &crate::observables::BeamCalibration,
) -> Result<MemberSpectra, FdtdError> {
    let geometry = build_geometry(base, delta)?;
    let fp = ensemble_purcell_with_reference(
        &Structure::Cbr(geometry.clone()),
        config,
        offsets_nm,
        p0,
    )?;
    let refl = reflectance_with_calibration(&geometry, config, cal)?;
    Ok(MemberSpectra { fp, refl })
}

/// Fano fit of a reflectance dip inside `lo..=hi`, after dividing out the
/// straight baseline through the window edges.  The raw background slopes
/// through any window wide enough to fit in, and a constant-background model
/// on a sloped baseline drags the fitted centre off the dip.
fn detrended_fano(
    energies: &[f64],
    values: &[f64],
    lo: f64,
    hi: f64,
) -> Result<FanoFit, FdtdError> {
    let idx: Vec<usize> = (0..energies.len())
        .filter(|&i| energies[i] >= lo && energies[i] <= hi)
        .collect();
    if idx.len() < 9 {
        return Err(FdtdError::Normalization {
            what: format!("only {} reflectance samples inside the fit window", idx.len()),
        });
    }
    let edge = 3usize;
    let mean = |ii: &[usize]| -> (f64, f64) {
        let n = ii.len() as f64;
        (
            ii.iter().map(|&i| energies[i]).sum::<f64>() / n,
            ii.iter().map(|&i| values[i]).sum::<f64>() / n,
        )
    };
    let (xl, yl) = mean(&idx[..edge]);
    let (xr, yr) = mean(&idx[idx.len() - edge..]);
    let slope = (yr - yl) / (xr - xl);
    let baseline = |e: f64| yl + slope * (e - xl);
    let axis: Vec<f64> = idx.iter().map(|&i| energies[i]).collect();
    let flat: Vec<f64> = if axis.iter().all(|&e| baseline(e) > 1e-9) {
        idx.iter().map(|&i| values[i] / baseline(energies[i])).collect()
    } else {
        idx.iter().map(|&i| values[i]).collect()
    };
    let spectrum = Spectrum::new(axis, flat, AxisKind::Energy, "flattened reflectance")
        .map_err(|e| FdtdError::Normalization {
            what: format!("windowed reflectance not fittable: {e}"),
        })?;
    Ok(fit_fano(&spectrum, None)?)
}

/// Run the etch sweep.  Depths must be finite, non-negative, and strictly
/// increasing.  On a member failure the error reports which depths completed.
pub fn etch_sweep(
    base: &CbrGeometry,
    config: &SimulationConfig,
    deltas: &[f64],
) -> Result<SweepTable, FdtdError> {
    base.validate()?;
    config.validate()?;
    if deltas.is_empty() {
        return Err(FdtdError::Config {
            message: "etch sweep needs at least one depth".into(),
        });
    }
    if !deltas.iter().all(|d| d.is_finite() && *d >= 0.0) {
        return Err(FdtdError::Config {
            message: "etch depths must be finite and non-negative".into(),
        });
    }
    for w in deltas.windows(2) {
        if !(w[1] > w[0]) {
            return Err(FdtdError::Config {
                message: format!("etch depths must increase strictly: {} then {}", w[0], w[1]),
            });
        }
    }

    let p0 = bulk_reference_flux(base.n_membrane * base.n_membrane, config)?;
    let cal = beam_calibration(base, config)?;
    // Ensemble emitter offsets: centre plus one and two thirds of the disc
    // radius, fixed across depths so every member probes the same positions.
    let offsets: Vec<f64> = [0.0, 1.0 / 3.0, 2.0 / 3.0]
        .iter()
        .map(|f| f * base.disc_radius_nm)
        .collect();

    // Heavy phase, parallel over depths; fitting is cheap and runs after.
    let spectra: Vec<(f64, Result<MemberSpectra, FdtdError>)> = deltas
        .par_iter()
        .map(|&d| (d, run_member(base, config, d, &offsets, &p0, &cal)))
        .collect();

    // Serial tracked-fit phase, in depth order.
    let mut rows: Vec<SweepRow> = Vec::with_capacity(deltas.len());
    for (k, (delta, result)) in spectra.into_iter().enumerate() {
        let partial = |rows: &[SweepRow], e: FdtdError| FdtdError::PartialSweep {
            completed: rows.iter().map(|r| r.delta_nm).collect(),
            failed_delta: delta,
            source: Box::new(e),
        };
        let member = match result {
            Ok(m) => m,
            Err(e) => return Err(partial(&rows, e)),
        };
        match fit_member(&member, delta, k, &rows) {
            Ok(row) => rows.push(row),
            Err(e) => return Err(partial(&rows, e)),
        }
    }
    Ok(SweepTable { rows })
}

/// Fit one member: window from the tracked mode, detrended dip fit, then the
/// enhancement peak within a linewidth of the fitted centre.
fn fit_member(
    m: &MemberSpectra,
    delta: f64,
    k: usize,
    rows: &[SweepRow],
) -> Result<SweepRow, FdtdError> {
    let es = &m.refl.energies_ev;
    let vs = &m.refl.values;
    let (lo, hi) = if k == 0 {
        // Locate the dip once with the automatic window, then refit detrended.
        let spectrum = m.refl.to_spectrum("relative reflectance")?;
        let seed = fit_fano(&spectrum, None)?;
        let half = (TRACK_WIDTHS * seed.params.gamma_ev).max(TRACK_FLOOR_EV);
        (seed.params.center_ev - half, seed.params.center_ev + half)
    } else {
        let prev = &rows[k - 1];
        let slope = if k >= 2 {
            let pp = &rows[k - 2];
            (prev.ec_ev - pp.ec_ev) / (prev.delta_nm - pp.delta_nm)
        } else {
            0.0
        };
        let predicted = prev.ec_ev + slope * (delta - prev.delta_nm);
        let half = (TRACK_WIDTHS * prev.gamma_ev).max(TRACK_FLOOR_EV);
        (predicted - half, predicted + half)
    };
    let fit = detrended_fano(es, vs, lo, hi)?;
    let ec = fit.params.center_ev;
    let w = fit.params.gamma_ev.max(PEAK_FLOOR_EV);
    let (fp_peak, fp_peak_ev) = peak_refine(&m.fp.energies_ev, &m.fp.values, ec - w, ec + w)
        .ok_or_else(|| FdtdError::Normalization {
            what: format!("no enhancement samples within the line at {ec:.4} eV"),
        })?;
    Ok(SweepRow {
        delta_nm: delta,
        ec_ev: ec,
        gamma_ev: fit.params.gamma_ev,
        q: fit.quality(),
        fp_peak,
        fp_peak_ev,
    })
}

impl SweepTable {
    /// Spectral sensitivity in nm of resonance wavelength per nm of removed
    /// material: the negated least-squares slope of lambda_c against depth.
    /// Needs at least two rows.
    pub fn sensitivity_nm_per_nm(&self) -> Option<f64> {
        if self.rows.len() < 2 {
            return None;
        }
        let n = self.rows.len() as f64;
        let xs: Vec<f64> = self.rows.iter().map(|r| r.delta_nm).collect();
        let ys: Vec<f64> = self.rows.iter().map(|r| HC_EV_NM / r.ec_ev).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum();
        if sxx == 0.0 {
            return None;
        }
        // The resonance moves blue as material leaves, so the raw slope is
        // negative; report the magnitude-with-sign convention d(lambda)/d(-t).
        Some(-(sxy / sxx))
    }

    /// The sweep as CSV text.
    pub fn csv_string(&self) -> String {
        let mut out = String::from("delta_nm,Ec_eV,Gamma_eV,Q,Fp_peak\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.delta_nm, r.ec_ev, r.gamma_ev, r.q, r.fp_peak
            ));
        }
        out
    }

    /// Write the sweep as CSV.
    pub fn write_csv(&self, path: &Path) -> Result<(), FdtdError> {
        std::fs::write(path, self.csv_string())?;
        Ok(())
    }
}

//! Physical observables assembled from monitor spectra.
//!
//! Every observable is a ratio of two runs, so source normalisation, grid
//! dispersion, and monitor bookkeeping cancel:
//!
//! * **Emission enhancement** — power radiated by a point emitter through a
//!   small enclosing box, divided by the same measurement for the emitter in
//!   unbounded bulk membrane material (an independent all-absorbing run).
//! * **Relative reflectance** — a Gaussian beam reflects off the patterned
//!   stack; the incident wave recorded in an empty-air calibration run is
//!   subtracted cell-by-cell from the monitor spectra, the remaining upward
//!   field is decomposed into its angular spectrum, and the power inside the
//!   collection cone is divided by the same quantity for the unpatterned stack.
//! * **Extraction efficiency** — collection-cone fraction of the upward far
//!   field times the ratio of top-monitor flux to total emitted flux.

use crate::config::{omega_of_ev, SimulationConfig};
use crate::dft::C64;
use crate::farfield::{angular_fraction, cone_power, far_field_from_line, N_THETA};
use crate::geometry::{CbrGeometry, Structure};
use crate::grid::{Boundaries, DomainSpec, StackLayout};
use crate::solver::Simulation;
use crate::source::{Pulse, Source};
use crate::FdtdError;

/// Emitter pulse centre (nm) and beam pulse centre (nm).
pub const DIPOLE_WAVELENGTH_NM: f64 = 780.0;
pub const BEAM_WAVELENGTH_NM: f64 = 800.0;
/// Beam amplitude radius (nm).
pub const BEAM_WAIST_NM: f64 = 750.0;
/// Standard collection numerical aperture.
pub const COLLECTION_NA: f64 = 0.65;

/// Half-size (cells) of the flux box around a point emitter.
const BOX_HALF: usize = 4;

/// A spectrum tied to the normalisation that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub energies_ev: Vec<f64>,
    pub values: Vec<f64>,
    /// Which reference run normalised the raw monitor data.
    pub normalization: String,
}

impl SpectrumResult {
    /// View as a general spectrum (energy axis ascending).
    pub fn to_spectrum(&self, label: &str) -> Result<cbr_spectra::Spectrum, FdtdError> {
        cbr_spectra::Spectrum::new(
            self.energies_ev.clone(),
            self.values.clone(),
            cbr_spectra::AxisKind::Energy,
            label,
        )
        .map_err(|e| FdtdError::Normalization {
            what: format!("spectrum not representable: {e}"),
        })
    }
}

/// Monitor data extracted from one point-emitter run.
pub struct DipoleRun {
    pub energies_ev: Vec<f64>,
    /// Outward power through the enclosing box, per frequency.
    pub box_flux: Vec<f64>,
    /// Power through the wide top monitor, per frequency.
    pub top_flux: Vec<f64>,
    /// Ez spectra along the top monitor (per frequency), for far fields.
    pub top_ez: Vec<Vec<C64>>,
    /// x positions of the top-monitor cells.
    pub top_xs: Vec<f64>,
    /// True when the run ended on the ring-down criterion (not the cap).
    pub rang_down: bool,
}

fn monitor_span(sim: &Simulation) -> (usize, usize) {
    let grid = sim.grid();
    let margin = grid.npml + 2;
    (margin, grid.nx - 1 - margin)
}

/// Install box + top monitors around an on-axis point source and run to
/// ring-down.
pub fn run_dipole(
    structure: &Structure,
    config: &SimulationConfig,
) -> Result<DipoleRun, FdtdError> {
    run_dipole_at(structure, config, 0.0)
}

/// Same, with the emitter displaced `x_nm` from the axis (the flux box
/// follows the emitter; the top monitor keeps its full span).
pub fn run_dipole_at(
    structure: &Structure,
    config: &SimulationConfig,
    x_nm: f64,
) -> Result<DipoleRun, FdtdError> {
    let mut cfg = config.clone();
    let (domain, boundaries, dipole_y, top_y) = match structure {
        Structure::Cbr(g) | Structure::Planar(g) => {
            let layout = StackLayout::of(g);
            (
                layout.domain(g),
                Boundaries::stack(),
                layout.y_membrane_mid,
                layout.y_top_monitor,
            )
        }
        Structure::Uniform { eps } => {
            // Matched absorber: the optimal conductivity scales with the index.
            cfg.pml.sigma_scale = eps.sqrt();
            (
                DomainSpec {
                    half_width_nm: 1300.0,
                    height_nm: 1500.0,
                },
                Boundaries::open(),
                650.0,
                1260.0,
            )
        }
    };
    let config = &cfg;
    let mut sim = Simulation::new(structure, config, &domain, boundaries)?;
    let grid = sim.grid();
    let id = grid.i_of_x(x_nm);
    let jd = grid.j_of_y(dipole_y);
    let j_top = grid.j_of_y(top_y);
    let (i0, i1) = monitor_span(&sim);
    if id < i0 + BOX_HALF || id + BOX_HALF > i1 {
        return Err(FdtdError::Config {
            message: format!("emitter offset {x_nm} nm leaves the interior"),
        });
    }

    let m_box_top = sim.add_hline_monitor(jd + BOX_HALF, id - BOX_HALF, id + BOX_HALF)?;
    let m_box_bot = sim.add_hline_monitor(jd - BOX_HALF, id - BOX_HALF, id + BOX_HALF)?;
    let m_box_r = sim.add_vline_monitor(id + BOX_HALF, jd - BOX_HALF + 1, jd + BOX_HALF - 1)?;
    let m_box_l = sim.add_vline_monitor(id - BOX_HALF, jd - BOX_HALF + 1, jd + BOX_HALF - 1)?;
    let m_top = sim.add_hline_monitor(j_top, i0, i1)?;

    sim.add_source(Source::dipole(id, jd, Pulse::at_wavelength(DIPOLE_WAVELENGTH_NM)))?;
    let stats = sim.run()?;

    let dx = sim.grid().dx;
    let top = sim.monitor(m_box_top).flux(dx);
    let bot = sim.monitor(m_box_bot).flux(dx);
    let right = sim.monitor(m_box_r).flux(dx);
    let left = sim.monitor(m_box_l).flux(dx);
    let box_flux: Vec<f64> = (0..top.len())
        .map(|f| top[f] - bot[f] + right[f] - left[f])
        .collect();
    let top_flux = sim.monitor(m_top).flux(dx);

    let mon = sim.monitor(m_top);
    let n_freq = config.frequencies_ev.len();
    let top_ez: Vec<Vec<C64>> = (0..n_freq).map(|f| mon.ez_row(f).to_vec()).collect();
    let top_xs: Vec<f64> = (mon.a0..mon.a0 + mon.len)
        .map(|i| sim.grid().x_of(i))
        .collect();

    Ok(DipoleRun {
        energies_ev: config.frequencies_ev.clone(),
        box_flux,
        top_flux,
        top_ez,
        top_xs,
        rang_down: stats.stopped_on_energy,
    })
}

/// Power spectrum of the same emitter in unbounded bulk of permittivity `eps`
/// (all-absorbing boundaries, matched absorber conductivity).
pub fn bulk_reference_flux(eps: f64, config: &SimulationConfig) -> Result<Vec<f64>, FdtdError> {
    let mut cfg = config.clone();
    cfg.pml.sigma_scale = eps.sqrt();
    let structure = Structure::Uniform { eps };
    let domain = DomainSpec {
        half_width_nm: 900.0,
        height_nm: 1800.0,
    };
    let mut sim = Simulation::new(&structure, &cfg, &domain, Boundaries::open())?;
    let ic = sim.grid().ic();
    let jd = sim.grid().j_of_y(900.0);
    let m_top = sim.add_hline_monitor(jd + BOX_HALF, ic - BOX_HALF, ic + BOX_HALF)?;
    let m_bot = sim.add_hline_monitor(jd - BOX_HALF, ic - BOX_HALF, ic + BOX_HALF)?;
    let m_r = sim.add_vline_monitor(ic + BOX_HALF, jd - BOX_HALF + 1, jd + BOX_HALF - 1)?;
    let m_l = sim.add_vline_monitor(ic - BOX_HALF, jd - BOX_HALF + 1, jd + BOX_HALF - 1)?;
    sim.add_source(Source::dipole(ic, jd, Pulse::at_wavelength(DIPOLE_WAVELENGTH_NM)))?;
    sim.run()?;
    let dx = sim.grid().dx;
    let top = sim.monitor(m_top).flux(dx);
    let bot = sim.monitor(m_bot).flux(dx);
    let right = sim.monitor(m_r).flux(dx);
    let left = sim.monitor(m_l).flux(dx);
    Ok((0..top.len())
        .map(|f| top[f] - bot[f] + right[f] - left[f])
        .collect())
}

/// Reference permittivity for a structure's emitter environment.
fn reference_eps(structure: &Structure) -> f64 {
    match structure {
        Structure::Cbr(g) | Structure::Planar(g) => g.n_membrane * g.n_membrane,
        Structure::Uniform { eps } => *eps,
    }
}

/// Emission-rate enhancement spectrum F_P(E) = P(E) / P_bulk(E).
pub fn compute_purcell_spectrum(
    structure: &Structure,
    config: &SimulationConfig,
) -> Result<SpectrumResult, FdtdError> {
    let p0 = bulk_reference_flux(reference_eps(structure), config)?;
    purcell_with_reference(structure, config, &p0)
}

/// Same, but reusing an already computed bulk reference (etch sweeps share it).
pub fn purcell_with_reference(
    structure: &Structure,
    config: &SimulationConfig,
    p0: &[f64],
) -> Result<SpectrumResult, FdtdError> {
    let run = run_dipole(structure, config)?;
    if p0.len() != run.box_flux.len() {
        return Err(FdtdError::Normalization {
            what: format!(
                "reference has {} frequencies, run has {}",
                p0.len(),
                run.box_flux.len()
            ),
        });
    }
    let mut values = Vec::with_capacity(p0.len());
    for (f, &p) in run.box_flux.iter().enumerate() {
        let r = p0[f];
        if !(r.is_finite() && r > 0.0) {
            return Err(FdtdError::Normalization {
                what: format!(
                    "bulk reference power is {r} at {} eV",
                    run.energies_ev[f]
                ),
            });
        }
        values.push(p / r);
    }
    Ok(SpectrumResult {
        energies_ev: run.energies_ev,
        values,
        normalization: "bulk-dipole-reference".into(),
    })
}

/// Emission-rate enhancement averaged over emitter positions.
///
/// A single cross-section emitter sits at the mercy of the lateral standing
/// wave — a node at its position hides the mode entirely — so the sweep
/// observable averages the enhancement over several lateral offsets, the way
/// an ensemble of randomly placed emitters samples the cavity.
pub fn ensemble_purcell_with_reference(
    structure: &Structure,
    config: &SimulationConfig,
    offsets_nm: &[f64],
    p0: &[f64],
) -> Result<SpectrumResult, FdtdError> {
    if offsets_nm.is_empty() {
        return Err(FdtdError::Config {
            message: "ensemble enhancement needs at least one emitter offset".into(),
        });
    }
    let mut sum: Vec<f64> = vec![0.0; p0.len()];
    let mut energies: Vec<f64> = Vec::new();
    for &x in offsets_nm {
        let run = run_dipole_at(structure, config, x)?;
        if run.box_flux.len() != p0.len() {
            return Err(FdtdError::Normalization {
                what: format!(
                    "reference has {} frequencies, run has {}",
                    p0.len(),
                    run.box_flux.len()
                ),
            });
        }
        for (f, &p) in run.box_flux.iter().enumerate() {
            let r = p0[f];
            if !(r.is_finite() && r > 0.0) {
                return Err(FdtdError::Normalization {
                    what: format!("bulk reference power is {r} at {} eV", run.energies_ev[f]),
                });
            }
            sum[f] += p / r;
        }
        energies = run.energies_ev;
    }
    let n = offsets_nm.len() as f64;
    Ok(SpectrumResult {
        energies_ev: energies,
        values: sum.into_iter().map(|s| s / n).collect(),
        normalization: "bulk-dipole-reference, emitter-position average".into(),
    })
}

/// Extraction efficiency eta(E): collection-cone far-field fraction times
/// (top-monitor power / total emitted power), from a single emitter run.
pub fn compute_extraction_efficiency(
    structure: &Structure,
    config: &SimulationConfig,
    na: f64,
) -> Result<SpectrumResult, FdtdError> {
    if matches!(structure, Structure::Uniform { .. }) {
        return Err(FdtdError::Config {
            message: "extraction efficiency needs the layer stack (top monitor in air)".into(),
        });
    }
    let run = run_dipole(structure, config)?;
    let mut values = Vec::with_capacity(run.energies_ev.len());
    for (f, &e_ev) in run.energies_ev.iter().enumerate() {
        let k = omega_of_ev(e_ev); // air above the membrane: k = omega / c
        let ff = far_field_from_line(&run.top_ez[f], &run.top_xs, k, N_THETA)?;
        let frac = angular_fraction(&ff, na)?;
        let total = run.box_flux[f];
        if !(total.is_finite() && total > 0.0) {
            return Err(FdtdError::Normalization {
                what: format!("emitted power is {total} at {e_ev} eV"),
            });
        }
        values.push(frac * run.top_flux[f] / total);
    }
    Ok(SpectrumResult {
        energies_ev: run.energies_ev,
        values,
        normalization: "cone-fraction x top-flux / emitted-flux".into(),
    })
}

/// Incident-beam calibration: the same beam recorded in empty air.
pub struct BeamCalibration {
    /// Ez spectra along the monitor line, per frequency.
    pub ez: Vec<Vec<C64>>,
    /// Monitor x positions.
    pub xs: Vec<f64>,
}

fn beam_run(
    structure: &Structure,
    config: &SimulationConfig,
    layout: &StackLayout,
    domain: &DomainSpec,
    boundaries: Boundaries,
) -> Result<(Vec<Vec<C64>>, Vec<f64>), FdtdError> {
    let mut sim = Simulation::new(structure, config, domain, boundaries)?;
    let grid = sim.grid();
    let ic = grid.ic();
    let dx = grid.dx;
    let j_src = grid.j_of_y(layout.y_beam_source);
    let j_mon = grid.j_of_y(layout.y_top_monitor);
    let (i0, i1) = monitor_span(&sim);
    let m_top = sim.add_hline_monitor(j_mon, i0, i1)?;
    sim.add_source(Source::beam(
        j_src,
        i0,
        i1,
        BEAM_WAIST_NM,
        dx,
        ic,
        Pulse::at_wavelength(BEAM_WAVELENGTH_NM),
    ))?;
    sim.run()?;
    let mon = sim.monitor(m_top);
    let n_freq = config.frequencies_ev.len();
    let ez: Vec<Vec<C64>> = (0..n_freq).map(|f| mon.ez_row(f).to_vec()).collect();
    let xs: Vec<f64> = (mon.a0..mon.a0 + mon.len)
        .map(|i| sim.grid().x_of(i))
        .collect();
    Ok((ez, xs))
}

/// Record the incident beam in an all-air domain of the same dimensions.
pub fn beam_calibration(
    geometry: &CbrGeometry,
    config: &SimulationConfig,
) -> Result<BeamCalibration, FdtdError> {
    let layout = StackLayout::of(geometry);
    let domain = layout.domain(geometry);
    let (ez, xs) = beam_run(
        &Structure::Uniform { eps: 1.0 },
        config,
        &layout,
        &domain,
        Boundaries::open(),
    )?;
    Ok(BeamCalibration { ez, xs })
}

/// Reflected power inside the collection cone, for one beam run, after
/// subtracting the incident field recorded in the calibration run.
fn cone_reflected_power(
    run_ez: &[Vec<C64>],
    cal: &BeamCalibration,
    energies_ev: &[f64],
) -> Result<Vec<f64>, FdtdError> {
    if run_ez.len() != cal.ez.len() || run_ez.iter().zip(&cal.ez).any(|(a, b)| a.len() != b.len())
    {
        return Err(FdtdError::Normalization {
            what: "calibration grid does not match the run monitor".into(),
        });
    }
    let mut out = Vec::with_capacity(energies_ev.len());
    for (f, &e_ev) in energies_ev.iter().enumerate() {
        let diff: Vec<C64> = run_ez[f]
            .iter()
            .zip(&cal.ez[f])
            .map(|(a, b)| a.sub(*b))
            .collect();
        let k = omega_of_ev(e_ev);
        let ff = far_field_from_line(&diff, &cal.xs, k, N_THETA)?;
        out.push(cone_power(&ff, COLLECTION_NA)?);
    }
    Ok(out)
}

/// Relative reflectance spectrum: collection-cone reflected power of the
/// patterned stack divided by that of the unpatterned stack, with the incident
/// beam removed by an air-calibration run.
pub fn compute_reflectance_spectrum(
    geometry: &CbrGeometry,
    config: &SimulationConfig,
) -> Result<SpectrumResult, FdtdError> {
    let cal = beam_calibration(geometry, config)?;
    reflectance_with_calibration(geometry, config, &cal)
}

/// Same, but reusing an already recorded incident-beam calibration.
pub fn reflectance_with_calibration(
    geometry: &CbrGeometry,
    config: &SimulationConfig,
    cal: &BeamCalibration,
) -> Result<SpectrumResult, FdtdError> {
    let layout = StackLayout::of(geometry);
    let domain = layout.domain(geometry);
    let (cbr_ez, _) = beam_run(
        &Structure::Cbr(geometry.clone()),
        config,
        &layout,
        &domain,
        Boundaries::stack(),
    )?;
    let (planar_ez, _) = beam_run(
        &Structure::Planar(geometry.clone()),
        config,
        &layout,
        &domain,
        Boundaries::stack(),
    )?;
    let energies = &config.frequencies_ev;
    let cbr_cone = cone_reflected_power(&cbr_ez, cal, energies)?;
    let planar_cone = cone_reflected_power(&planar_ez, cal, energies)?;
    let mut values = Vec::with_capacity(energies.len());
    for f in 0..energies.len() {
        let p = planar_cone[f];
        if !(p.is_finite() && p > 0.0) {
            return Err(FdtdError::Normalization {
                what: format!("planar reflected power is {p} at {} eV", energies[f]),
            });
        }
        values.push(cbr_cone[f] / p);
    }
    Ok(SpectrumResult {
        energies_ev: energies.clone(),
        values,
        normalization: "planar-stack reference with air-calibration subtraction".into(),
    })
}

/// Reflectance of the unpatterned stack against itself: unity everywhere by
/// construction, provided the planar reflected power is nonzero across the
/// band.  A normalization check for the beam/far-field pipeline.
pub fn compute_planar_reflectance(
    geometry: &CbrGeometry,
    config: &SimulationConfig,
) -> Result<SpectrumResult, FdtdError> {
    let cal = beam_calibration(geometry, config)?;
    let layout = StackLayout::of(geometry);
    let domain = layout.domain(geometry);
    let (planar_ez, _) = beam_run(
        &Structure::Planar(geometry.clone()),
        config,
        &layout,
        &domain,
        Boundaries::stack(),
    )?;
    let energies = &config.frequencies_ev;
    let planar_cone = cone_reflected_power(&planar_ez, &cal, energies)?;
    let mut values = Vec::with_capacity(energies.len());
    for f in 0..energies.len() {
        let p = planar_cone[f];
        if !(p.is_finite() && p > 0.0) {
            return Err(FdtdError::Normalization {
                what: format!("planar reflected power is {p} at {} eV", energies[f]),
            });
        }
        values.push(p / p);
    }
    Ok(SpectrumResult {
        energies_ev: energies.clone(),
        values,
        normalization: "planar-stack self-reference".into(),
    })
}

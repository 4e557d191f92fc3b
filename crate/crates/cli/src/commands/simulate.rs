//! `cbr simulate`: run the 2-D solver once and write the resulting spectrum
//! — relative reflectance of the patterned (or unpatterned) stack, or the
//! emission-rate enhancement of an embedded dipole.

use serde_json::{json, Value};

use cbr_fdtd::{
    build_geometry, compute_planar_reflectance, compute_purcell_spectrum,
    compute_reflectance_spectrum, CbrGeometry, SimulationConfig, SpectrumResult, Structure,
};
use cbr_lineshapes::fit_fano;

use crate::config::FileConfig;
use crate::errors::CliError;
use crate::plot::{Figure, PALETTE};
use crate::run::Run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StructureArg {
    /// Disc, rings, and trenches over the layer stack.
    Cbr,
    /// The unpatterned layer stack.
    Planar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ObservableArg {
    /// Collection-cone reflectance against the unpatterned stack.
    Reflectance,
    /// Dipole emission rate against the bulk-medium rate.
    Purcell,
}

pub struct Args {
    pub structure: StructureArg,
    pub observable: ObservableArg,
    pub rings: Option<u32>,
    pub etch_nm: f64,
    pub resolution: Option<f64>,
}

/// Builds the geometry and solver configuration from flags and file config.
pub fn resolve(
    args: &Args,
    file_cfg: &FileConfig,
) -> Result<(CbrGeometry, SimulationConfig), CliError> {
    let mut geometry = CbrGeometry::default();
    if let Some(r) = args.rings.or(file_cfg.rings) {
        geometry.n_rings = r;
    }
    let geometry = build_geometry(&geometry, args.etch_nm).map_err(CliError::input)?;
    let mut sim = SimulationConfig::default();
    file_cfg.apply_sim(&mut sim)?;
    if let Some(r) = args.resolution {
        if !(r.is_finite() && r > 0.0) {
            return Err(CliError::input(format!("resolution must be positive, got {r}")));
        }
        sim.resolution = r;
    }
    Ok((geometry, sim))
}

/// CSV body in the spectrum file format (readable back by the fit commands).
fn spectrum_csv(result: &SpectrumResult, label: &str) -> String {
    let mut out = format!("# axis=energy_ev label={label}\naxis,intensity\n");
    for (e, v) in result.energies_ev.iter().zip(&result.values) {
        out.push_str(&format!("{e},{v}\n"));
    }
    out
}

pub fn run(run: &Run, args: &Args, file_cfg: &FileConfig) -> Result<(), CliError> {
    let (geometry, sim) = resolve(args, file_cfg)?;

    let (result, label, y_label) = match (args.observable, args.structure) {
        (ObservableArg::Reflectance, StructureArg::Cbr) => (
            compute_reflectance_spectrum(&geometry, &sim).map_err(CliError::compute)?,
            "relative reflectance",
            "reflectance",
        ),
        (ObservableArg::Reflectance, StructureArg::Planar) => (
            compute_planar_reflectance(&geometry, &sim).map_err(CliError::compute)?,
            "planar self-reflectance",
            "reflectance",
        ),
        (ObservableArg::Purcell, structure) => {
            let s = match structure {
                StructureArg::Cbr => Structure::Cbr(geometry.clone()),
                StructureArg::Planar => Structure::Planar(geometry.clone()),
            };
            (
                compute_purcell_spectrum(&s, &sim).map_err(CliError::compute)?,
                "emission-rate enhancement",
                "F_P",
            )
        }
    };

    // Convenience: fit the resonance when the patterned reflectance shows
    // one; absent (null) off resonance rather than an error.
    let fano: Value = if args.observable == ObservableArg::Reflectance
        && args.structure == StructureArg::Cbr
    {
        result
            .to_spectrum(label)
            .ok()
            .and_then(|s| fit_fano(&s, None).ok())
            .map(|f| serde_json::to_value(f.report()).unwrap_or(Value::Null))
            .unwrap_or(Value::Null)
    } else {
        Value::Null
    };

    run.write_csv("spectrum.csv", &spectrum_csv(&result, label))?;
    let fig = Figure::new(
        format!("{label} ({:?} rings, etch {} nm)", geometry.n_rings, args.etch_nm),
        "photon energy (eV)",
        y_label,
    )
    .line(label, &result.energies_ev, &result.values, PALETTE[0]);
    run.write_svg("spectrum.svg", &crate::plot::render(&fig))?;

    let lo = result.values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = result.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    run.write_report(
        "simulation_report.json",
        json!({
            "structure": format!("{:?}", args.structure).to_lowercase(),
            "observable": format!("{:?}", args.observable).to_lowercase(),
            "rings": geometry.n_rings,
            "etch_nm": args.etch_nm,
            "resolution": sim.resolution,
        }),
        json!({
            "normalization": result.normalization,
            "energies": result.energies_ev.len(),
            "energy_min_eV": result.energies_ev.first(),
            "energy_max_eV": result.energies_ev.last(),
            "value_min": lo,
            "value_max": hi,
            "fano": fano,
        }),
        &["spectrum.csv", "spectrum.svg"],
    )
}

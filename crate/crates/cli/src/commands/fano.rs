//! `cbr fit-fano`: fit the asymmetric resonance line to a reflectance
//! spectrum and report center, width, asymmetry, and quality factor.

use std::path::Path;

use serde_json::json;

use cbr_lineshapes::{fano_value, fit_fano};
use cbr_spectra::{load_spectrum, AxisKind};

use crate::errors::CliError;
use crate::plot::{self, Figure, PALETTE};
use crate::run::Run;

pub fn run(run: &Run, spectrum_path: &Path, window: Option<(f64, f64)>) -> Result<(), CliError> {
    let path_str = spectrum_path.display().to_string();
    let spectrum = load_spectrum(spectrum_path)
        .map_err(|e| CliError::input(e).with("path", path_str.clone()))?;
    let fit = fit_fano(&spectrum, window)
        .map_err(|e| CliError::compute(e).with("path", path_str.clone()))?;
    let report = fit.report();

    // Plot in energy units regardless of the input axis.
    let energy = spectrum
        .to_axis_kind(AxisKind::Energy)
        .map_err(|e| CliError::compute(e).with("path", path_str.clone()))?;
    let dense = plot::linspace(report.window[0], report.window[1], 400);
    let model: Vec<f64> = dense.iter().map(|&e| fano_value(e, &fit.params)).collect();
    let mut fig = Figure::new(
        format!("resonance fit: E_c = {:.4} eV, Q = {:.0}", report.e_c_ev, report.q_factor),
        "photon energy (eV)",
        "reflectance",
    )
    .scatter("data", energy.axis(), energy.intensity(), PALETTE[0])
    .line("fit", &dense, &model, PALETTE[1]);
    fig.guides_x = vec![report.e_c_ev];
    run.write_svg("fano_fit.svg", &plot::render(&fig))?;

    let results = serde_json::to_value(&report)
        .map_err(|e| CliError::internal(format!("report serialization failed: {e}")))?;
    run.write_report(
        "fano_report.json",
        json!({
            "spectrum": path_str,
            "window_ev": window.map(|(lo, hi)| vec![lo, hi]),
        }),
        results,
        &["fano_fit.svg"],
    )
}

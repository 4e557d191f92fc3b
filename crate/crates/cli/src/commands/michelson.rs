//! `cbr michelson`: fit the interferometer visibility-versus-delay trace
//! with the Gaussian-times-Lorentzian coherence envelope and report the two
//! coherence times and the linewidth they imply.

use std::path::Path;

use serde_json::json;

use cbr_coherence::{fit_coherence, load_visibility_trace, visibility_model};

use crate::errors::CliError;
use crate::plot::{self, Figure, PALETTE};
use crate::run::Run;

pub fn run(run: &Run, trace_path: &Path, lifetime_ps: Option<f64>) -> Result<(), CliError> {
    let path_str = trace_path.display().to_string();
    let trace = load_visibility_trace(trace_path)
        .map_err(|e| CliError::input(e).with("path", path_str.clone()))?;
    let (mut coherence, fit) = fit_coherence(&trace)
        .map_err(|e| CliError::compute(e).with("path", path_str.clone()))?;
    if let Some(tau) = lifetime_ps {
        coherence = coherence.with_lifetime(tau).map_err(CliError::compute)?;
    }

    let max_delay = trace.delays_ps().iter().cloned().fold(0.0f64, f64::max);
    let dense = plot::linspace(0.0, max_delay * 1.05, 400);
    let model: Vec<f64> = dense
        .iter()
        .map(|&t| visibility_model(t, coherence.t_g_ps, coherence.t_l_ps))
        .collect();
    let fig = Figure::new(
        format!(
            "coherence fit: t_G = {:.0} ps, t_L = {:.0} ps, f_V = {:.1} ueV",
            coherence.t_g_ps,
            coherence.t_l_ps,
            1e6 * coherence.f_v_ev
        ),
        "coarse delay (ps)",
        "fringe visibility",
    )
    .scatter("data", trace.delays_ps(), trace.visibilities(), PALETTE[0])
    .line("fit", &dense, &model, PALETTE[1]);
    run.write_svg("visibility_fit.svg", &plot::render(&fig))?;

    let results = json!({
        "coherence": serde_json::to_value(&coherence)
            .map_err(|e| CliError::internal(format!("report serialization failed: {e}")))?,
        "fit": {
            "converged": fit.converged,
            "reduced_chi2": fit.reduced_chi2,
            "iterations": fit.iterations,
        },
    });
    run.write_report(
        "coherence_report.json",
        json!({ "trace": path_str, "lifetime_ps": lifetime_ps }),
        results,
        &["visibility_fit.svg"],
    )
}

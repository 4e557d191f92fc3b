//! `cbr lifetime`: fit an IRF-convolved exponential decay to a TCSPC
//! histogram; optionally convert the slow lifetime into a Purcell factor
//! against a reference lifetime.

use std::path::PathBuf;

use serde_json::json;

use cbr_decay::{
    convolve_model_with_irf, fit_lifetime, load_histogram, purcell_factor, DecayModelKind, Irf,
    Measurement,
};

use crate::errors::CliError;
use crate::fmt::compact_uncertain;
use crate::plot::{Figure, PALETTE};
use crate::run::Run;

pub struct Args {
    pub histogram: PathBuf,
    pub model: DecayModelKind,
    pub irf: Option<PathBuf>,
    /// Reference (unpatterned-sample) lifetime as (value, sigma), ps.
    pub tau_ref: Option<(f64, f64)>,
}

pub fn run(run: &Run, args: &Args) -> Result<(), CliError> {
    let path_str = args.histogram.display().to_string();
    let hist = load_histogram(&args.histogram)
        .map_err(|e| CliError::input(e).with("path", path_str.clone()))?;
    let irf = match &args.irf {
        Some(p) => {
            let irf_hist = load_histogram(p)
                .map_err(|e| CliError::input(e).with("path", p.display().to_string()))?;
            Irf::from_histogram(&irf_hist)
                .map_err(|e| CliError::input(e).with("path", p.display().to_string()))?
        }
        None => Irf::delta(hist.bin_width_ps()).map_err(CliError::internal)?,
    };

    let fit = fit_lifetime(&hist, &irf, args.model)
        .map_err(|e| CliError::compute(e).with("path", path_str.clone()))?;
    let report = fit.report();

    let mut results = json!({
        "fit": serde_json::to_value(&report)
            .map_err(|e| CliError::internal(format!("report serialization failed: {e}")))?,
    });
    if let Some((ref_ps, ref_sigma)) = args.tau_ref {
        let reference = Measurement::new(ref_ps, ref_sigma).map_err(CliError::input)?;
        let cavity = Measurement::new(report.tau_ps[0], report.tau_err_ps[0])
            .map_err(CliError::compute)?;
        let f_p = purcell_factor(reference, cavity).map_err(CliError::compute)?;
        results["purcell"] = json!({
            "tau_ref_ps": ref_ps,
            "tau_ref_sigma_ps": ref_sigma,
            "tau_ps": cavity.value,
            "tau_sigma_ps": cavity.sigma,
            "F_P": f_p.value,
            "F_P_sigma": f_p.sigma,
            "compact": compact_uncertain(f_p.value, f_p.sigma),
        });
    }

    let counts = hist.counts_f64();
    let model_curve = convolve_model_with_irf(&fit.model, &irf, hist.bin_centers())
        .map_err(CliError::internal)?;
    let tau_text =
        report.tau_ps.iter().map(|t| format!("{t:.1}")).collect::<Vec<_>>().join(", ");
    let mut fig = Figure::new(
        format!("decay fit: tau = {tau_text} ps"),
        "time (ps)",
        "counts",
    )
    .scatter("data", hist.bin_centers(), &counts, PALETTE[0])
    .line("fit", hist.bin_centers(), &model_curve, PALETTE[1]);
    fig.log_y = true;
    run.write_svg("decay_fit.svg", &crate::plot::render(&fig))?;

    run.write_report(
        "lifetime_report.json",
        json!({
            "histogram": path_str,
            "irf": args.irf.as_ref().map(|p| p.display().to_string()),
            "model": match args.model {
                DecayModelKind::SingleExp => "x",
                DecayModelKind::BiExp => "xx",
            },
            "tau_ref_ps": args.tau_ref.map(|(v, _)| v),
        }),
        results,
        &["decay_fit.svg"],
    )
}

pub fn parse_model(text: &str) -> Result<DecayModelKind, CliError> {
    match text {
        "x" => Ok(DecayModelKind::SingleExp),
        "xx" => Ok(DecayModelKind::BiExp),
        other => Err(CliError::input(format!(
            "unknown decay model '{other}': expected 'x' (one exponential) or 'xx' (two)"
        ))),
    }
}

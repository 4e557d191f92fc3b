//! `cbr g2`: single-photon purity from a pulsed coincidence histogram —
//! the central-window counts against the mean of the side peaks.

use std::path::Path;

use serde_json::json;

use cbr_correlation::{g2_zero, load_coincidences};

use crate::errors::CliError;
use crate::fmt::compact_uncertain;
use crate::plot::{Figure, PALETTE};
use crate::run::Run;

pub fn run(run: &Run, histogram: &Path, window_ns: f64) -> Result<(), CliError> {
    let path_str = histogram.display().to_string();
    let hist = load_coincidences(histogram)
        .map_err(|e| CliError::input(e).with("path", path_str.clone()))?;
    let result =
        g2_zero(&hist, window_ns).map_err(|e| CliError::compute(e).with("path", path_str.clone()))?;
    let report = result.report();

    let counts: Vec<f64> = hist.counts().iter().map(|&c| c as f64).collect();
    let mut fig = Figure::new(
        format!("g2(0) = {}", compact_uncertain(report.g2_0, report.err)),
        "delay (ns)",
        "coincidences",
    )
    .line("histogram", hist.delays_ns(), &counts, PALETTE[0]);
    fig.guides_x = vec![-window_ns / 2.0, window_ns / 2.0];
    run.write_svg("g2_histogram.svg", &crate::plot::render(&fig))?;

    let mut results = serde_json::to_value(&report)
        .map_err(|e| CliError::internal(format!("report serialization failed: {e}")))?;
    results["compact"] = json!(compact_uncertain(report.g2_0, report.err));
    results["central_counts"] = json!(result.central_counts);
    results["side_counts"] = json!([result.side_counts.0, result.side_counts.1]);
    run.write_report(
        "g2_report.json",
        json!({ "histogram": path_str, "window_ns": window_ns }),
        results,
        &["g2_histogram.svg"],
    )
}

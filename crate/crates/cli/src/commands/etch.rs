//! `cbr etch`: regress a multi-device tuning series — the mode-energy shift
//! per etch cycle, the quality-factor trend, the cryostat offset — and
//! optionally convert the shift into a per-cycle removal depth given a
//! solver-derived sensitivity.

use std::path::PathBuf;

use serde_json::{json, Value};

use cbr_etch::{
    estimate_removal_depth, fit_q_trend, fit_shift_per_cycle, load_series, slope_ev_to_nm,
    temperature_offset, EtchSeries, Uncertain,
};

use crate::errors::CliError;
use crate::fmt::compact_uncertain;
use crate::plot::{self, Figure, PALETTE};
use crate::run::Run;

pub struct Args {
    pub series: PathBuf,
    /// Cycles whose entry transition gets a free jump term.
    pub exclude: Vec<u32>,
    /// Mode-wavelength sensitivity to removal depth as (value, sigma), nm/nm.
    pub sensitivity: Option<(f64, f64)>,
}

/// Record count and mean mode energy (RT preferred, LT fallback), eV.
fn mean_energy(series: &EtchSeries) -> Option<f64> {
    let energies: Vec<f64> = series
        .records()
        .iter()
        .filter_map(|r| r.e_c_rt_ev.or(r.e_c_lt_ev))
        .collect();
    if energies.is_empty() {
        None
    } else {
        Some(energies.iter().sum::<f64>() / energies.len() as f64)
    }
}

pub fn run(run: &Run, args: &Args) -> Result<(), CliError> {
    let path_str = args.series.display().to_string();
    let series = load_series(&args.series)
        .map_err(|e| CliError::input(e).with("path", path_str.clone()))?;

    let (slope_ev, fit) = fit_shift_per_cycle(&series, &args.exclude)
        .map_err(|e| CliError::compute(e).with("path", path_str.clone()))?;
    let slope_sigma = fit.uncertainties()[1];
    let e_mean = mean_energy(&series)
        .ok_or_else(|| CliError::compute("series has no mode energies"))?;
    let slope_nm = slope_ev_to_nm(slope_ev, e_mean).map_err(CliError::compute)?;
    let slope_nm_sigma = slope_ev_to_nm(slope_sigma, e_mean).map_err(CliError::compute)?.abs();

    // Optional diagnostics: best-effort, absent rather than fatal when the
    // series lacks the columns they need.
    let q_trend: Value = match fit_q_trend(&series) {
        Ok((q_slope, qfit)) => json!({
            "per_cycle": q_slope,
            "sigma": qfit.uncertainties()[1],
            "compact": compact_uncertain(q_slope, qfit.uncertainties()[1]),
        }),
        Err(_) => Value::Null,
    };
    let cryostat_offset: Value = match temperature_offset(&series) {
        Ok((offset, sigma)) => json!({ "eV": offset, "sigma_eV": sigma }),
        Err(_) => Value::Null,
    };

    let mut results = json!({
        "shift_per_cycle": {
            "eV": slope_ev,
            "sigma_eV": slope_sigma,
            "meV": 1e3 * slope_ev,
            "compact_meV": compact_uncertain(1e3 * slope_ev, 1e3 * slope_sigma),
            "nm": slope_nm,
            "sigma_nm": slope_nm_sigma,
        },
        "mean_mode_energy_eV": e_mean,
        "fit": { "converged": fit.converged, "reduced_chi2": fit.reduced_chi2 },
        "q_trend": q_trend,
        "cryostat_offset": cryostat_offset,
    });
    if let Some((sens, sens_sigma)) = args.sensitivity {
        let shift = Uncertain::new(slope_nm.abs(), slope_nm_sigma).map_err(CliError::compute)?;
        let sensitivity = Uncertain::new(sens, sens_sigma).map_err(CliError::input)?;
        let depth = estimate_removal_depth(shift, sensitivity).map_err(CliError::compute)?;
        results["removal_per_cycle"] = json!({
            "nm": depth.value,
            "sigma_nm": depth.sigma,
            "compact": compact_uncertain(depth.value, depth.sigma),
            "sensitivity_nm_per_nm": sens,
        });
    }

    // Trend plot: every record as a point, plus the pooled fit line.
    let mut rt_x = Vec::new();
    let mut rt_y = Vec::new();
    let mut lt_x = Vec::new();
    let mut lt_y = Vec::new();
    for r in series.records() {
        if let Some(e) = r.e_c_rt_ev {
            rt_x.push(r.cycle as f64);
            rt_y.push(e);
        }
        if let Some(e) = r.e_c_lt_ev {
            lt_x.push(r.cycle as f64);
            lt_y.push(e);
        }
    }
    let cycle_max = series.records().iter().map(|r| r.cycle).max().unwrap_or(0) as f64;
    let line_x = plot::linspace(0.0, cycle_max, 2);
    let line_y: Vec<f64> =
        line_x.iter().map(|&c| fit.params[0] + fit.params[1] * c).collect();
    let mut fig = Figure::new(
        format!(
            "etch tuning: {} meV per cycle",
            compact_uncertain(1e3 * slope_ev, 1e3 * slope_sigma)
        ),
        "etch cycle",
        "mode energy (eV)",
    );
    if !rt_x.is_empty() {
        fig = fig.scatter("room temperature", &rt_x, &rt_y, PALETTE[0]);
    }
    if !lt_x.is_empty() {
        fig = fig.scatter("cryostat", &lt_x, &lt_y, PALETTE[2]);
    }
    fig = fig.line("pooled slope", &line_x, &line_y, PALETTE[1]);
    run.write_svg("etch_trend.svg", &plot::render(&fig))?;

    run.write_report(
        "etch_report.json",
        json!({
            "series": path_str,
            "exclude_cycles": args.exclude,
            "sensitivity_nm_per_nm": args.sensitivity.map(|(v, _)| v),
        }),
        results,
        &["etch_trend.svg"],
    )
}

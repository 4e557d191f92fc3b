//! `cbr sweep`: run the etch-depth ladder through the solver — one simulated
//! device per depth — and write the tuning table, the fitted trend plots,
//! and the wavelength-per-removal sensitivity.

use serde_json::{json, Value};

use cbr_fdtd::{etch_sweep, CbrGeometry, FdtdError, SimulationConfig};

use crate::config::FileConfig;
use crate::errors::CliError;
use crate::plot::{Figure, PALETTE};
use crate::run::Run;

pub struct Args {
    pub rings: Option<u32>,
    pub depths: usize,
    pub step_nm: f64,
    pub resolution: Option<f64>,
}

pub fn run(run: &Run, args: &Args, file_cfg: &FileConfig) -> Result<(), CliError> {
    if args.depths < 2 {
        return Err(CliError::input(format!("need at least 2 depths, got {}", args.depths)));
    }
    if !(args.step_nm.is_finite() && args.step_nm > 0.0) {
        return Err(CliError::input(format!("step must be positive, got {}", args.step_nm)));
    }
    let mut geometry = CbrGeometry::default();
    if let Some(r) = args.rings.or(file_cfg.rings) {
        geometry.n_rings = r;
    }
    let mut sim = SimulationConfig::default();
    file_cfg.apply_sim(&mut sim)?;
    if let Some(r) = args.resolution {
        if !(r.is_finite() && r > 0.0) {
            return Err(CliError::input(format!("resolution must be positive, got {r}")));
        }
        sim.resolution = r;
    }
    let deltas: Vec<f64> = (0..args.depths).map(|k| args.step_nm * k as f64).collect();

    let table = etch_sweep(&geometry, &sim, &deltas).map_err(|e| match e {
        FdtdError::PartialSweep { completed, failed_delta, source } => {
            CliError::compute(source)
                .with("failed_delta_nm", failed_delta)
                .with("completed_depths_nm", Value::from(completed))
        }
        other => CliError::compute(other),
    })?;
    let sensitivity = table.sensitivity_nm_per_nm();

    run.write_csv("sweep.csv", &table.csv_string())?;

    let x: Vec<f64> = table.rows.iter().map(|r| r.delta_nm).collect();
    let ec: Vec<f64> = table.rows.iter().map(|r| r.ec_ev).collect();
    let q: Vec<f64> = table.rows.iter().map(|r| r.q).collect();
    let mut fig = Figure::new(
        match sensitivity {
            Some(s) => format!("mode blue shift under etching: {s:.2} nm per nm removed"),
            None => "mode blue shift under etching".to_string(),
        },
        "etch depth (nm)",
        "mode energy (eV)",
    )
    .line("", &x, &ec, PALETTE[0]);
    fig.series[0].markers = true;
    run.write_svg("sweep_shift.svg", &crate::plot::render(&fig))?;

    let mut qfig = Figure::new("quality factor along the ladder", "etch depth (nm)", "Q")
        .line("", &x, &q, PALETTE[2]);
    qfig.series[0].markers = true;
    run.write_svg("sweep_q.svg", &crate::plot::render(&qfig))?;

    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            json!({
                "delta_nm": r.delta_nm,
                "Ec_eV": r.ec_ev,
                "Gamma_eV": r.gamma_ev,
                "Q": r.q,
                "Fp_peak": r.fp_peak,
                "Fp_peak_eV": r.fp_peak_ev,
            })
        })
        .collect();
    run.write_report(
        "sweep_report.json",
        json!({
            "rings": geometry.n_rings,
            "depths": args.depths,
            "step_nm": args.step_nm,
            "resolution": sim.resolution,
        }),
        json!({
            "rows": rows,
            "sensitivity_nm_per_nm": sensitivity,
        }),
        &["sweep.csv", "sweep_shift.svg", "sweep_q.svg"],
    )
}

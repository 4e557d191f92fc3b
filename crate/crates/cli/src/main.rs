//! `cbr` — desk-scale simulation and measurement analysis for etch-tuned
//! circular Bragg ("bullseye") resonators.
//!
//! One command per process: fitting resonance lines, decay histograms,
//! photon-correlation histograms, and interferometer traces; regressing etch
//! tuning series; and running the 2-D solver for single spectra or full
//! etch-depth ladders.  Artifacts (JSON report, CSV tables, SVG plots) land
//! in `--output-dir` with the seed recorded in each; errors leave as one JSON
//! line on stderr and a class-coded exit status (2 input, 3 computation,
//! 4 internal).

mod commands;
mod config;
mod errors;
mod fmt;
mod plot;
mod run;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use errors::CliError;
use run::Run;

#[derive(Parser)]
#[command(
    name = "cbr",
    version,
    about = "Etch-tuned bullseye-resonator simulation and analysis",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Seed recorded in every output.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Directory receiving all artifacts (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    output_dir: PathBuf,

    /// Worker-thread cap for the solver (0 = all cores).
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    jobs: usize,

    /// JSON file with default overrides (seed, ring count, solver grid).
    #[arg(long, global = true, value_name = "JSON")]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit the asymmetric resonance line to a reflectance spectrum.
    FitFano {
        /// Spectrum CSV (`# axis=...` header, then `axis,intensity` rows).
        spectrum: PathBuf,
        /// Fit window in eV; the dip is located automatically without it.
        #[arg(long, num_args = 2, value_names = ["LO_EV", "HI_EV"])]
        window: Option<Vec<f64>>,
    },
    /// Fit an IRF-convolved exponential decay to a TCSPC histogram.
    Lifetime {
        /// Histogram CSV (`time_ps,counts` rows).
        histogram: PathBuf,
        /// Decay model: 'x' one exponential, 'xx' two.
        #[arg(long, default_value = "x")]
        model: String,
        /// Instrument response histogram; a delta response without it.
        #[arg(long, value_name = "CSV")]
        irf: Option<PathBuf>,
        /// Reference lifetime in ps (VALUE or VALUE,SIGMA); adds the
        /// emission-rate enhancement tau_ref / tau to the report.
        #[arg(long, value_name = "PS")]
        tau_ref: Option<String>,
    },
    /// Single-photon purity from a pulsed coincidence histogram.
    G2 {
        /// Coincidence CSV (`delay_ns,counts` rows).
        histogram: PathBuf,
        /// Integration window around each pulse peak, ns.
        #[arg(long, value_name = "NS", default_value_t = cbr_correlation::DEFAULT_WINDOW_NS)]
        window_ns: f64,
    },
    /// Fit the interferometer visibility envelope for coherence times.
    Michelson {
        /// Visibility trace CSV (`delay_ps,visibility[,sigma]` rows).
        trace: PathBuf,
        /// Emitter lifetime in ps; adds the Fourier-limit ratio.
        #[arg(long, value_name = "PS")]
        lifetime_ps: Option<f64>,
    },
    /// Regress a multi-device etch tuning series.
    Etch {
        /// Series CSV (device, design, cycle, mode energies, Q).
        series: PathBuf,
        /// Cycles whose entry transition gets a free jump term.
        #[arg(long, value_delimiter = ',', value_name = "CYCLES")]
        exclude: Vec<u32>,
        /// Mode-wavelength sensitivity to removal depth in nm/nm (VALUE or
        /// VALUE,SIGMA); adds the per-cycle removal estimate.
        #[arg(long, value_name = "NM_PER_NM")]
        sensitivity: Option<String>,
    },
    /// Run the 2-D solver once and write the spectrum.
    Simulate {
        /// Which structure to drive.
        #[arg(long, value_enum, default_value = "cbr")]
        structure: commands::simulate::StructureArg,
        /// Which observable to record.
        #[arg(long, value_enum, default_value = "reflectance")]
        observable: commands::simulate::ObservableArg,
        /// Number of grating rings around the disc.
        #[arg(long, value_name = "N")]
        rings: Option<u32>,
        /// Uniform etch depth removed from the patterned surface, nm.
        #[arg(long, value_name = "NM", default_value_t = 0.0)]
        etch_nm: f64,
        /// Grid resolution, cells per wavelength in the densest medium.
        #[arg(long, value_name = "CELLS")]
        resolution: Option<f64>,
    },
    /// Run the etch-depth ladder and write the tuning table.
    Sweep {
        /// Number of grating rings around the disc.
        #[arg(long, value_name = "N")]
        rings: Option<u32>,
        /// Number of depths in the ladder (depth k is k * step).
        #[arg(long, value_name = "N", default_value_t = 15)]
        depths: usize,
        /// Ladder step, nm of material removed per rung.
        #[arg(long, value_name = "NM", default_value_t = 1.2)]
        step_nm: f64,
        /// Grid resolution, cells per wavelength in the densest medium.
        #[arg(long, value_name = "CELLS")]
        resolution: Option<f64>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::FitFano { .. } => "fit-fano",
            Command::Lifetime { .. } => "lifetime",
            Command::G2 { .. } => "g2",
            Command::Michelson { .. } => "michelson",
            Command::Etch { .. } => "etch",
            Command::Simulate { .. } => "simulate",
            Command::Sweep { .. } => "sweep",
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file_cfg = config::load(cli.config.as_deref())?;
    let seed = cli.seed.or(file_cfg.seed).unwrap_or(0);
    if cli.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .map_err(CliError::internal)?;
    }
    let run = Run::new(cli.command.name(), seed, &cli.output_dir)?;
    match cli.command {
        Command::FitFano { spectrum, window } => {
            let window = match window.as_deref() {
                Some(&[lo, hi]) => Some((lo, hi)),
                Some(_) => return Err(CliError::input("--window expects exactly two energies")),
                None => None,
            };
            commands::fano::run(&run, &spectrum, window)
        }
        Command::Lifetime { histogram, model, irf, tau_ref } => {
            let args = commands::lifetime::Args {
                histogram,
                model: commands::lifetime::parse_model(&model)?,
                irf,
                tau_ref: tau_ref
                    .as_deref()
                    .map(|t| commands::parse_value_sigma(t, "--tau-ref"))
                    .transpose()?,
            };
            commands::lifetime::run(&run, &args)
        }
        Command::G2 { histogram, window_ns } => commands::g2::run(&run, &histogram, window_ns),
        Command::Michelson { trace, lifetime_ps } => {
            commands::michelson::run(&run, &trace, lifetime_ps)
        }
        Command::Etch { series, exclude, sensitivity } => {
            let args = commands::etch::Args {
                series,
                exclude,
                sensitivity: sensitivity
                    .as_deref()
                    .map(|t| commands::parse_value_sigma(t, "--sensitivity"))
                    .transpose()?,
            };
            commands::etch::run(&run, &args)
        }
        Command::Simulate { structure, observable, rings, etch_nm, resolution } => {
            let args = commands::simulate::Args { structure, observable, rings, etch_nm, resolution };
            commands::simulate::run(&run, &args, &file_cfg)
        }
        Command::Sweep { rings, depths, step_nm, resolution } => {
            let args = commands::sweep::Args { rings, depths, step_nm, resolution };
            commands::sweep::run(&run, &args, &file_cfg)
        }
    }
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    let message = e.to_string();
                    let first = message.lines().next().unwrap_or("invalid arguments");
                    eprintln!("{}", CliError::input(first).json_line());
                    2
                }
            };
        }
    };
    // A panic past this point must still leave one JSON line and exit 4.
    let default_hook = std::panic::take_hook();
    std::panic::set_hook(Box::new(|_| {}));
    let outcome = catch_unwind(AssertUnwindSafe(|| dispatch(cli)));
    std::panic::set_hook(default_hook);
    match outcome {
        Ok(Ok(())) => 0,
        Ok(Err(err)) => {
            eprintln!("{}", err.json_line());
            err.class.exit_code()
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unexpected panic".to_string());
            eprintln!("{}", CliError::internal(message).json_line());
            4
        }
    }
}

fn main() {
    std::process::exit(real_main());
}

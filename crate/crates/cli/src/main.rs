//! `evanesce`: command-line front end for the FTIR simulator.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use evanesce_core::{Channel, Polarization};

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

impl From<evanesce_core::Error> for CliError {
    fn from(e: evanesce_core::Error) -> Self {
        if e.is_config_error() {
            CliError::Config(e.to_string())
        } else {
            CliError::Numerical(e.to_string())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SynthesisArg {
    FixedAngle,
    FixedTransverse,
}

#[derive(Debug, Parser)]
#[command(name = "evanesce", version, about = "Frustrated total internal reflection between two prisms")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every command. Any flag overrides the `--config` file.
#[derive(Debug, Args)]
pub struct Common {
    /// JSON file with any of the flag values (snake_case keys, same units).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Prism refractive index [default: 1.6]
    #[arg(long, global = true)]
    n: Option<f64>,
    /// Carrier frequency in GHz [default: 9.15]
    #[arg(long, global = true)]
    f_ghz: Option<f64>,
    /// Incidence angle in degrees [default: 45]
    #[arg(long, global = true)]
    theta_deg: Option<f64>,
    /// Gap width in mm [default: 40]
    #[arg(long, global = true)]
    d_mm: Option<f64>,
    /// te or tm [default: te]
    #[arg(long, global = true)]
    polarization: Option<Polarization>,
    /// Use c = 299792458 m/s instead of 3e8.
    #[arg(long, global = true)]
    codata: bool,
    /// Output format for the primary result.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the primary result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Prefix CSV output with a `# evanesce <version>` line.
    #[arg(long, global = true)]
    version_header: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decay constant, attenuation per mm and across the gap, wide-gap and exact transmission.
    Attenuation,
    /// Group delay, Goos-Hänchen shift and dwell time across a range of gap widths.
    Hartman(HartmanArgs),
    /// Gaussian pulse through the gap: peak delay, width, shape, amplitude.
    Pulse(PulseArgs),
    /// Gaussian beam through the gap: lateral centroid shift.
    Beam(BeamArgs),
    /// Stored energy, incident power and dwell time in the gap.
    Energy,
    /// Truncated-front pulse: signal level before light could cross the gap.
    Causality(CausalityArgs),
    /// Reference quantities: wavelength, pulse extent, critical angle, delay/shift conversion, train model.
    Inventory(InventoryArgs),
}

#[derive(Debug, Args)]
pub struct HartmanArgs {
    /// First gap width in mm [default: 5]
    #[arg(long)]
    pub d_start_mm: Option<f64>,
    /// Last gap width in mm [default: 50]
    #[arg(long)]
    pub d_stop_mm: Option<f64>,
    /// Gap step in mm [default: 1]
    #[arg(long)]
    pub d_step_mm: Option<f64>,
    /// transmission or reflection [default: transmission]
    #[arg(long)]
    pub channel: Option<Channel>,
    /// Replace the incidence angle by the one whose saturated shift is this many cm.
    #[arg(long)]
    pub tune_shift_cm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Time step in ps [default: 1/(16·carrier)]
    #[arg(long)]
    pub step_ps: Option<f64>,
    /// Time span in ns [default: 16 × FWHM, 64 × FWHM for causality]
    #[arg(long)]
    pub span_ns: Option<f64>,
    /// Keep the exact sample count instead of padding to a power of two.
    #[arg(long)]
    pub no_pad: bool,
}

#[derive(Debug, Args)]
pub struct PulseArgs {
    /// Intensity FWHM in ns [default: 16]
    #[arg(long)]
    pub fwhm_ns: Option<f64>,
    /// transmission or reflection [default: transmission]
    #[arg(long)]
    pub channel: Option<Channel>,
    #[arg(long, value_enum, default_value = "fixed-angle")]
    pub synthesis: SynthesisArg,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Also write the output time series (t_ns, field) as CSV.
    #[arg(long)]
    pub series: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BeamArgs {
    /// Beam waist in vacuum wavelengths [default: 20]
    #[arg(long)]
    pub waist_wavelengths: Option<f64>,
    /// transmission or reflection [default: reflection]
    #[arg(long)]
    pub channel: Option<Channel>,
    /// Also write the intensity profile (x_cm, intensity) as CSV.
    #[arg(long)]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CausalityArgs {
    /// Intensity FWHM in ns [default: 16]
    #[arg(long)]
    pub fwhm_ns: Option<f64>,
    /// Front position in field standard deviations from the peak [default: -3]
    #[arg(long, allow_hyphen_values = true)]
    pub front_sigmas: Option<f64>,
    /// Duration of the smooth turn-on in ns [default: 1]
    #[arg(long)]
    pub rise_ns: Option<f64>,
    #[arg(long, value_enum, default_value = "fixed-transverse")]
    pub synthesis: SynthesisArg,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct InventoryArgs {
    /// Pulse FWHM in ns for the spatial extent [default: 16]
    #[arg(long)]
    pub fwhm_ns: Option<f64>,
    /// Group delay in ps to convert into a lateral shift [default: 100]
    #[arg(long)]
    pub delay_ps: Option<f64>,
    /// Passengers in the first car [default: 16]
    #[arg(long)]
    pub train_first_car: Option<u64>,
    /// Number of cars [default: 5]
    #[arg(long)]
    pub train_cars: Option<u64>,
}

/// Rendered result plus any side files requested by flags.
pub struct Output {
    pub primary: String,
    pub side_files: Vec<(PathBuf, String)>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("EVANESCE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("EVANESCE_THREADS: expected a non-negative integer, got {raw:?}")))?;
    #[cfg(feature = "parallel")]
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("EVANESCE_THREADS: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    let file = match &cli.common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let ctx = commands::Context::new(&cli.common, &file)?;
    let out = match &cli.command {
        Command::Attenuation => commands::attenuation(&ctx)?,
        Command::Hartman(a) => commands::hartman(&ctx, a)?,
        Command::Pulse(a) => commands::pulse(&ctx, a)?,
        Command::Beam(a) => commands::beam(&ctx, a)?,
        Command::Energy => commands::energy(&ctx)?,
        Command::Causality(a) => commands::causality(&ctx, a)?,
        Command::Inventory(a) => commands::inventory(&ctx, a)?,
    };
    for (path, text) in &out.side_files {
        write_file(path, text)?;
    }
    match &cli.common.output {
        Some(path) => write_file(path, &out.primary),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(out.primary.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Numerical(format!("writing stdout: {e}")))
        }
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "polarisim",
    version,
    about = "Pump-probe spectra of vibrational polaritons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transmission, reflection, absorption and pump-probe spectra.
    Spectrum(SpectrumArgs),
    /// Complex resonances: transfer-function poles and mode-matrix eigenvalues.
    Modes(ModesArgs),
    /// Resonances and absorption while one parameter is varied.
    Sweep(SweepArgs),
    /// Compare the closed-form transmission with a time-domain simulation.
    Oracle(OracleArgs),
    /// Fit a Lorentzian lineshape or the pump fraction to measured data.
    Fit(FitArgs),
}

/// Where the model parameters come from.
#[derive(Debug, Clone, Args)]
pub struct Source {
    /// Use the built-in W(CO)6 parameter set.
    #[arg(long, conflicts_with = "config")]
    pub paper_defaults: bool,
    /// TOML parameter file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override one parameter after loading (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_name = "MIN:MAX:STEP", default_value = "1900:2070:0.01")]
    pub grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct ModesArgs {
    #[command(flatten)]
    pub source: Source,
    /// Use the damped mode-coupling matrix (requires g3_ratio = 0).
    #[arg(long)]
    pub damped: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    /// Parameter key to vary, e.g. omega_c_cm1.
    #[arg(long, value_name = "KEY")]
    pub param: String,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    /// Number of values, endpoints included.
    #[arg(long)]
    pub steps: usize,
    /// Include the transmission spectrum of every point.
    #[arg(long)]
    pub spectra: bool,
    #[arg(long, value_name = "MIN:MAX:STEP", default_value = "1900:2070:0.01")]
    pub grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, value_name = "MIN:MAX:STEP", default_value = "1930:2040:0.5")]
    pub grid: String,
    /// RK4 step, internal time units.
    #[arg(long, default_value_t = 5e-4)]
    pub dt: f64,
    /// Integration window, internal time units.
    #[arg(long, default_value_t = 12.0)]
    pub t_end: f64,
    /// Rotating-frame frequency in cm^-1 (default: omega_0).
    #[arg(long)]
    pub frame: Option<f64>,
    /// Also write the time-domain trajectory.
    #[arg(long)]
    pub trajectory: bool,
}

#[derive(Debug, Clone, Args)]
#[command(group = clap::ArgGroup::new("model").required(true).args(["lorentzian", "fpu"]))]
pub struct FitArgs {
    #[command(flatten)]
    pub source: Source,
    /// CSV with columns wavenumber_cm1,value.
    #[arg(long, value_name = "CSV")]
    pub data: PathBuf,
    /// Fit baseline + Lorentzian to a bare absorption band.
    #[arg(long)]
    pub lorentzian: bool,
    /// Fit f_pu to a measured differential transmission.
    #[arg(long)]
    pub fpu: bool,
    /// Upper bound of the f_pu search.
    #[arg(long, default_value_t = 0.5)]
    pub fpu_max: f64,
}

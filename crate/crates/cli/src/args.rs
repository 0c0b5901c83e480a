use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use optomech_core::GridSpec;

#[derive(Parser, Debug)]
#[command(
    name = "optomech",
    version,
    about = "Stationary entanglement of two radiation-pressure-coupled mirror modes"
)]
pub struct Cli {
    /// Worker threads for sweeps and verification (default: all cores).
    #[arg(long, global = true, env = "OPTOMECH_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate the densities and E at one frequency and temperature.
    Eval(EvalArgs),
    /// Write the E(omega, T) grid for mismatch 0, 10 or 20 rad/s as CSV.
    Figure(FigureArgs),
    /// Sweep E over a custom grid, or scan the drive power with --power-multipliers.
    Sweep(SweepArgs),
    /// Compare the closed-form densities with the matrix oracle on random draws.
    Verify(VerifyArgs),
    /// Print the semiclassical working point.
    SteadyState(SteadyStateArgs),
}

#[derive(Args, Debug)]
pub struct ConfigArg {
    /// Configuration file (`key = value unit` lines); defaults to the built-in baseline.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Fourier frequency, rad/s.
    #[arg(long, allow_negative_numbers = true)]
    pub omega: f64,
    /// Bath temperature, K (default: the configured temperature).
    #[arg(long, allow_negative_numbers = true)]
    pub temp: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct GridArgs {
    #[arg(long)]
    pub omega_center: Option<f64>,
    #[arg(long)]
    pub omega_halfwidth: Option<f64>,
    #[arg(long)]
    pub omega_points: Option<usize>,
    #[arg(long)]
    pub t_min: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub t_points: Option<usize>,
}

impl GridArgs {
    pub fn apply(&self, mut grid: GridSpec) -> GridSpec {
        if self.omega_center.is_some() {
            grid.omega_center = self.omega_center;
        }
        if let Some(v) = self.omega_halfwidth {
            grid.omega_halfwidth = v;
        }
        if let Some(v) = self.omega_points {
            grid.omega_points = v;
        }
        if let Some(v) = self.t_min {
            grid.t_min = v;
        }
        if let Some(v) = self.t_max {
            grid.t_max = v;
        }
        if let Some(v) = self.t_points {
            grid.t_points = v;
        }
        grid
    }
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// 2, 3 or 4: mechanical mismatch 0, 10 or 20 rad/s.
    pub figure: u8,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Output file; a summary goes to stdout either way.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Sets Ω2 = Ω1 + mismatch (rad/s) before sweeping.
    #[arg(long)]
    pub mismatch: Option<f64>,
    /// Comma-separated input-power multipliers; switches to a power scan at the configured T.
    #[arg(long, value_delimiter = ',')]
    pub power_multipliers: Option<Vec<f64>>,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, default_value_t = optomech_core::verify::DEFAULT_DRAWS)]
    pub draws: usize,
    #[arg(long, default_value_t = optomech_core::verify::DEFAULT_SEED)]
    pub seed: u64,
    /// Largest accepted relative error per quantity.
    #[arg(long, default_value_t = optomech_core::verify::DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Scale one closed-form quantity before comparing, as `name=factor`.
    #[arg(long, hide = true)]
    pub corrupt: Option<String>,
}

#[derive(Args, Debug)]
pub struct SteadyStateArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Also solve for the effective detuning reached from this bare detuning (rad/s).
    #[arg(long, allow_negative_numbers = true)]
    pub bare_detuning: Option<f64>,
}

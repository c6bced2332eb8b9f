use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "decoh",
    version,
    about = "Error and decoherence of a particle bouncing off a quantum wall"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Overlap with the fixed-wall outgoing state and its optimum over λ.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Error(ErrorArgs),
    /// Largest eigenvalue and leading spectrum of the reduced kernel.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Entangle(EntangleArgs),
    /// One row of derived quantities per point of a parameter range.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Sweep(SweepArgs),
    /// Runs every numerical oracle against its closed form.
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Verify(VerifyArgs),
    /// Thermal packet size, kσ estimate and multi-collision budget (SI).
    #[command(args_override_self = true, allow_negative_numbers = true)]
    Thermal(ThermalArgs),
}

/// Wall spread: a length or `auto` for the matched value `σ√(δ/γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpreadArg {
    Auto,
    Value(f64),
}

impl FromStr for SpreadArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SpreadArg::Auto);
        }
        s.parse::<f64>()
            .map(SpreadArg::Value)
            .map_err(|_| format!("expected a number or `auto`, got `{s}`"))
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct PhysicsArgs {
    /// Particle mass m.
    #[arg(long = "m")]
    pub m: Option<f64>,
    /// Wall mass M.
    #[arg(long = "M")]
    pub big_m: Option<f64>,
    /// Particle packet spread σ.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Wall packet spread Σ, or `auto` for the matched spread.
    #[arg(long = "Sigma")]
    pub big_sigma: Option<SpreadArg>,
    /// Particle wavenumber k.
    #[arg(long)]
    pub k: Option<f64>,
    /// Spread ratio λ = Σ²/σ² (instead of --Sigma).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// kσ (instead of --k).
    #[arg(long)]
    pub ksigma: Option<f64>,
    /// Mass fraction δ = m/(M+m) (instead of --m and --M).
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file whose entries act as flags; explicit flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ErrorArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct EntangleArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Number of spectrum entries to report.
    #[arg(long, default_value_t = 5)]
    pub spectrum: usize,
    /// Also compute F₀ with the SVD oracle.
    #[arg(long)]
    pub oracle: bool,
    /// Base points per axis for the oracle grid.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    Lambda,
    #[value(name = "k_sigma", alias = "ksigma")]
    KSigma,
    Delta,
    W,
    #[value(name = "T")]
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub param: SweepParam,
    #[arg(long)]
    pub start: f64,
    #[arg(long)]
    pub stop: f64,
    #[arg(long)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Scale::Linear)]
    pub scale: Scale,
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Body mass in kg, for `--param T`.
    #[arg(long = "mu-kg")]
    pub mu_kg: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,
    /// Base points per axis for the oracle grids.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Override the tolerance of the quadrature checks.
    #[arg(long = "tol-quadrature")]
    pub tol_quadrature: Option<f64>,
    /// Directory for CSV dumps of the sampled state and kernel matrix.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ThermalArgs {
    /// Body mass in kg.
    #[arg(long = "mu-kg")]
    pub mu_kg: Option<f64>,
    /// Temperature in K.
    #[arg(long = "T")]
    pub temperature: f64,
    /// Report the length scale ħc/k_B T only.
    #[arg(long = "report-length-scale")]
    pub report_length_scale: bool,
    /// Number of collisions for the amplitude budget.
    #[arg(long)]
    pub collisions: Option<usize>,
    /// Largest eigenvalue per collision for the budget.
    #[arg(long = "F0")]
    pub f0: Option<f64>,
    /// Mass fraction δ for the per-collision error estimate.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Particle mass (for δ, with --M).
    #[arg(long = "m")]
    pub m: Option<f64>,
    /// Wall mass (for δ, with --m).
    #[arg(long = "M")]
    pub big_m: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

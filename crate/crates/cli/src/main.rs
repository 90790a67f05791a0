//! `heatwit` command-line tool.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heatwit_core::ModelKind;

#[derive(Parser, Debug)]
#[command(
    name = "heatwit",
    version,
    about = "Spin-chain heat capacities, separable bounds and entanglement witnesses"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; tables default to CSV, reports to JSON.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Recorded in JSON outputs; eigencheck also uses it to seed restarts.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Boltzmann constant used to convert temperatures and heat capacities
    /// at input and output; the computation itself runs with k = 1.
    #[arg(long = "k", global = true, default_value_t = 1.0)]
    pub boltzmann: f64,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, default_value = "ising", value_parser = parse_model)]
    pub model: ModelKind,
    /// Number of sites on the ring.
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
    pub coupling: f64,
    /// Transverse field (Ising only).
    #[arg(long = "B", default_value_t = 0.0, allow_negative_numbers = true)]
    pub field: f64,
    /// Spin magnitude for the XXX ring: 1/2 or 1.
    #[arg(long, default_value = "1/2")]
    pub spin: String,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    #[arg(long, default_value_t = 0.05)]
    pub tmin: f64,
    #[arg(long, default_value_t = 5.0)]
    pub tmax: f64,
    /// Geometric grid size; defaults to 200 points per decade.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// U, C and log Z per site from exact diagonalization.
    Thermo {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Minimal product-state variance (Ising) or energy (XXX, XX) per site.
    Sepbound {
        #[arg(long, default_value = "ising", value_parser = parse_model)]
        model: ModelKind,
        /// A single field or a range `start:stop:count`.
        #[arg(long = "B", allow_negative_numbers = true)]
        field: Option<String>,
        /// Field range `start:stop`, sampled with --B-points values.
        #[arg(long = "B-range")]
        field_range: Option<String>,
        #[arg(long = "B-points", default_value_t = 50)]
        field_points: usize,
        #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
        coupling: f64,
        /// Translation period of the ansatz: 1, 2 or 4.
        #[arg(long, default_value_t = 2)]
        period: usize,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value = "1/2")]
        spin: String,
    },
    /// Infinite-chain closed forms.
    Analytic {
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long = "B", default_value_t = 1.0, allow_negative_numbers = true)]
        field: f64,
        #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
        coupling: f64,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Compare a heat-capacity curve with a separable bound.
    Witness(WitnessArgs),
    /// Critical temperature of the variance witness across fields.
    Region {
        /// Fields as `start:stop:count`.
        #[arg(long = "B", default_value = "0.25:3:12")]
        fields: String,
        #[arg(long = "J", default_value_t = 1.0, allow_negative_numbers = true)]
        coupling: f64,
        #[arg(long, default_value_t = 0.01)]
        tmin: f64,
        #[arg(long, default_value_t = 20.0)]
        tmax: f64,
        #[arg(long, default_value_t = 133)]
        points: usize,
    },
    /// Search every eigenspace of the Ising ring for product states.
    Eigencheck {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long = "B", default_value_t = 1.0, allow_negative_numbers = true)]
        field: f64,
        #[arg(long, default_value_t = 64)]
        restarts: usize,
        /// Absolute tolerance for grouping levels; default 1e-9·‖H‖.
        #[arg(long)]
        degeneracy_tol: Option<f64>,
    },
    /// Data behind the published figures.
    Repro {
        #[arg(value_enum)]
        figure: Figure,
    },
    /// Dense Hamiltonian as row-major CSV.
    Matrix {
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Check a JSON document written by this tool.
    Validate {
        input: PathBuf,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    /// Infinite transverse Ising heat capacity per spin.
    Katsura,
    /// Infinite XX chain internal energy per spin.
    Xx,
    /// Low-temperature form of the XX energy.
    XxLowT,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Minimal variance per site versus field.
    Fig1,
    /// Critical temperature versus field.
    Fig2,
    /// Heat capacity at B = 2 with the variance bound.
    Fig3,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundArg {
    Variance,
    Gapless,
    Gapped,
}

#[derive(Args, Debug)]
pub struct WitnessArgs {
    #[arg(long, value_enum, default_value = "variance")]
    pub bound: BoundArg,
    /// Explicit variance bound; computed from the model field otherwise.
    #[arg(long)]
    pub constant: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub e0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eb: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
    #[arg(long)]
    pub gap: Option<f64>,
    /// `ed`, `katsura` or `file=PATH` (CSV with columns `T,C[,sigma_C]`).
    #[arg(long, default_value = "katsura")]
    pub curve: String,
    /// Upper temperature of the approximation's validity window.
    #[arg(long)]
    pub validity: Option<f64>,
    /// Also write the per-temperature margins as CSV.
    #[arg(long)]
    pub margins: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse::<ModelKind>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                e.exit();
            }
            let err = commands::CliError::Usage(e.to_string().trim().to_string());
            err.report();
            return ExitCode::from(err.exit_code());
        }
    };
    if let Err(err) = commands::configure_threads() {
        err.report();
        return ExitCode::from(err.exit_code());
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            err.report();
            ExitCode::from(err.exit_code())
        }
    }
}

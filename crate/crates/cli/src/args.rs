use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use liouville_core::criterion::Method;

#[derive(Debug, Parser)]
#[command(
    name = "liouville",
    version,
    about = "Liouville-type criteria, sharp counterexamples and blow-up checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration for the chosen command.
    #[arg(long, global = true)]
    pub spec: Option<PathBuf>,
    /// Bundled problem instead of `--spec`.
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// Output directory for report.json and CSV files.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seed recorded in every report and used by randomized commands.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Main tolerance of the command (quadrature, residual or weak-form).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Grid size override (samples per ladder step, or tabulation nodes).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    EssInf,
    Hoelder,
    EssInfF,
    HoelderF,
    Series,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::EssInf => Method::EssInf,
            MethodArg::Hoelder => Method::Hoelder,
            MethodArg::EssInfF => Method::EssInfF,
            MethodArg::HoelderF => Method::HoelderF,
            MethodArg::Series => Method::Series,
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Divergence test of the criterion integral or series.
    Criterion {
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Builds and certifies the sharp counterexample.
    Counterexample,
    /// Weak-form and Hölder-chain checks on counterexample data.
    Verify,
    /// Blow-up recurrence for the ball functional.
    Proofsim,
    /// Randomized check of the averaging inequality.
    Averaging,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Criterion { .. } => "criterion",
            Command::Counterexample => "counterexample",
            Command::Verify => "verify",
            Command::Proofsim => "proofsim",
            Command::Averaging => "averaging",
        }
    }
}

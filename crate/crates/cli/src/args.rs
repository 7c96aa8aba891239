use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sgp4_batch::Precision;

#[derive(Debug, Parser)]
#[command(name = "sgp4-batch", version, about = "Batch SGP4 near-Earth propagation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One TLE, one or more times: state vectors as CSV.
    Propagate(PropagateArgs),
    /// Every TLE in a file at every time: CSV rows or a binary grid dump.
    Batch(BatchArgs),
    /// 6×7 Jacobian of the state with respect to the mean elements (64-bit).
    Jacobian(JacobianArgs),
    /// Single- versus double-precision drift percentiles over a time grid.
    PrecisionReport(ReportArgs),
    /// Timed scaling sweep along one grid axis.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrecisionArg {
    #[value(name = "32")]
    P32,
    #[value(name = "64")]
    P64,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::P32 => Precision::Single,
            PrecisionArg::P64 => Precision::Double,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    #[value(name = "N", alias = "n")]
    N,
    #[value(name = "M", alias = "m")]
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitArg {
    /// Initialization plus propagation.
    Full,
    /// Propagation of a pre-initialized batch.
    Propagate,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// TLE file with 2- or 3-line records, or '-' for stdin.
    pub input: PathBuf,
    /// Reject lines with bad checksums or lengths instead of warning.
    #[arg(long)]
    pub strict: bool,
    /// Output path, '-' for stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct Workers {
    /// Worker threads [default: available cores].
    #[arg(long, env = "SGP4_BATCH_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: Option<u32>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct Times {
    /// Time range START:STOP:STEP in minutes since epoch, STOP inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub tsince: Option<String>,
    /// Comma-separated minutes since epoch.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub tsince_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct TimesOrUtc {
    /// Time range START:STOP:STEP in minutes since epoch, STOP inclusive.
    #[arg(long, allow_hyphen_values = true)]
    pub tsince: Option<String>,
    /// Comma-separated minutes since epoch.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub tsince_list: Option<Vec<f64>>,
    /// Comma-separated UTC instants (YYYY-MM-DDTHH:MM:SS[.f][Z]), converted
    /// to minutes since the TLE epoch in 64-bit. Requires --precision 64.
    #[arg(long, value_delimiter = ',')]
    pub utc: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub times: TimesOrUtc,
    #[arg(long, value_enum, default_value = "64")]
    pub precision: PrecisionArg,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub times: Times,
    #[arg(long, value_enum, default_value = "64")]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct JacobianArgs {
    #[command(flatten)]
    pub common: Common,
    /// Exactly one time, in minutes since epoch or as UTC.
    #[command(flatten)]
    pub times: TimesOrUtc,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 14.0)]
    pub horizon_days: f64,
    #[arg(long, default_value_t = 90.0)]
    pub step_min: f64,
    #[command(flatten)]
    pub workers: Workers,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Base catalogue; satellites are drawn from it cyclically.
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Strictly increasing sizes along the axis, comma-separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Size of the other axis.
    #[arg(long, default_value_t = 100)]
    pub fixed: usize,
    #[arg(long, value_enum, default_value = "64")]
    pub precision: PrecisionArg,
    #[arg(long, value_enum, default_value = "full")]
    pub unit: UnitArg,
    #[arg(long, default_value = "bench")]
    pub label: String,
    #[command(flatten)]
    pub workers: Workers,
}

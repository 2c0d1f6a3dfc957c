use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "puf-trng",
    version,
    about = "Arbiter PUF driven NFSR random bit generator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Manage simulated PUF instances.
    Puf {
        #[command(subcommand)]
        action: PufCommand,
    },
    /// Generate a bit stream from a PUF instance.
    Generate(GenerateArgs),
    /// Run the NIST battery and/or the ent metrics over a stream.
    Test(TestArgs),
    /// Known-answer vectors, oracle equivalences and p-value range checks.
    Selftest(SelftestArgs),
    /// Inspect test reports.
    Report {
        #[command(subcommand)]
        action: ReportCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum PufCommand {
    /// Sample a new instance and write it as JSON.
    New(PufNewArgs),
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Print a summary of a test report.
    Show { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct PufNewArgs {
    #[arg(long, default_value_t = 128)]
    pub stages: usize,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_process: f64,
    #[arg(long, default_value_t = 0.05)]
    pub sigma_noise: f64,
    /// Extra delay `e` in front of each arbiter.
    #[arg(long, default_value_t = 0.02)]
    pub arbiter_offset: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Debug, Args)]
pub struct GenerateArgs {
    /// Replay a run manifest. Other flags except --out are ignored.
    #[arg(long, conflicts_with_all = ["instance", "bits"])]
    pub manifest: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    pub instance: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    pub bits: Option<u64>,
    /// Comma-separated feedback taps. Defaults to 128,126,101,99.
    #[arg(long, value_delimiter = ',')]
    pub taps: Option<Vec<usize>>,
    /// Initial register contents in hex.
    #[arg(long, default_value = "0x1")]
    pub register_seed: String,
    #[arg(long, default_value_t = 0)]
    pub noise_seed: u64,
    #[arg(long, default_value_t = 1000)]
    pub max_evaluations_per_bit: u64,
    #[arg(long, required_unless_present = "manifest")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Battery {
    Nist,
    Ent,
    All,
}

impl Battery {
    pub fn nist(self) -> bool {
        matches!(self, Battery::Nist | Battery::All)
    }

    pub fn ent(self) -> bool {
        matches!(self, Battery::Ent | Battery::All)
    }
}

#[derive(Clone, Debug, Args)]
pub struct TestArgs {
    /// Replay a run manifest. Other flags except --report are ignored.
    #[arg(long, conflicts_with = "input")]
    pub manifest: Option<PathBuf>,
    #[arg(long, required_unless_present = "manifest")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Battery::All)]
    pub battery: Battery,
    /// True bit length of a raw byte file without a sidecar.
    #[arg(long)]
    pub bits_exact: Option<u64>,
    /// Bits per NIST sequence. Defaults to 10^6, or the whole input if shorter.
    #[arg(long)]
    pub sequence_length: Option<usize>,
    /// Number of NIST sequences. Defaults to as many as fit.
    #[arg(long)]
    pub sequences: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct SelftestArgs {
    /// Replace the built-in known-answer table.
    #[arg(long)]
    pub kat_file: Option<PathBuf>,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use covertop_core::ComplexKind;

#[derive(Debug, Parser)]
#[command(name = "covertop", version, about = "Coverage analysis for sensor networks with uncertain locations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a uniformly random network.
    Generate(GenerateArgs),
    /// Edge and face appearance probabilities as exact fractions.
    Probabilities(ProbabilitiesArgs),
    /// Probability that an instance covers the whole domain.
    Coverage(CoverageArgs),
    /// Betti numbers of one instance's complex.
    Betti(BettiArgs),
    /// Drop sensors that the anchor layout does not need.
    Sparsify(SparsifyArgs),
    /// Run the HTTP API, optionally serving a static web UI.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Rips,
    Cech,
}

impl From<KindArg> for ComplexKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Rips => ComplexKind::Rips,
            KindArg::Cech => ComplexKind::Cech,
        }
    }
}

/// Network input. Files ending in `.csv` are read as anchor lists; their
/// locations are drawn with `--csv-k`, `--csv-eps` and the seed.
#[derive(Debug, Args)]
pub struct Input {
    #[arg(long = "in", value_name = "FILE")]
    pub path: PathBuf,
    #[arg(long, default_value_t = 8)]
    pub csv_k: usize,
    #[arg(long, default_value_t = 10.0)]
    pub csv_eps: f64,
    #[arg(long, env = "COVERTOP_SEED", default_value_t = 0)]
    pub csv_seed: u64,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub k: usize,
    #[arg(long, default_value_t = 50.0)]
    pub rc: f64,
    #[arg(long, default_value_t = 10.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 500.0)]
    pub width: f64,
    /// Defaults to the width.
    #[arg(long)]
    pub height: Option<f64>,
    #[arg(long, env = "COVERTOP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbabilitiesArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, value_enum, default_value_t = KindArg::Rips)]
    pub kind: KindArg,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoverageArgs {
    #[command(flatten)]
    pub input: Input,
    #[arg(long, default_value_t = covertop_core::probability::DEFAULT_SAMPLES)]
    pub samples: u64,
    /// Grid spacing; defaults to r_c / 4.
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long, env = "COVERTOP_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BettiArgs {
    #[command(flatten)]
    pub input: Input,
    /// `anchors`, or `sample:SEED` for one random instance.
    #[arg(long, default_value = "anchors")]
    pub instance: InstanceArg,
    #[arg(long, value_enum, default_value_t = KindArg::Cech)]
    pub kind: KindArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceArg {
    Anchors,
    Sample(u64),
}

impl std::str::FromStr for InstanceArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "anchors" {
            return Ok(InstanceArg::Anchors);
        }
        s.strip_prefix("sample:")
            .and_then(|seed| seed.parse().ok())
            .map(InstanceArg::Sample)
            .ok_or_else(|| format!("expected `anchors` or `sample:SEED`, got `{s}`"))
    }
}

#[derive(Debug, Args)]
pub struct SparsifyArgs {
    #[command(flatten)]
    pub input: Input,
    /// Grid spacing; defaults to r_c / 4.
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: std::net::IpAddr,
    /// Directory with the web UI build.
    #[arg(long = "static", value_name = "DIR")]
    pub static_dir: Option<PathBuf>,
    /// Seed for the network of each new session.
    #[arg(long, env = "COVERTOP_SEED", default_value_t = 0)]
    pub seed: u64,
}

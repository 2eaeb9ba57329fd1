//! Batch subcommands. Each returns the document it produced so the caller
//! decides between a file and stdout.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use covertop_core::interface::{complex_json, load_csv, load_json, save_json, CsvOptions, FormatError};
use covertop_core::{
    betti_numbers, build_complex, build_probabilistic_complex, estimate_global_coverage,
    generate_random, sparsify, BettiNumbers, ComplexKind, CoverageVerdict, Domain, NetworkConfig,
    NetworkError, NetworkInstance, TopologyError,
};
use serde::Serialize;
use thiserror::Error;

use crate::cli::{BettiArgs, CoverageArgs, GenerateArgs, Input, InstanceArg, ProbabilitiesArgs, SparsifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Format { path: PathBuf, source: FormatError },
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("server error: {0}")]
    Serve(io::Error),
}

impl CliError {
    /// 2 for problems with the invocation itself (including an unreadable
    /// input file), 1 for everything that fails afterwards.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } => 2,
            _ => 1,
        }
    }
}

/// Reads a network from JSON, or from CSV when the file name ends in `.csv`.
pub fn load_input(input: &Input) -> Result<(NetworkConfig, Vec<String>), CliError> {
    let text = fs::read_to_string(&input.path).map_err(|source| CliError::Read { path: input.path.clone(), source })?;
    let format_err = |source| CliError::Format { path: input.path.clone(), source };
    let is_csv = input.path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        let options = CsvOptions { k: input.csv_k, eps: input.csv_eps, seed: input.csv_seed, rc: None };
        let load = load_csv(&text, &options).map_err(format_err)?;
        Ok((load.config, load.warnings))
    } else {
        Ok((load_json(&text).map_err(format_err)?, Vec::new()))
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write { path: p.to_owned(), source }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

pub fn generate(args: &GenerateArgs) -> Result<String, CliError> {
    let domain = Domain::new(0.0, 0.0, args.width, args.height.unwrap_or(args.width))?;
    let config = generate_random(args.n, args.k, args.rc, args.eps, domain, args.seed)?;
    Ok(save_json(&config))
}

pub fn probabilities(config: &NetworkConfig, args: &ProbabilitiesArgs) -> String {
    let pc = build_probabilistic_complex(config, args.kind.into());
    complex_json(config, &pc)
}

pub fn coverage(config: &NetworkConfig, args: &CoverageArgs) -> Result<String, CliError> {
    let resolution = args.resolution.unwrap_or(config.rc() / 4.0);
    let estimate = estimate_global_coverage(config, args.samples, resolution, args.seed)?;
    Ok(serde_json::to_string_pretty(&estimate).expect("estimates serialize"))
}

#[derive(Debug, Serialize)]
pub struct BettiReport {
    pub kind: ComplexKind,
    pub instance: String,
    #[serde(flatten)]
    pub betti: BettiNumbers,
    /// Only for Čech complexes, where b1 decides coverage holes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<CoverageVerdict>,
}

pub fn betti(config: &NetworkConfig, args: &BettiArgs) -> Result<String, CliError> {
    let (instance, label) = match args.instance {
        InstanceArg::Anchors => (NetworkInstance::anchors(config), "anchors".to_string()),
        InstanceArg::Sample(seed) => (NetworkInstance::seeded(config, seed), format!("sample:{seed}")),
    };
    let kind: ComplexKind = args.kind.into();
    let cx = build_complex(&instance.point_map(), config.rc(), kind);
    let betti = betti_numbers(&cx)?;
    let verdict = (kind == ComplexKind::Cech).then_some(if betti.b1 == 0 {
        CoverageVerdict::CertifiedNoHoles
    } else {
        CoverageVerdict::HolesPresent
    });
    let report = BettiReport { kind, instance: label, betti, verdict };
    Ok(serde_json::to_string(&report).expect("reports serialize"))
}

/// The sparsified network and a one-line summary.
pub fn sparsify_network(config: &NetworkConfig, args: &SparsifyArgs) -> Result<(String, String), CliError> {
    let resolution = args.resolution.unwrap_or(config.rc() / 4.0);
    let sparse = sparsify(config, resolution)?;
    let summary = format!("kept {} of {} sensors", sparse.len(), config.len());
    Ok((save_json(&sparse), summary))
}

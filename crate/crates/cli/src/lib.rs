//! The `covertop` command-line tool and HTTP service.

pub mod cli;
pub mod commands;
pub mod http;

use std::net::SocketAddr;
use std::sync::Arc;

use covertop_core::interface::SessionStore;

use crate::cli::{Command, ServeArgs};
use crate::commands::{write_output, CliError};

/// Runs one subcommand to completion.
pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => write_output(args.out.as_deref(), &commands::generate(&args)?),
        Command::Probabilities(args) => {
            let config = load(&args.input)?;
            write_output(args.out.as_deref(), &commands::probabilities(&config, &args))
        }
        Command::Coverage(args) => {
            let config = load(&args.input)?;
            write_output(args.out.as_deref(), &commands::coverage(&config, &args)?)
        }
        Command::Betti(args) => {
            let config = load(&args.input)?;
            write_output(None, &commands::betti(&config, &args)?)
        }
        Command::Sparsify(args) => {
            let config = load(&args.input)?;
            let (doc, summary) = commands::sparsify_network(&config, &args)?;
            eprintln!("{summary}");
            write_output(args.out.as_deref(), &doc)
        }
        Command::Serve(args) => serve(&args),
    }
}

fn load(input: &cli::Input) -> Result<covertop_core::NetworkConfig, CliError> {
    let (config, warnings) = commands::load_input(input)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    Ok(config)
}

fn serve(args: &ServeArgs) -> Result<(), CliError> {
    let runtime = tokio::runtime::Runtime::new().map_err(CliError::Serve)?;
    runtime.block_on(async {
        let addr = SocketAddr::new(args.host, args.port);
        let listener = tokio::net::TcpListener::bind(addr).await.map_err(CliError::Serve)?;
        let app = http::app(Arc::new(SessionStore::new()), args.seed, args.static_dir.as_deref());
        eprintln!("listening on http://{}", listener.local_addr().map_err(CliError::Serve)?);
        axum::serve(listener, app).await.map_err(CliError::Serve)
    })
}

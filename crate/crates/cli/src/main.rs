use std::io::IsTerminal;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::Parser;
use coopq_cli::{run_repl, Backend, LocalBackend, RemoteBackend, ReplOptions};
use coopq_core::parser::{SessionDefaults, GRAMMAR};
use coopq_server::load_kb_file;

/// Ask about flights and get cooperative answers.
#[derive(Debug, Parser)]
#[command(name = "coopq", version, after_help = GRAMMAR)]
struct Args {
    /// Knowledge base file. COOPQ_KB, when set, takes precedence.
    #[arg(long)]
    kb: Option<PathBuf>,
    /// Run the HTTP service on this port instead of a REPL.
    #[arg(long, value_name = "PORT", conflicts_with = "connect")]
    serve: Option<u16>,
    /// Use a running service instead of a local engine.
    #[arg(long, value_name = "URL")]
    connect: Option<String>,
    /// Print query frames and NP semantics after each answer.
    #[arg(long)]
    trace: bool,
    /// Origin assumed when a question has no `from <CITY>`.
    #[arg(long, default_value = "Sydney")]
    home_city: String,
}

fn kb_path(args: &Args) -> anyhow::Result<PathBuf> {
    match std::env::var_os("COOPQ_KB") {
        Some(path) if !path.is_empty() => Ok(PathBuf::from(path)),
        _ => args.kb.clone().context("no knowledge base: pass --kb <path> or set COOPQ_KB"),
    }
}

fn main() -> anyhow::Result<()> {
    let args = Args::parse();
    let defaults = SessionDefaults {
        home_city: args.home_city.clone(),
    };

    if let Some(port) = args.serve {
        tracing_subscriber::fmt()
            .with_env_filter(
                tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
            )
            .init();
        let path = kb_path(&args)?;
        let runtime = tokio::runtime::Runtime::new()?;
        runtime.block_on(coopq_server::serve(&path, port, defaults))?;
        return Ok(());
    }

    let mut backend: Box<dyn Backend> = match &args.connect {
        Some(url) => Box::new(RemoteBackend::connect(url, Some(&args.home_city))?),
        None => {
            let path = kb_path(&args)?;
            let kb = Arc::new(load_kb_file(&path)?);
            match LocalBackend::new(kb, defaults) {
                Ok(b) => Box::new(b),
                Err(e) => bail!("{e} in {}", path.display()),
            }
        }
    };
    let stdin = std::io::stdin();
    let options = ReplOptions {
        trace: args.trace,
        prompt: stdin.is_terminal(),
    };
    run_repl(backend.as_mut(), stdin.lock(), std::io::stdout().lock(), &options)
}

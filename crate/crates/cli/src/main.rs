mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Common};
use output::{Header, Output};

/// Exit 1 for bad input, 2 for anything that should not happen.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Internal(String),
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

pub struct Context {
    pub common: Common,
    pub rng_seed: u64,
    pub out: Output,
}

fn load_config(common: Common) -> Result<Common, Failure> {
    let Some(path) = common.config.clone() else {
        return Ok(common);
    };
    let text = output::read_text(&path)?;
    let file: Common = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("config {}: {e}", path.display())))?;
    Ok(common.merge(file))
}

/// Settings that determine the results; output location and thread count
/// do not.
fn digest_input(common: &Common, command: &args::Command) -> serde_json::Value {
    let mut c = common.clone();
    c.out = None;
    c.threads = None;
    c.reproducible = false;
    serde_json::json!({ "command": command, "common": c })
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = load_config(cli.common)?;
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Failure::Input("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Internal(e.to_string()))?;
    }
    let rng_seed = common.rng_seed.unwrap_or(0);
    let header = Header::new(cli.command.name(), &digest_input(&common, &cli.command), rng_seed, common.reproducible);
    let out = Output::new(common.out.clone().unwrap_or_else(|| ".".into()), header)?;
    let mut ctx = Context { common, rng_seed, out };
    commands::run(&mut ctx, &cli.command)?;
    for p in ctx.out.written() {
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
    }
}

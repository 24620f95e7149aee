//! `qclock`: simulate quantile clocks, sample their laws, design drivers,
//! price options and run the acceptance checks from a TOML config.
//!
//! Exit codes: 0 success, 2 config error, 3 numeric error, 4 verification failure.

mod config;
mod run;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, ConfigError};
use run::RunError;

#[derive(Parser)]
#[command(name = "qclock", version, about = "Quantile clocks driven by subordinators")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores. Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; overrides `[output] path`. Standard output when neither is set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Clock paths on a grid, optionally with log prices.
    Simulate,
    /// Independent draws of a clock marginal, a GGC variable or a Dirichlet mean.
    Sample,
    /// Design a driving subordinator for a target marginal.
    Design,
    /// Price a European call.
    Price,
    /// Run the acceptance criteria.
    Verify,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Simulate => Command::Simulate,
            Cmd::Sample => Command::Sample,
            Cmd::Design => Command::Design,
            Cmd::Price => Command::Price,
            Cmd::Verify => Command::Verify,
        }
    }
}

fn real_main(cli: Cli) -> Result<(), RunError> {
    let Some(path) = &cli.config else {
        return Err(ConfigError::Invalid("--config <path> is required".into()).into());
    };
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Parse(format!("{}: {e}", path.display())))?;
    let mut cfg = config::parse_config(&text, cli.command.into(), cli.seed)?;
    if let Some(out) = &cli.out {
        cfg.output.path = Some(out.display().to_string());
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(ConfigError::Invalid("--threads must be positive".into()).into());
        }
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let outcome = run::execute(&cfg)?;
    for line in &outcome.console {
        if cfg.command == Command::Verify {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    match &cfg.output.path {
        Some(p) => std::fs::write(p, &outcome.body).map_err(|source| RunError::Io { path: p.clone(), source })?,
        None if cfg.command == Command::Verify => {}
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(outcome.body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| RunError::Io { path: "standard output".into(), source })?;
        }
    }
    match outcome.failure {
        Some(f) => Err(f),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qclock: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

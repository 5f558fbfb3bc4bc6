use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use swlab::{CliError, Command, RunConfig};

/// Weighted Riesz potential and Stein-Weiss experiments.
#[derive(Parser)]
#[command(name = "swlab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON run config.
    #[arg(long)]
    config: PathBuf,
    /// Run directory; defaults to `io.out`, then `runs/<command>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::load(&cli.config).and_then(|cfg| {
        if cfg.command != cli.command {
            return Err(CliError::Config(format!(
                "config is for `{}`, not `{}`",
                cfg.command.name(),
                cli.command.name()
            )));
        }
        let out = cli
            .out
            .or_else(|| cfg.io.out.clone())
            .unwrap_or_else(|| PathBuf::from("runs").join(cli.command.name()));
        swlab::run(&cfg, &out)?;
        eprintln!("wrote {}", out.display());
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Core(swlab_core::Error::Validation(msgs)) => {
                    for m in msgs {
                        eprintln!("{m}");
                    }
                }
                _ => eprintln!("swlab: {e}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

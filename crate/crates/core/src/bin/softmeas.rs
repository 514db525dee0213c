use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use softmeas::cli::{self, CliError, Command, RawOptions, SweepConfig};

/// Soft quantum nondemolition measurement simulator.
#[derive(Debug, Parser)]
#[command(name = "softmeas", version)]
struct Args {
    /// single, repeat, continuous, fig2a, fig2b, fig3 or isweep
    #[arg(value_parser = ["single", "repeat", "continuous", "fig2a", "fig2b", "fig3", "isweep"])]
    command: String,

    /// Flat `key = value` configuration file
    #[arg(long)]
    config: Option<PathBuf>,

    /// Parameter override `name=value` (repeatable)
    #[arg(long = "param", value_name = "NAME=VALUE")]
    params: Vec<String>,

    /// Output file (default: standard output)
    #[arg(long)]
    out: Option<String>,

    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,

    #[arg(long = "kappa-convention", value_parser = ["gram", "paper"])]
    kappa_convention: Option<String>,
}

fn execute(args: Args) -> Result<(), CliError> {
    let command: Command = args.command.parse()?;
    let config_text = match &args.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?,
        ),
        None => None,
    };
    let raw = RawOptions {
        config_text,
        params: args.params,
        out: args.out,
        format: args.format,
        kappa_convention: args.kappa_convention,
    };
    let config = SweepConfig::build(command, &raw)?;
    let table = cli::run(&config)?;
    let text = cli::render(&config, &table);
    match &config.output.path {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {path}: {e}"))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("softmeas: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

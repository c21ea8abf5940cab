mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;
use grnf::GrnfError;

use args::{Cli, Command};

/// Exit status for input that fails validation.
const EXIT_INVALID: u8 = 2;

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(GrnfError::InvalidArgument("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    match cli.command {
        Command::Gen(c) => commands::gen(c),
        Command::Embed(a) => commands::embed(a),
        Command::Dim(a) => commands::dim(a),
        Command::Distance(a) => commands::distance(a),
        Command::Gram(a) => commands::gram(a),
        Command::Experiment(c) => commands::experiment(c),
    }
}

fn is_validation_error(err: &anyhow::Error) -> bool {
    matches!(
        err.downcast_ref::<GrnfError>(),
        Some(
            GrnfError::Shape(_)
                | GrnfError::DimensionLimit { .. }
                | GrnfError::InvalidArgument(_)
                | GrnfError::InvalidGraph(_)
                | GrnfError::ImportanceWeight(_)
                | GrnfError::Parse(_)
                | GrnfError::Json(_)
        )
    )
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if is_validation_error(&err) {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

use std::process::ExitCode;

use clap::Parser;
use gammaforge::{commands, exit, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env_seed = match std::env::var("GAMMAFORGE_SEED") {
        Ok(s) => match s.trim().parse::<u64>() {
            Ok(v) => Some(v),
            Err(_) => {
                eprintln!("gammaforge: GAMMAFORGE_SEED must be an unsigned integer, got `{s}`");
                return ExitCode::from(exit::PARSE);
            }
        },
        Err(_) => None,
    };
    match commands::run(cli.command, env_seed) {
        Ok(true) => ExitCode::from(exit::OK),
        Ok(false) => {
            eprintln!("gammaforge: tolerance exceeded");
            ExitCode::from(exit::TOLERANCE)
        }
        Err(e) => {
            eprintln!("gammaforge: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

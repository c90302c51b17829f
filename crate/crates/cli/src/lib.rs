//! Command-line front end: `solve`, `scan`, `verify`, `map-sextic`, `export`.
//!
//! Exit codes: 0 success, 2 usage, 3 domain error (such as level 0),
//! 4 cross-validation or verification failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::Cli;
pub use error::CliError;

use config::{Command, Format};

pub fn execute(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(args) => commands::solve(&config::run_config(&config::merged(args)?)?),
        Command::MapSextic(args) => commands::map_sextic(&config::run_config(&config::merged(args)?)?),
        Command::Export(args) => commands::export(&config::run_config(&config::merged(args)?)?),
        Command::Scan(args) => commands::scan(&config::scan_config(&config::merged(args)?)?),
        Command::Verify(args) => {
            let map = config::merged(args)?;
            let settings = config::settings(&map, Format::Json)?;
            if settings.input.is_some() {
                commands::verify(None, &settings)
            } else {
                let cfg = config::run_config(&map)?;
                commands::verify(Some(&cfg), &cfg.settings)
            }
        }
    }
}

/// Runs the command and returns the process exit code, reporting errors on
/// standard error.
pub fn run(cli: Cli) -> i32 {
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

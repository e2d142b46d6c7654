//! Command-line front end: JSON configuration in, JSON records and CSV
//! grids out. Subcommands are thin adapters over the library modules.
//!
//! Exit codes: 0 ok, 2 configuration error, 3 hypothesis violation,
//! 4 numerical non-convergence.

pub mod commands;
pub mod config;
pub mod output;

use std::fs;
use std::path::PathBuf;

pub use commands::Context;
pub use config::RunConfig;

use crate::error::Error;

/// Exit code for configuration and argument errors.
pub const EXIT_CONFIG: u8 = 2;
/// Exit code for violated analysis hypotheses.
pub const EXIT_HYPOTHESIS: u8 = 3;
/// Exit code for numerical failures (non-convergence, blow-up, bracketing).
pub const EXIT_NUMERICAL: u8 = 4;

/// A subcommand of the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Predict { seed_check: bool },
    Bifurcation,
    Shoot,
    Converge,
    Chart,
    Transition,
    Slowflow,
}

/// Global options resolved from the command line.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config_path: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub fixed_step: bool,
    pub quiet: bool,
}

/// Failure with its process exit code.
#[derive(Debug, Clone)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.message)
    }
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::InvalidParameter(_) => EXIT_CONFIG,
        Error::DegenerateHypothesis(_) => EXIT_HYPOTHESIS,
        _ => EXIT_NUMERICAL,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError {
            code: exit_code_for(&e),
            message: e.to_string(),
        }
    }
}

/// Load the configuration (defaults when no path is given) and run one
/// subcommand.
pub fn run(cmd: Command, opts: &Options) -> Result<(), CliError> {
    let config = match &opts.config_path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError {
                code: EXIT_CONFIG,
                message: format!("cannot read config {}: {e}", path.display()),
            })?;
            RunConfig::from_json(&text)?
        }
        None => RunConfig::default(),
    };
    let ctx = Context {
        config,
        out_dir: opts.out_dir.clone().unwrap_or_else(|| PathBuf::from(".")),
        fixed_step: opts.fixed_step,
        quiet: opts.quiet,
    };
    match cmd {
        Command::Predict { seed_check } => commands::cmd_predict(&ctx, seed_check)?,
        Command::Bifurcation => commands::cmd_bifurcation(&ctx)?,
        Command::Shoot => commands::cmd_shoot(&ctx)?,
        Command::Converge => commands::cmd_converge(&ctx)?,
        Command::Chart => commands::cmd_chart(&ctx)?,
        Command::Transition => commands::cmd_transition(&ctx)?,
        Command::Slowflow => commands::cmd_slowflow(&ctx)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_map_error_kinds() {
        assert_eq!(
            exit_code_for(&Error::InvalidParameter("x".into())),
            EXIT_CONFIG
        );
        assert_eq!(
            exit_code_for(&Error::DegenerateHypothesis("x".into())),
            EXIT_HYPOTHESIS
        );
        assert_eq!(
            exit_code_for(&Error::NoConvergence {
                x: 0.0,
                y: 0.0,
                residual: 1.0,
                iterations: 3
            }),
            EXIT_NUMERICAL
        );
        assert_eq!(
            exit_code_for(&Error::NoSignChange { lo: 0.0, hi: 1.0 }),
            EXIT_NUMERICAL
        );
    }
}

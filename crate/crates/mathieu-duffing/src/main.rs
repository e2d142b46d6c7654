use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mathieu_duffing::cli::{self, Command, Options};

/// Periodic solutions, averaging, slow flows, and Floquet stability of the
/// forced Mathieu-Duffing oscillator.
#[derive(Parser)]
#[command(name = "mathieu-duffing", version, about)]
struct Args {
    /// JSON configuration file (defaults apply when omitted).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory for result files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Force fixed-step monodromy integration (reproducible byte output).
    #[arg(long, global = true)]
    fixed_step: bool,

    /// Suppress informational output.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Predicted periodic-solution initial condition with nondegeneracy
    /// certificate.
    Predict {
        /// Evaluate both sign conventions and print both residuals.
        #[arg(long)]
        seed_check: bool,
    },
    /// Averaged bifurcation function over a state grid, closed form vs
    /// quadrature.
    Bifurcation,
    /// Refine the prediction into a periodic orbit by shooting.
    Shoot,
    /// Shooting convergence study over a decreasing epsilon list.
    Converge,
    /// Ince-Strutt stability chart sweep.
    Chart,
    /// First-tongue transition curves, analytic and bisected.
    Transition,
    /// Slow-flow equilibrium census and pitchfork events.
    Slowflow,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options {
        config_path: args.config,
        out_dir: args.out,
        fixed_step: args.fixed_step,
        quiet: args.quiet,
    };
    let command = match args.command {
        Cmd::Predict { seed_check } => Command::Predict { seed_check },
        Cmd::Bifurcation => Command::Bifurcation,
        Cmd::Shoot => Command::Shoot,
        Cmd::Converge => Command::Converge,
        Cmd::Chart => Command::Chart,
        Cmd::Transition => Command::Transition,
        Cmd::Slowflow => Command::Slowflow,
    };
    match cli::run(command, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}

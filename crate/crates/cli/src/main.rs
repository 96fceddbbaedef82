//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numerical failure,
//! 3 verification failure.

mod config;
mod csvfmt;
mod run;

use clap::{Parser, Subcommand, ValueEnum};
use config::RunConfig;
use electromech_oracle::FaultInjection;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "electromech",
    version,
    about = "Steady-state, squeezing, and entanglement simulations of a qubit-mediated electromechanical system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for sweep fan-out (0 = auto).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Output directory (overrides the config's output.dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parametric hysteresis curve of the mean intensities, with turning points.
    Bistability {
        #[arg(long)]
        config: PathBuf,
    },
    /// Squeezing spectrum of the transmitted field, or a power scan for the optimum.
    Squeezing {
        #[arg(long)]
        config: PathBuf,
    },
    /// Logarithmic negativity along a 1-D parameter sweep.
    Entanglement {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the independent verification suite and emit a JSON report.
    Verify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Deliberately corrupt a numerical path to demonstrate check sensitivity.
        #[arg(long, value_enum)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Fault {
    DiffusionSlot2,
}

fn out_dir(cli_out: &Option<PathBuf>, cfg: Option<&RunConfig>) -> PathBuf {
    if let Some(dir) = cli_out {
        return dir.clone();
    }
    cfg.and_then(|c| c.output.as_ref())
        .and_then(|o| o.dir.as_ref())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Bistability { config } => RunConfig::from_path(config)
            .map_err(run::RunError::from)
            .and_then(|cfg| run::run_bistability(&cfg, &out_dir(&cli.out, Some(&cfg)))),
        Command::Squeezing { config } => RunConfig::from_path(config)
            .map_err(run::RunError::from)
            .and_then(|cfg| run::run_squeezing(&cfg, &out_dir(&cli.out, Some(&cfg)))),
        Command::Entanglement { config } => RunConfig::from_path(config)
            .map_err(run::RunError::from)
            .and_then(|cfg| run::run_entanglement(&cfg, &out_dir(&cli.out, Some(&cfg)))),
        Command::Verify {
            config,
            inject_fault,
        } => {
            let cfg = match config {
                Some(path) => match RunConfig::from_path(path) {
                    Ok(c) => Some(c),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                },
                None => None,
            };
            let fault = match inject_fault {
                Some(Fault::DiffusionSlot2) => FaultInjection::DiffusionSlot2,
                None => FaultInjection::None,
            };
            run::run_verify(&out_dir(&cli.out, cfg.as_ref()), fault)
        }
    };
    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

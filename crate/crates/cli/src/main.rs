//! `logcone`: batch front end for log-metric statistics on the positive cone.
//!
//! Every command reads its inputs from files or arguments and writes JSON
//! (keys sorted, shortest round-trip floats) or CSV to stdout. Failures go
//! to stderr with a distinct exit code per failure class.

mod commands;
mod error;
mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{ExperimentKind, Format, Output};
use error::{CliResult, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "logcone", version, about = "Log-metric statistics, limit experiments and portfolios on the positive cone")]
#[command(after_help = "Exit codes: 0 ok, 1 usage, 2 parse or schema error, 3 non-positive value, \
4 degenerate regressor, 5 singular covariance, 6 dependent constraints, 7 process not adapted, \
8 Doob decomposition of a non-submartingale")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// l-mean, arithmetic mean, Jensen gap and log-covariance of a CSV panel
    Stats {
        /// CSV file: header row of labels, one positive row per observation
        panel: PathBuf,
    },
    /// Fit the power law y = a x^b between two panel columns
    Predict {
        panel: PathBuf,
        /// Regressor column (label or 1-based index)
        #[arg(long)]
        x: String,
        /// Response column (label or 1-based index)
        #[arg(long)]
        y: String,
    },
    /// Minimum log-variance portfolio for a target mean log-return
    Portfolio {
        /// CSV panel of gross returns, one column per asset
        panel: PathBuf,
        /// Target mean log-return mu
        #[arg(long, allow_negative_numbers = true)]
        target: f64,
        /// Read --target as the l-mean e^mu instead of mu
        #[arg(long)]
        target_is_gross: bool,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Efficient frontier over evenly spaced targets
    Frontier {
        /// CSV panel of gross returns, one column per asset
        panel: PathBuf,
        /// Targets as lo:hi:steps (mean log-returns, inclusive)
        #[arg(long, allow_hyphen_values = true)]
        targets: String,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Seeded law of large numbers or central limit experiment
    Simulate {
        #[arg(value_enum)]
        experiment: ExperimentKind,
        /// JSON spec: {"distribution": {"family": ..}, "sample_size": K, "num_trials": N}
        spec: PathBuf,
        /// Seed of the random streams
        #[arg(long)]
        seed: u64,
    },
    /// Classify a finite-space process and decompose it multiplicatively
    Martingale {
        /// JSON spec: {"probs": [..], "filtration": [[[atoms]..]..], "process": [[[values]..]..], "tol": ..}
        spec: PathBuf,
        /// Require the Doob decomposition; fails when the process is not an l-submartingale
        #[arg(long)]
        doob: bool,
    },
    /// Geodesic distance between two vectors (inline "1,2,3" or @file)
    Distance { x: String, y: String },
    /// Point at parameter t on the geodesic from x1 to x2
    Geodesic {
        x1: String,
        x2: String,
        /// Curve parameter; 0 gives x1, 1 gives x2
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
    },
    /// Componentwise geometric mean of vectors (inline or @file, one per line)
    Gmean {
        #[arg(required = true)]
        vectors: Vec<String>,
    },
}

fn run(command: Command) -> CliResult<Output> {
    match command {
        Command::Stats { panel } => commands::stats(&panel),
        Command::Predict { panel, x, y } => commands::predict(&panel, &x, &y),
        Command::Portfolio {
            panel,
            target,
            target_is_gross,
            format,
        } => commands::portfolio(&panel, target, target_is_gross, format),
        Command::Frontier { panel, targets, format } => commands::frontier(&panel, &targets, format),
        Command::Simulate { experiment, spec, seed } => commands::simulate(experiment, &spec, seed),
        Command::Martingale { spec, doob } => commands::martingale(&spec, doob),
        Command::Distance { x, y } => commands::distance(&x, &y),
        Command::Geodesic { x1, x2, t } => commands::geodesic(&x1, &x2, t),
        Command::Gmean { vectors } => commands::gmean(&vectors),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli.command) {
        Ok(output) => {
            let text = match output {
                Output::Json(v) => {
                    let mut s = serde_json::to_string_pretty(&v).expect("JSON values always serialize");
                    s.push('\n');
                    s
                }
                Output::Text(s) => s,
            };
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_USAGE as u8);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code as u8)
        }
    }
}

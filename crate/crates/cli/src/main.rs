//! `locc`: entanglement monotones, LOCC feasibility and protocol synthesis
//! for two-qubit states.
//!
//! Exit codes: 0 success or feasible, 1 infeasible or a failed check,
//! 2 invalid input.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "locc",
    version,
    about = "Two-qubit entanglement and LOCC transformations"
)]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Override the decision tolerance of the command (feasibility boundary,
    /// oracle upper slack).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Monotones of a pure state or density matrix.
    Analyze {
        #[arg(long)]
        input: PathBuf,
    },
    /// Whether a pure state can be converted into the target(s) by LOCC.
    Check {
        #[arg(long)]
        from: PathBuf,
        /// Target state; repeat for an ensemble of targets.
        #[arg(long, required = true)]
        to: Vec<PathBuf>,
        /// JSON array of target probabilities, one per --to.
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// Largest probability of converting a pure state into the target.
    Maxprob {
        #[arg(long)]
        from: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Optimal (minimum average concurrence) decomposition of a density matrix.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Build an explicit protocol.
    Synth {
        #[arg(long)]
        from: PathBuf,
        #[arg(long, required = true)]
        to: Vec<PathBuf>,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Option<Mode>,
        /// Success probability for --mode conclusive (default: the maximum).
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run a protocol exactly, and optionally by sampling.
    Simulate {
        #[arg(long)]
        protocol: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compare the closed forms with a brute-force convex-roof minimization.
    Oracle {
        #[arg(long)]
        input: PathBuf,
        /// Only this monotone (default: both).
        #[arg(long, value_enum)]
        monotone: Option<MonotoneArg>,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random pure states or density matrices.
    Random {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 4)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Directory for the files; without it documents go to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Det,
    Conclusive,
    Prepare,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonotoneArg {
    E2,
    Concurrence,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Pure,
    Density,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

//! Command-line surface for `stochprod`.
//!
//! ```text
//! stochprod validate  FILE [--tol-row R] [--tol-neg N]
//! stochprod analyze   FILE [--all-starts] [--tol-pos P]
//! stochprod certify   FILE [--alpha A]
//! stochprod simulate  FILE [--x0 V | --x0-file F] [--epsilon E] [--csv OUT]
//! stochprod generate  --preset NAME --n N --length L [--alpha A] [--seed S] [--out F]
//! ```
//!
//! Exit codes: 0 success, 1 hypothesis violation, 2 input error,
//! 3 horizon exhausted.

pub mod commands;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use stochprod::generate::{GenerateParams, Preset};
use stochprod::stochastic::{Tolerances, DEFAULT_TOL_NEG, DEFAULT_TOL_POS, DEFAULT_TOL_ROW};

use commands::{InitialVector, Output, SimulateOptions};

#[derive(Debug, Parser)]
#[command(name = "stochprod", version, about = "Convergence analysis for products of stochastic matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, Args)]
pub struct ToleranceArgs {
    /// Allowed deviation of each row sum from 1.
    #[arg(long, default_value_t = DEFAULT_TOL_ROW)]
    pub tol_row: f64,
    /// Negative entries down to minus this value are clamped to 0.
    #[arg(long, default_value_t = DEFAULT_TOL_NEG)]
    pub tol_neg: f64,
    /// Entries strictly above this value count as positive.
    #[arg(long, default_value_t = DEFAULT_TOL_POS)]
    pub tol_pos: f64,
}

impl From<ToleranceArgs> for Tolerances {
    fn from(t: ToleranceArgs) -> Self {
        Tolerances {
            row: t.tol_row,
            neg: t.tol_neg,
            pos: t.tol_pos,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate every matrix; print n, L and alpha.
    Validate {
        path: PathBuf,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Check the four convergence hypotheses.
    Analyze {
        path: PathBuf,
        /// Check eventual positivity from every start index.
        #[arg(long)]
        all_starts: bool,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Issue a contraction certificate.
    Certify {
        path: PathBuf,
        /// Lower bound on the positive entries to use instead of the
        /// realized minimum.
        #[arg(long)]
        alpha: Option<f64>,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Track the semi-norm of the products until it reaches epsilon.
    Simulate {
        path: PathBuf,
        /// Initial vector, comma or space separated.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "x0_file")]
        x0: Option<String>,
        /// File holding the initial vector.
        #[arg(long)]
        x0_file: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        epsilon: f64,
        /// Write a `k,seminorm` table to this path.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[command(flatten)]
        tol: ToleranceArgs,
    },
    /// Write a sequence from a preset.
    Generate {
        #[arg(long)]
        preset: Preset,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        length: usize,
        /// Entry lower bound; defaults to 1 / (2n).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn run(cli: &Cli) -> Output {
    match &cli.command {
        Command::Validate { path, tol } => commands::cmd_validate(path, &(*tol).into()),
        Command::Analyze {
            path,
            all_starts,
            tol,
        } => commands::cmd_analyze(path, &(*tol).into(), *all_starts),
        Command::Certify { path, alpha, tol } => {
            commands::cmd_certify(path, &(*tol).into(), *alpha)
        }
        Command::Simulate {
            path,
            x0,
            x0_file,
            epsilon,
            csv,
            tol,
        } => {
            let x0 = match (x0, x0_file) {
                (Some(text), _) => Some(InitialVector::Inline(text.clone())),
                (None, Some(file)) => Some(InitialVector::File(file.clone())),
                (None, None) => None,
            };
            let opts = SimulateOptions {
                x0,
                epsilon: *epsilon,
                csv: csv.clone(),
            };
            commands::cmd_simulate(path, &(*tol).into(), &opts)
        }
        Command::Generate {
            preset,
            n,
            length,
            alpha,
            seed,
            out,
        } => {
            let params = GenerateParams {
                preset: *preset,
                n: *n,
                length: *length,
                alpha: alpha.unwrap_or(1.0 / (2 * (*n).max(1)) as f64),
                seed: *seed,
            };
            commands::cmd_generate(&params, out.as_deref())
        }
    }
}

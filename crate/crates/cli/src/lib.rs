//! Command-line front end for `dirac-core`: problem files, the `solve`,
//! `compare`, `transform`, `reproduce` and `scan` commands, and the
//! registry of reference calculations.

pub mod commands;
pub mod config;
pub mod registry;

use dirac_core::shooting::SolveError;
use dirac_core::theorems::TheoremError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 1 for usage and configuration problems, 2 for solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

pub fn solve_error(e: SolveError) -> CliError {
    match e {
        SolveError::InvalidProblem(_) | SolveError::Potential(_) | SolveError::ReductionUndefined => {
            CliError::Config(e.to_string())
        }
        _ => CliError::Solver(e.to_string()),
    }
}

pub fn theorem_error(e: TheoremError) -> CliError {
    match e {
        TheoremError::Solve(s) => solve_error(s),
        TheoremError::Numerics(_) => CliError::Solver(e.to_string()),
        _ => CliError::Config(e.to_string()),
    }
}

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_FALSIFIED: i32 = 3;

//! Numerical building blocks: grids and sampled functions, ODE
//! integration, quadrature and bracketing root search.

mod grid;
mod ode;
mod quad;
mod roots;

use thiserror::Error;

pub use grid::{Grid, SampledFunction};
pub use ode::{integrate_ode, OdeConfig, OdeSolution, State, Termination};
pub use quad::{
    quad_adaptive, quad_adaptive_with_error, quad_oscillatory, quad_oscillatory_tail, wynn_epsilon,
    OscillatoryResult, QuadratureConfig,
};
pub use roots::{default_scan_step, find_root_bracketed, scan_sign_changes, Bracket};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumericsError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid has {grid} points but {values} values were given")]
    LengthMismatch { grid: usize, values: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("non-finite value encountered at {at}")]
    NonFinite { at: f64 },
    #[error("step size underflow at t = {at} (singularity?)")]
    StepUnderflow { at: f64 },
    #[error("step budget exhausted at t = {at}")]
    TooManySteps { at: f64 },
    #[error("quadrature did not converge on [{a}, {b}] within the depth limit (error estimate {error:e})")]
    MaxDepthExceeded { a: f64, b: f64, error: f64 },
    #[error("integrand tail does not decay (last probe at {last_probe})")]
    NonDecayingTail { last_probe: f64 },
    #[error("{at} is not a sign change of the integrand")]
    NotASignChange { at: f64 },
    #[error("no sign change on [{lo}, {hi}]: f = {f_lo}, {f_hi}")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

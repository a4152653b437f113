//! Refined comparison theorems.
//!
//! For two problems sharing mass, symmetry and channel, the cumulative
//! transforms
//!
//! ```text
//! g(x) = ∫₀ˣ (V_b - V_a) dt                    one dimension
//! p(x) = ∫₀ˣ (V_b - V_a) |φ_l| dt              one dimension
//! ρ(r) = ∫₀ʳ (V_b - V_a) t^{-2sk_d} dt         d > 1, s k_d < 0
//! μ(r) = ∫₀ʳ (V_b - V_a) |ψ_l| t^{-sk_d} dt    d > 1, s k_d < 0
//! ```
//!
//! being nonnegative everywhere implies `E_a ≤ E_b` even when the
//! potentials cross. The area checks are the sufficient conditions that
//! certify this from the lobe areas between crossings.

mod compare;
mod crossings;
mod transforms;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{NumericsError, QuadratureConfig};
use crate::potentials::{Component, SymmetryMode};
use crate::shooting::SolveError;

pub use compare::{
    compare, compare_solved, Attempt, CompareOptions, ComparisonReport, Prediction, Strategy,
    TheoremId, WeightChoice,
};
pub use crossings::{corollary_area_check, detect_crossings, AreaCheck, AreaVerdict, CrossingSet};
pub use transforms::{
    transform_g, transform_mu, transform_p, transform_rho, weighted_transform, MuWeight,
    TransformCurve, TransformKind, Weight, WeightDescriptor,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TheoremError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("weight uses the {given:?} component but {mode:?} symmetry designates {expected:?}")]
    SelectorMismatch { given: Component, expected: Component, mode: SymmetryMode },
    #[error("s k_d = {sk} is not negative; the weighted radial transforms need s k_d < 0")]
    NotNodeless { sk: f64 },
    #[error("incompatible problems: {0}")]
    Incompatible(String),
    #[error("{0}")]
    NotApplicable(String),
    #[error("invalid domain end {0}")]
    InvalidDomain(f64),
}

/// Sampling and tolerance settings for transforms and comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformConfig {
    /// Uniform intervals of the cumulative curve on `[0, R]`.
    pub samples: usize,
    /// Samples of the crossing scan on `[0, R]`.
    pub scan_samples: usize,
    /// The curve is continued to `extension_factor · R` before the far
    /// tail is bounded.
    pub extension_factor: f64,
    pub extension_samples: usize,
    /// Eigenvalue ordering tolerance.
    pub tolerance: f64,
    pub quad: QuadratureConfig,
}

impl Default for TransformConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            scan_samples: 2048,
            extension_factor: 2.0,
            extension_samples: 65536,
            tolerance: 1e-8,
            quad: QuadratureConfig::default(),
        }
    }
}

/// Relative threshold under which curve dips and area excesses count as
/// roundoff.
pub const SIGN_TOL: f64 = 1e-12;

//! TOML problem files.
//!
//! ```toml
//! [problem]
//! dimension = 2          # 1, or d >= 2 for the radial problem
//! mass = 1.0
//! symmetry = "spin"      # or "pseudo-spin"; omit when [scalar] is given
//! j = 0.5                # d >= 2 only
//! tau = -1               # d >= 2 only
//! parity = "auto"        # d = 1 only
//!
//! [potential]
//! kind = "yukawa"
//! alpha = 0.2
//! a = 0.1
//!
//! [scalar]               # optional independent scalar potential
//! kind = "coulomb"
//! beta = 0.7
//!
//! [numerics]             # optional solver overrides
//! eig_tol = 1e-10
//! ```

use std::path::Path;

use dirac_core::dirac1d::ParityChoice;
use dirac_core::diracd::{Channel, ScalarCoupling};
use dirac_core::potentials::{PotentialSpec, SymmetryMode};
use dirac_core::problem::{Geometry, Problem};
use dirac_core::shooting::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub dimension: u32,
    pub mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<ParityChoice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub problem: ProblemSection,
    pub potential: PotentialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scalar: Option<PotentialSpec>,
    #[serde(default)]
    pub numerics: SolverConfig,
}

pub const ENV_ABS_TOL: &str = "DIRAC_ABS_TOL";
pub const ENV_REL_TOL: &str = "DIRAC_REL_TOL";
pub const ENV_EIG_TOL: &str = "DIRAC_EIG_TOL";

impl ProblemConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("problem configs always serialize")
    }

    pub fn from_problem(p: &Problem, numerics: SolverConfig) -> Self {
        let (symmetry, scalar) = match &p.scalar {
            ScalarCoupling::Symmetric(m) => (Some(*m), None),
            ScalarCoupling::Explicit(s) => (None, Some(s.clone())),
        };
        let problem = match p.geometry {
            Geometry::Line { parity } => ProblemSection {
                dimension: 1,
                mass: p.mass,
                symmetry,
                parity: Some(parity),
                j: None,
                tau: None,
            },
            Geometry::Radial { channel } => ProblemSection {
                dimension: channel.d,
                mass: p.mass,
                symmetry,
                parity: None,
                j: Some(channel.j),
                tau: Some(channel.tau),
            },
        };
        ProblemConfig { problem, potential: p.potential.clone(), scalar, numerics }
    }

    pub fn to_problem(&self) -> Result<Problem, CliError> {
        let s = &self.problem;
        let scalar = match (&self.scalar, s.symmetry) {
            (Some(_), Some(_)) => {
                return Err(CliError::Config(
                    "give either problem.symmetry or a [scalar] table, not both".into(),
                ))
            }
            (Some(spec), None) => ScalarCoupling::Explicit(spec.clone()),
            (None, Some(mode)) => ScalarCoupling::Symmetric(mode),
            (None, None) => {
                return Err(CliError::Config(
                    "problem.symmetry is required unless a [scalar] table is given".into(),
                ))
            }
        };
        let geometry = match s.dimension {
            0 => return Err(CliError::Config("problem.dimension must be >= 1".into())),
            1 => {
                if s.j.is_some() || s.tau.is_some() {
                    return Err(CliError::Config(
                        "problem.j and problem.tau only apply to dimension >= 2".into(),
                    ));
                }
                Geometry::Line { parity: s.parity.unwrap_or_default() }
            }
            d => {
                if s.parity.is_some() {
                    return Err(CliError::Config("problem.parity only applies to dimension 1".into()));
                }
                let (Some(j), Some(tau)) = (s.j, s.tau) else {
                    return Err(CliError::Config(
                        "problem.j and problem.tau are required for dimension >= 2".into(),
                    ));
                };
                Geometry::Radial { channel: Channel { d, j, tau } }
            }
        };
        let p = Problem { potential: self.potential.clone(), scalar, mass: s.mass, geometry };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    /// Numerics with the tolerance environment overrides applied.
    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let mut cfg = self.numerics;
        apply_env(&mut cfg, |k| std::env::var(k).ok())?;
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Applies `DIRAC_ABS_TOL`, `DIRAC_REL_TOL` and `DIRAC_EIG_TOL`.
pub fn apply_env(cfg: &mut SolverConfig, get: impl Fn(&str) -> Option<String>) -> Result<(), CliError> {
    for (key, slot) in [
        (ENV_ABS_TOL, &mut cfg.abs_tol),
        (ENV_REL_TOL, &mut cfg.rel_tol),
        (ENV_EIG_TOL, &mut cfg.eig_tol),
    ] {
        if let Some(raw) = get(key) {
            let v: f64 = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{key}={raw:?} is not a number")))?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{key} must be positive")));
            }
            *slot = v;
        }
    }
    Ok(())
}

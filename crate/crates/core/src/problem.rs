//! A complete eigenvalue problem (potential, scalar coupling, mass and
//! geometry) and its solved ground state, independent of dimension.

use serde::{Deserialize, Serialize};

use crate::dirac1d::{check_lemma1, solve_ground_1d, BoundState1D, LemmaCheck, ParityChoice};
use crate::diracd::{
    check_lemma2, coulomb_exact_d2, solve_ground_radial, BoundStateRadial, Channel, CoulombExact,
    ScalarCoupling,
};
use crate::numerics::SampledFunction;
use crate::potentials::{classify, energy_window, Component, EnergyWindow, PotentialSpec, SymmetryMode};
use crate::reduction::{solve_reduced_1d, solve_reduced_radial};
use crate::shooting::{SolveError, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    Line { parity: ParityChoice },
    Radial { channel: Channel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub potential: PotentialSpec,
    pub scalar: ScalarCoupling,
    pub mass: f64,
    pub geometry: Geometry,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "geometry", rename_all = "snake_case")]
pub enum BoundState {
    Line(BoundState1D),
    Radial(BoundStateRadial),
}

impl BoundState {
    pub fn energy(&self) -> f64 {
        match self {
            BoundState::Line(s) => s.energy,
            BoundState::Radial(s) => s.energy,
        }
    }

    pub fn component(&self, c: Component) -> &SampledFunction {
        match self {
            BoundState::Line(s) => s.component(c),
            BoundState::Radial(s) => s.component(c),
        }
    }

    pub fn nodes(&self) -> (usize, usize) {
        match self {
            BoundState::Line(s) => (s.nodes1, s.nodes2),
            BoundState::Radial(s) => (s.nodes1, s.nodes2),
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            BoundState::Line(s) => s.norm,
            BoundState::Radial(s) => s.norm,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            BoundState::Line(s) => s.residual,
            BoundState::Radial(s) => s.residual,
        }
    }

    pub fn window(&self) -> EnergyWindow {
        match self {
            BoundState::Line(s) => s.window,
            BoundState::Radial(s) => s.window,
        }
    }

    /// Outer end of the sampled wavefunction.
    pub fn domain_end(&self) -> f64 {
        match self {
            BoundState::Line(s) => s.x_max,
            BoundState::Radial(s) => s.r_max,
        }
    }
}

impl Problem {
    pub fn mode(&self) -> Option<SymmetryMode> {
        self.scalar.mode()
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        self.potential.validate()?;
        if let ScalarCoupling::Explicit(s) = &self.scalar {
            s.validate()?;
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(SolveError::InvalidProblem("mass must be positive".into()));
        }
        match self.geometry {
            Geometry::Line { .. } => {
                if self.mode().is_none() {
                    return Err(SolveError::InvalidProblem(
                        "one-dimensional problems need S = sV".into(),
                    ));
                }
                Ok(())
            }
            Geometry::Radial { channel } => channel.validate(),
        }
    }

    /// `s k_d` for radial problems with `S = sV`.
    pub fn sk(&self) -> Option<f64> {
        match (self.geometry, self.mode()) {
            (Geometry::Radial { channel }, Some(mode)) => Some(mode.s() * channel.kd()),
            _ => None,
        }
    }

    pub fn channel(&self) -> Option<Channel> {
        match self.geometry {
            Geometry::Radial { channel } => Some(channel),
            Geometry::Line { .. } => None,
        }
    }

    /// Energy window for `S = sV` problems.
    pub fn window(&self) -> Option<EnergyWindow> {
        let mode = self.mode()?;
        energy_window(classify(&self.potential, mode), mode, self.mass).ok()
    }

    pub fn solve(&self, cfg: &SolverConfig) -> Result<BoundState, SolveError> {
        self.validate()?;
        match self.geometry {
            Geometry::Line { parity } => {
                let mode = self.mode().expect("validated");
                solve_ground_1d(&self.potential, mode, self.mass, parity, cfg).map(BoundState::Line)
            }
            Geometry::Radial { channel } => {
                solve_ground_radial(&self.potential, &self.scalar, self.mass, channel, cfg)
                    .map(BoundState::Radial)
            }
        }
    }

    /// Ground-state energy from the independent second-order reduction.
    pub fn solve_reduced(&self, cfg: &SolverConfig) -> Result<f64, SolveError> {
        let mode = self.mode().ok_or(SolveError::ReductionUndefined)?;
        match self.geometry {
            Geometry::Line { .. } => solve_reduced_1d(&self.potential, mode, self.mass, cfg),
            Geometry::Radial { channel } => {
                solve_reduced_radial(&self.potential, mode, self.mass, channel, cfg)
            }
        }
    }

    /// Monotonicity lemma for the designated component.
    pub fn lemma_check(&self, state: &BoundState) -> Option<LemmaCheck> {
        let mode = self.mode()?;
        match state {
            BoundState::Line(s) => Some(check_lemma1(s, mode)),
            BoundState::Radial(s) => Some(check_lemma2(s, mode)),
        }
    }

    /// The closed-form state when this is the `d = 2` Coulomb problem with
    /// `S = V`, `j = 1/2`, `τ = -1` and `m = 1`.
    pub fn coulomb_exact(&self) -> Option<CoulombExact> {
        let channel = self.channel()?;
        match (&self.potential, &self.scalar) {
            (PotentialSpec::Coulomb { beta }, ScalarCoupling::Symmetric(SymmetryMode::Spin))
                if channel.d == 2 && channel.j == 0.5 && channel.tau == -1 && self.mass == 1.0 =>
            {
                coulomb_exact_d2(*beta).ok()
            }
            _ => None,
        }
    }
}

//! One-dimensional Dirac system with `S = sV`:
//!
//! ```text
//! φ₁' = -(E + m - V + S) φ₂
//! φ₂' =  (E - m - V - S) φ₁
//! ```
//!
//! Potentials are even, so the components have opposite parities and the
//! problem is solved on the half-line `[0, X_max]`.

use serde::{Deserialize, Serialize};

use crate::numerics::SampledFunction;
use crate::potentials::{
    classify, energy_window, Component, EnergyWindow, PotentialClass, PotentialSpec, SymmetryMode,
};
use crate::shooting::{sweep_direction, DiracSystem, SolveError, SolverConfig, Start};

/// Which component is odd (vanishes at `x = 0`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ParityChoice {
    /// The component housed by the reduction is even; the ground state has
    /// this structure.
    #[default]
    Auto,
    UpperVanishes,
    LowerVanishes,
}

impl ParityChoice {
    /// The component that vanishes at the origin under `mode`.
    pub fn vanishing(self, mode: SymmetryMode) -> Component {
        match self {
            ParityChoice::Auto => mode.q().other(),
            ParityChoice::UpperVanishes => Component::Upper,
            ParityChoice::LowerVanishes => Component::Lower,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundState1D {
    pub energy: f64,
    pub mode: SymmetryMode,
    pub mass: f64,
    /// Sampled on `[0, X_max]`.
    pub phi1: SampledFunction,
    pub phi2: SampledFunction,
    /// Sign changes on `(0, X_max]`.
    pub nodes1: usize,
    pub nodes2: usize,
    /// `∫(φ₁² + φ₂²)` over the whole line.
    pub norm: f64,
    pub vanishing: Component,
    pub class: PotentialClass,
    pub window: EnergyWindow,
    pub x_max: f64,
    pub matching_point: f64,
    pub residual: f64,
}

impl BoundState1D {
    pub fn component(&self, c: Component) -> &SampledFunction {
        match c {
            Component::Upper => &self.phi1,
            Component::Lower => &self.phi2,
        }
    }

    /// The component of the Schrödinger-like reduction (`φ_q`).
    pub fn designated(&self) -> &SampledFunction {
        self.component(self.mode.q())
    }
}

/// Sign changes of `f`, ignoring samples below `1e-12 · max|f|`.
pub fn node_count(f: &SampledFunction) -> usize {
    f.sign_changes(1e-12)
}

/// Monotonicity verdict for a lemma check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub holds: bool,
    /// Variation against the dominant direction relative to `max|f|`.
    pub violation: f64,
}

pub const MONOTONE_TOL: f64 = 1e-9;

pub(crate) fn monotone_check(f: &SampledFunction) -> LemmaCheck {
    let violation = f.monotonicity_violation();
    LemmaCheck { holds: violation <= MONOTONE_TOL, violation }
}

/// The designated component (`φ₁` for `s = +1`, `φ₂` for `s = -1`) must be
/// monotone on `[0, X_max]`.
pub fn check_lemma1(state: &BoundState1D, mode: SymmetryMode) -> LemmaCheck {
    monotone_check(state.component(mode.q()))
}

/// Lowest state whose designated component is node-free.
pub fn solve_ground_1d(
    v: &PotentialSpec,
    mode: SymmetryMode,
    m: f64,
    parity: ParityChoice,
    cfg: &SolverConfig,
) -> Result<BoundState1D, SolveError> {
    solve_state_1d(v, mode, m, parity, 0, cfg)
}

/// First state along the scan whose designated component has exactly
/// `nodes` sign changes on the half-line.
pub fn solve_state_1d(
    v: &PotentialSpec,
    mode: SymmetryMode,
    m: f64,
    parity: ParityChoice,
    nodes: usize,
    cfg: &SolverConfig,
) -> Result<BoundState1D, SolveError> {
    v.validate()?;
    cfg.validate()?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(SolveError::InvalidProblem("mass must be positive".into()));
    }
    if !v.finite_at_origin() {
        return Err(SolveError::InvalidProblem(format!(
            "{} is singular at the origin; one-dimensional problems need a finite V(0)",
            v.kind_name()
        )));
    }
    let class = classify(v, mode);
    let window = energy_window(class, mode, m)?;
    let s = mode.s();
    let vf = |x: f64| v.value(x);
    let sf = |x: f64| s * v.value(x);
    let vanishing = parity.vanishing(mode);
    let start = match vanishing {
        Component::Upper => [0.0, 1.0],
        Component::Lower => [1.0, 0.0],
    };
    let sys = DiracSystem { v: &vf, s: &sf, m, k: 0.0, start: Start::Regular(start) };
    let q = mode.q().index();
    let mut accept = |sol: &crate::shooting::Solution| {
        let f = if q == 0 { &sol.psi1 } else { &sol.psi2 };
        node_count(f) == nodes
    };
    let sol = sys.search(window, sweep_direction(window, s), cfg, &mut accept)?;
    let mut phi1 = sol.psi1;
    let mut phi2 = sol.psi2;
    phi2.scale(-1.0);
    let half = phi1.integrate_with(|_, y| y * y) + phi2.integrate_with(|_, y| y * y);
    let mut c = 1.0 / (2.0 * half).sqrt();
    let lead = if q == 0 { &phi1 } else { &phi2 };
    if extreme_value(lead) < 0.0 {
        c = -c;
    }
    phi1.scale(c);
    phi2.scale(c);
    let norm = 2.0 * (phi1.integrate_with(|_, y| y * y) + phi2.integrate_with(|_, y| y * y));
    Ok(BoundState1D {
        energy: sol.energy,
        mode,
        mass: m,
        nodes1: node_count(&phi1),
        nodes2: node_count(&phi2),
        phi1,
        phi2,
        norm,
        vanishing,
        class,
        window,
        x_max: sol.setup.x_max,
        matching_point: sol.setup.rm,
        residual: sol.residual,
    })
}

/// Value of largest magnitude.
pub(crate) fn extreme_value(f: &SampledFunction) -> f64 {
    f.values().iter().copied().fold(0.0, |a, b| if b.abs() > a.abs() { b } else { a })
}

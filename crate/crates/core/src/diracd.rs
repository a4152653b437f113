//! Radial Dirac system in `d > 1` dimensions:
//!
//! ```text
//! ψ₁' = (m + E + S - V) ψ₂ - (k_d / r) ψ₁
//! ψ₂' = (m - E + S + V) ψ₁ + (k_d / r) ψ₂
//! ```
//!
//! with `k_d = τ (j + (d - 2)/2)`. `S` is either `sV` or an independent
//! scalar potential.

use serde::{Deserialize, Serialize};

use crate::dirac1d::{extreme_value, monotone_check, node_count, LemmaCheck};
use crate::numerics::SampledFunction;
use crate::potentials::{
    classify, energy_window, Component, EnergyWindow, PotentialSpec, SymmetryMode,
};
use crate::shooting::{sweep_direction, DiracSystem, Direction, Solution, SolveError, SolverConfig, Start};

/// Angular quantum numbers `(d, j, τ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    pub d: u32,
    pub j: f64,
    pub tau: i32,
}

impl Channel {
    pub fn new(d: u32, j: f64, tau: i32) -> Result<Self, SolveError> {
        let c = Channel { d, j, tau };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        if self.d < 2 {
            return Err(SolveError::InvalidProblem("dimension must be >= 2".into()));
        }
        let twice = 2.0 * self.j;
        if !(self.j > 0.0 && (twice - twice.round()).abs() < 1e-12 && twice.round() as i64 % 2 == 1) {
            return Err(SolveError::InvalidProblem(format!(
                "j = {} is not a positive half-integer",
                self.j
            )));
        }
        if self.tau != 1 && self.tau != -1 {
            return Err(SolveError::InvalidProblem("tau must be +1 or -1".into()));
        }
        Ok(())
    }

    /// `k_d = τ (j + (d - 2)/2)`.
    pub fn kd(&self) -> f64 {
        self.tau as f64 * (self.j + (self.d as f64 - 2.0) / 2.0)
    }
}

/// The scalar potential of a radial problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarCoupling {
    /// `S = sV`.
    Symmetric(SymmetryMode),
    /// Independent `S`.
    Explicit(PotentialSpec),
}

impl ScalarCoupling {
    pub fn mode(&self) -> Option<SymmetryMode> {
        match self {
            ScalarCoupling::Symmetric(m) => Some(*m),
            ScalarCoupling::Explicit(_) => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundStateRadial {
    pub energy: f64,
    pub mass: f64,
    pub channel: Channel,
    pub scalar: ScalarCoupling,
    /// Sampled on `[r₀, R_max]` with `r₀` a small positive start radius.
    pub psi1: SampledFunction,
    pub psi2: SampledFunction,
    pub nodes1: usize,
    pub nodes2: usize,
    pub norm: f64,
    pub window: EnergyWindow,
    pub r_max: f64,
    pub matching_point: f64,
    pub residual: f64,
}

impl BoundStateRadial {
    pub fn component(&self, c: Component) -> &SampledFunction {
        match c {
            Component::Upper => &self.psi1,
            Component::Lower => &self.psi2,
        }
    }
}

/// Lowest state of the channel. For `S = sV` this is the first state
/// whose designated component is node-free; for an independent scalar it
/// is the lowest state with a node-free, dominant upper component.
pub fn solve_ground_radial(
    v: &PotentialSpec,
    scalar: &ScalarCoupling,
    m: f64,
    channel: Channel,
    cfg: &SolverConfig,
) -> Result<BoundStateRadial, SolveError> {
    solve_state_radial(v, scalar, m, channel, 0, cfg)
}

/// Like [`solve_ground_radial`] but the selected component must have
/// exactly `nodes` sign changes.
pub fn solve_state_radial(
    v: &PotentialSpec,
    scalar: &ScalarCoupling,
    m: f64,
    channel: Channel,
    nodes: usize,
    cfg: &SolverConfig,
) -> Result<BoundStateRadial, SolveError> {
    v.validate()?;
    cfg.validate()?;
    channel.validate()?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(SolveError::InvalidProblem("mass must be positive".into()));
    }
    let vf = |r: f64| v.value(r);
    let c_v = v.coulomb_coefficient();
    let k = channel.kd();
    let (s_spec, s_factor) = match scalar {
        ScalarCoupling::Symmetric(mode) => (v.clone(), mode.s()),
        ScalarCoupling::Explicit(spec) => {
            spec.validate()?;
            (spec.clone(), 1.0)
        }
    };
    let sf = |r: f64| s_factor * s_spec.value(r);
    let c_s = s_factor * s_spec.coulomb_coefficient();
    let sys = DiracSystem { v: &vf, s: &sf, m, k, start: Start::Series { c_v, c_s } };

    let (window, direction, pick): (EnergyWindow, Direction, Component) = match scalar {
        ScalarCoupling::Symmetric(mode) => {
            let w = energy_window(classify(v, *mode), *mode, m)?;
            (w, sweep_direction(w, mode.s()), mode.q())
        }
        ScalarCoupling::Explicit(spec) => {
            if !(v.vanishes_at_infinity() && spec.vanishes_at_infinity()) {
                return Err(SolveError::InvalidProblem(
                    "an independent scalar potential needs V and S that vanish at infinity".into(),
                ));
            }
            (EnergyWindow { lo: -m, hi: m }, Direction::Up, Component::Upper)
        }
    };
    let explicit = matches!(scalar, ScalarCoupling::Explicit(_));
    let mut accept = |sol: &Solution| {
        let f = if pick == Component::Upper { &sol.psi1 } else { &sol.psi2 };
        if node_count(f) != nodes {
            return false;
        }
        // antiparticle-like states near -m have a dominant lower component
        !explicit
            || sol.psi1.integrate_with(|_, y| y * y) >= sol.psi2.integrate_with(|_, y| y * y)
    };
    let sol = sys.search(window, direction, cfg, &mut accept)?;

    let mut psi1 = sol.psi1;
    let mut psi2 = sol.psi2;
    let n = psi1.integrate_with(|_, y| y * y) + psi2.integrate_with(|_, y| y * y);
    let mut c = 1.0 / n.sqrt();
    let lead = if pick == Component::Upper { &psi1 } else { &psi2 };
    if extreme_value(lead) < 0.0 {
        c = -c;
    }
    psi1.scale(c);
    psi2.scale(c);
    let norm = psi1.integrate_with(|_, y| y * y) + psi2.integrate_with(|_, y| y * y);
    Ok(BoundStateRadial {
        energy: sol.energy,
        mass: m,
        channel,
        scalar: scalar.clone(),
        nodes1: node_count(&psi1),
        nodes2: node_count(&psi2),
        psi1,
        psi2,
        norm,
        window,
        r_max: sol.setup.x_max,
        matching_point: sol.setup.rm,
        residual: sol.residual,
    })
}

/// Closed-form ground state of `V = S = -β/r` for `d = 2`, `j = 1/2`,
/// `τ = -1`, `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoulombExact {
    pub beta: f64,
    pub energy: f64,
    /// Decay rate `√(1 - E²) = 2β(E + 1)`.
    pub kappa: f64,
}

impl CoulombExact {
    /// Upper component `√r e^{-κ r}` (unnormalized).
    pub fn psi1(&self, r: f64) -> f64 {
        r.sqrt() * (-self.kappa * r).exp()
    }

    /// Lower component `-2β ψ₁`.
    pub fn psi2(&self, r: f64) -> f64 {
        -2.0 * self.beta * self.psi1(r)
    }

    /// Residual of `E² - 1 + (2β(E + 1))² = 0`.
    pub fn quadratic_residual(&self) -> f64 {
        self.energy * self.energy - 1.0 + (2.0 * self.beta * (self.energy + 1.0)).powi(2)
    }
}

pub fn coulomb_exact_d2(beta: f64) -> Result<CoulombExact, SolveError> {
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(SolveError::InvalidProblem(format!(
            "beta = {beta} outside (0, 1/2]: no bound state in (-1, 1)"
        )));
    }
    let b2 = 4.0 * beta * beta;
    let energy = (1.0 - b2) / (1.0 + b2);
    Ok(CoulombExact { beta, energy, kappa: 2.0 * beta * (energy + 1.0) })
}

/// `ψ₁ r^{k_d}` (s = +1) or `ψ₂ r^{-k_d}` (s = -1) must be monotone.
pub fn check_lemma2(state: &BoundStateRadial, mode: SymmetryMode) -> LemmaCheck {
    let k = state.channel.kd();
    let f = match mode {
        SymmetryMode::Spin => state.psi1.map(|r, y| y * r.powf(k)),
        SymmetryMode::PseudoSpin => state.psi2.map(|r, y| y * r.powf(-k)),
    };
    monotone_check(&f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeStructure {
    pub nodes1: usize,
    pub nodes2: usize,
    /// Sign of `s k_d`.
    pub sk_sign: i32,
    /// `s k_d < 0` guarantees node-free components.
    pub nodeless_expected: bool,
    /// Expected node-free but counted nodes.
    pub mismatch: bool,
}

pub fn node_structure(state: &BoundStateRadial, mode: SymmetryMode) -> NodeStructure {
    let sk = mode.s() * state.channel.kd();
    let nodeless_expected = sk < 0.0;
    NodeStructure {
        nodes1: state.nodes1,
        nodes2: state.nodes2,
        sk_sign: if sk < 0.0 { -1 } else { 1 },
        nodeless_expected,
        mismatch: nodeless_expected && (state.nodes1 + state.nodes2) > 0,
    }
}

//! Schrödinger-like reduction of the symmetric (`S = sV`) problems and an
//! independent Numerov solver for it.
//!
//! The component `ψ_q` satisfies
//!
//! ```text
//! -ψ'' + (k(k + s)/r² + 2(E + sm) V) ψ = (E² - m²) ψ
//! ```
//!
//! with `k = 0` and an even `ψ` in one dimension. The energy enters both
//! sides, so the Dirac eigenvalue is the self-consistent `E` at which this
//! equation has a decaying, node-free solution.

use serde::{Deserialize, Serialize};

use crate::diracd::{Channel, ScalarCoupling};
use crate::potentials::{classify, energy_window, Component, PotentialSpec, SymmetryMode};
use crate::shooting::{energy_samples, sweep_direction, SolveError, SolverConfig};
use crate::numerics::find_root_bracketed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedProblem {
    pub potential: PotentialSpec,
    pub mode: SymmetryMode,
    pub mass: f64,
    pub energy: f64,
    /// `k(k + s)`; zero in one dimension.
    pub centrifugal: f64,
    /// `2(E + sm)`.
    pub coupling: f64,
    /// `E² - m²`.
    pub eigenvalue: f64,
    pub component: Component,
}

impl ReducedProblem {
    /// `k(k+s)/r² + 2(E + sm) V(r)`.
    pub fn effective_potential(&self, r: f64) -> f64 {
        let cent = if self.centrifugal == 0.0 { 0.0 } else { self.centrifugal / (r * r) };
        cent + self.coupling * self.potential.value(r)
    }
}

fn reduce(v: &PotentialSpec, mode: SymmetryMode, m: f64, e: f64, k: f64) -> ReducedProblem {
    let s = mode.s();
    ReducedProblem {
        potential: v.clone(),
        mode,
        mass: m,
        energy: e,
        centrifugal: k * (k + s),
        coupling: 2.0 * (e + s * m),
        eigenvalue: e * e - m * m,
        component: mode.q(),
    }
}

pub fn reduce_to_schrodinger_1d(v: &PotentialSpec, mode: SymmetryMode, m: f64, e: f64) -> ReducedProblem {
    reduce(v, mode, m, e, 0.0)
}

/// Defined only for `S = sV`.
pub fn reduce_to_schrodinger_radial(
    v: &PotentialSpec,
    scalar: &ScalarCoupling,
    m: f64,
    channel: Channel,
    e: f64,
) -> Result<ReducedProblem, SolveError> {
    match scalar {
        ScalarCoupling::Symmetric(mode) => Ok(reduce(v, *mode, m, e, channel.kd())),
        ScalarCoupling::Explicit(_) => Err(SolveError::ReductionUndefined),
    }
}

/// Numerov grid in the variable `t` (`t = x` in one dimension, `t = ln r`
/// radially) with `u'' = Q(t) u`.
struct NumerovGrid {
    t0: f64,
    h: f64,
    q: Vec<f64>,
    /// Index of the matching point.
    im: usize,
}

#[derive(Clone, Copy)]
enum Geometry {
    /// Even solution on `[0, X]`.
    Line,
    /// Log grid on `[r₀, X]`; `nu` is the exponent of `u ~ e^{ν t}`.
    Radial { nu: f64, r0: f64 },
}

const RENORM: f64 = 1e150;

fn build(p: &ReducedProblem, geom: Geometry, cfg: &SolverConfig) -> NumerovGrid {
    let l = 1.0 / p.mass;
    let cap = cfg.max_radius * l;
    let f = |r: f64| p.effective_potential(r) - p.eigenvalue;
    // outermost turning point, then the decay budget
    let r_first = match geom {
        Geometry::Line => 0.0,
        Geometry::Radial { r0, .. } => r0,
    };
    let mut rs = vec![];
    let mut fs = vec![];
    let mut r = r_first;
    while r < cap {
        let v = f(r);
        if v.is_finite() {
            rs.push(r);
            fs.push(v);
        }
        r += (0.01 * r).max(0.001 * l);
    }
    let it = fs.iter().rposition(|&v| v <= 0.0).unwrap_or(0);
    let mut x_max = cap;
    let mut acc = 0.0;
    for i in it..rs.len().saturating_sub(1) {
        acc += 0.5 * (fs[i].max(0.0).sqrt() + fs[i + 1].max(0.0).sqrt()) * (rs[i + 1] - rs[i]);
        if acc >= cfg.decay_exponent {
            x_max = rs[i + 1];
            break;
        }
    }
    let r_turn = rs[it].max(r_first);
    let (t0, t1, to_r): (f64, f64, Box<dyn Fn(f64) -> f64>) = match geom {
        Geometry::Line => (0.0, x_max, Box::new(|t| t)),
        Geometry::Radial { r0, .. } => (r0.ln(), x_max.ln(), Box::new(|t: f64| t.exp())),
    };
    let qfun = |t: f64| -> f64 {
        let r = to_r(t);
        match geom {
            Geometry::Line => f(r),
            Geometry::Radial { .. } => r * r * f(r) + 0.25,
        }
    };
    // step from the stiffest point: h² max|Q| ≤ 0.004
    let probe = 2000;
    let qmax = (0..=probe)
        .map(|i| qfun(t0 + (t1 - t0) * i as f64 / probe as f64).abs())
        .filter(|v| v.is_finite())
        .fold(1.0_f64, f64::max);
    let n = (((t1 - t0) / (0.004 / qmax).sqrt()).ceil() as usize).clamp(4000, 400_000);
    let h = (t1 - t0) / n as f64;
    let q: Vec<f64> = (0..=n).map(|i| qfun(t0 + h * i as f64)).collect();
    let t_turn = match geom {
        Geometry::Line => r_turn,
        Geometry::Radial { .. } => r_turn.ln(),
    };
    let im = (((t_turn - t0) / h).round() as usize).clamp(2, n - 3);
    NumerovGrid { t0, h, q, im }
}

struct Shot {
    /// Glued solution (outward up to `im`, scaled inward beyond).
    u: Vec<f64>,
    mismatch: f64,
}

fn shoot(grid: &NumerovGrid, geom: Geometry) -> Shot {
    let n = grid.q.len() - 1;
    let h2 = grid.h * grid.h / 12.0;
    let q = &grid.q;
    let step = |u0: f64, u1: f64, i: usize, j: usize, k: usize| {
        // i: current, j: previous, k: next
        (2.0 * (1.0 + 5.0 * h2 * q[i]) * u1 - (1.0 - h2 * q[j]) * u0) / (1.0 - h2 * q[k])
    };
    let im = grid.im;
    let mut out = vec![0.0; im + 2];
    match geom {
        Geometry::Line => {
            out[0] = 1.0;
            out[1] = (1.0 + 5.0 * h2 * q[0]) / (1.0 - h2 * q[1]);
        }
        Geometry::Radial { nu, .. } => {
            out[0] = 1.0;
            out[1] = (nu * grid.h).exp();
        }
    }
    for i in 1..=im {
        out[i + 1] = step(out[i - 1], out[i], i, i - 1, i + 1);
        if out[i + 1].abs() > RENORM {
            out[..=i + 1].iter_mut().for_each(|v| *v /= RENORM);
        }
    }
    let mut inw = vec![0.0; n + 1];
    inw[n] = 0.0;
    inw[n - 1] = 1e-30;
    for i in (im..n).rev() {
        inw[i - 1] = step(inw[i + 1], inw[i], i, i + 1, i - 1);
        if inw[i - 1].abs() > RENORM {
            inw[i - 1..].iter_mut().for_each(|v| *v /= RENORM);
        }
    }
    let (a0, a1) = (out[im], out[im + 1]);
    let (b0, b1) = (inw[im], inw[im + 1]);
    let mismatch = (a0 * b1 - a1 * b0) / (a0.hypot(a1) * b0.hypot(b1));
    let c = if b0.abs() >= b1.abs() { a0 / b0 } else { a1 / b1 };
    let mut u = out[..=im].to_vec();
    u.extend(inw[im + 1..].iter().map(|v| v * c));
    Shot { u, mismatch }
}

fn sign_changes(u: &[f64]) -> usize {
    let max = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * max;
    let mut last = 0.0_f64;
    let mut count = 0;
    for &v in u {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

fn self_consistent(
    v: &PotentialSpec,
    mode: SymmetryMode,
    m: f64,
    k: f64,
    radial: bool,
    cfg: &SolverConfig,
) -> Result<f64, SolveError> {
    v.validate()?;
    cfg.validate()?;
    let window = energy_window(classify(v, mode), mode, m)?;
    let geom = if radial {
        Geometry::Radial { nu: (k + mode.s() / 2.0).abs(), r0: cfg.origin_offset / m }
    } else {
        Geometry::Line
    };
    let mismatch_at = |e: f64, fixed: Option<&NumerovGrid>| -> (f64, usize) {
        let p = reduce(v, mode, m, e, k);
        match fixed {
            Some(g) => {
                // same discretization, new energy
                let g2 = rebuild(g, &p, geom);
                let s = shoot(&g2, geom);
                (s.mismatch, sign_changes(&s.u))
            }
            None => {
                let g = build(&p, geom, cfg);
                let s = shoot(&g, geom);
                (s.mismatch, sign_changes(&s.u))
            }
        }
    };
    let mut prev: Option<(f64, f64)> = None;
    for chunk in energy_samples(window, sweep_direction(window, mode.s()), m, cfg) {
        for e in chunk {
            let (w, _) = mismatch_at(e, None);
            if !w.is_finite() || w == 0.0 {
                continue;
            }
            if let Some((ep, wp)) = prev {
                if (w > 0.0) != (wp > 0.0) {
                    let (lo, hi) = if ep < e { (ep, e) } else { (e, ep) };
                    let g = build(&reduce(v, mode, m, 0.5 * (lo + hi), k), geom, cfg);
                    if let Ok(root) =
                        find_root_bracketed(|x| mismatch_at(x, Some(&g)).0, lo, hi, cfg.eig_tol)
                    {
                        if mismatch_at(root, Some(&g)).1 == 0 {
                            return Ok(root);
                        }
                    }
                }
            }
            prev = Some((e, w));
        }
    }
    Err(SolveError::NoEigenvalue { lo: window.lo, hi: window.hi })
}

fn rebuild(g: &NumerovGrid, p: &ReducedProblem, geom: Geometry) -> NumerovGrid {
    let q = (0..g.q.len())
        .map(|i| {
            let t = g.t0 + g.h * i as f64;
            match geom {
                Geometry::Line => p.effective_potential(t) - p.eigenvalue,
                Geometry::Radial { .. } => {
                    let r = t.exp();
                    r * r * (p.effective_potential(r) - p.eigenvalue) + 0.25
                }
            }
        })
        .collect();
    NumerovGrid { t0: g.t0, h: g.h, q, im: g.im }
}

/// Self-consistent ground-state energy of the one-dimensional reduction.
pub fn solve_reduced_1d(
    v: &PotentialSpec,
    mode: SymmetryMode,
    m: f64,
    cfg: &SolverConfig,
) -> Result<f64, SolveError> {
    if !v.finite_at_origin() {
        return Err(SolveError::InvalidProblem("one-dimensional potential must be finite at 0".into()));
    }
    self_consistent(v, mode, m, 0.0, false, cfg)
}

/// Self-consistent ground-state energy of the radial reduction.
pub fn solve_reduced_radial(
    v: &PotentialSpec,
    mode: SymmetryMode,
    m: f64,
    channel: Channel,
    cfg: &SolverConfig,
) -> Result<f64, SolveError> {
    channel.validate()?;
    self_consistent(v, mode, m, channel.kd(), true, cfg)
}

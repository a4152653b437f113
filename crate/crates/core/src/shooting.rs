//! Two-sided shooting for the first-order Dirac system in radial form
//!
//! ```text
//! ψ₁' = -(k/r) ψ₁ + (m + E + S - V) ψ₂
//! ψ₂' = (m - E + S + V) ψ₁ + (k/r) ψ₂
//! ```
//!
//! The one-dimensional system is the `k = 0` case with the sign of the
//! second component flipped. Outward data come from the origin (a parity
//! vector, or the leading terms of the Frobenius series at a singular
//! origin); inward data are the decaying eigenvector of the frozen
//! coefficient matrix. Eigenvalues are zeros of the normalized Wronskian of
//! the two solutions at the matching point.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{
    find_root_bracketed, integrate_ode, NumericsError, OdeConfig, SampledFunction, State,
    Termination,
};
use crate::numerics::Grid;
use crate::potentials::{EnergyWindow, PotentialError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("no admissible eigenvalue found in the energy window ({lo}, {hi})")]
    NoEigenvalue { lo: f64, hi: f64 },
    #[error("the second-order reduction is only defined for S = sV")]
    ReductionUndefined,
}

/// Tolerances and search parameters shared by every eigenvalue solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Width of the final energy bracket.
    pub eig_tol: f64,
    /// Energy samples per scan chunk.
    pub scan_steps: usize,
    /// `∫κ dr` from the matching point to the outer boundary.
    pub decay_exponent: f64,
    /// Radial start point in units of `1/m`.
    pub origin_offset: f64,
    /// Largest outer boundary in units of `1/m`.
    pub max_radius: f64,
    /// Minimum number of output samples across the domain.
    pub dense_points: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            eig_tol: 1e-10,
            scan_steps: 400,
            decay_exponent: 40.0,
            origin_offset: 1e-6,
            max_radius: 1e4,
            dense_points: 2000,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolveError> {
        let positive = [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("eig_tol", self.eig_tol),
            ("decay_exponent", self.decay_exponent),
            ("origin_offset", self.origin_offset),
            ("max_radius", self.max_radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolveError::InvalidProblem(format!("{name} must be positive")));
            }
        }
        if self.scan_steps < 4 || self.dense_points < 2 {
            return Err(SolveError::InvalidProblem(
                "scan_steps must be >= 4 and dense_points >= 2".into(),
            ));
        }
        Ok(())
    }

    pub(crate) fn ode(&self) -> OdeConfig {
        OdeConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            overflow_limit: 1e200,
            ..OdeConfig::default()
        }
    }
}

pub(crate) type Matrix = [[f64; 2]; 2];

/// Outward initial data.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Start {
    /// Regular origin at `r = 0` with the given state.
    Regular(State),
    /// Singular origin; `c_v = lim r V`, `c_s = lim r S`.
    Series { c_v: f64, c_s: f64 },
}

pub(crate) struct DiracSystem<'a> {
    pub v: &'a dyn Fn(f64) -> f64,
    pub s: &'a dyn Fn(f64) -> f64,
    pub m: f64,
    pub k: f64,
    pub start: Start,
}

/// Matching point and outer boundary for one trial energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Setup {
    pub rm: f64,
    pub x_max: f64,
}

/// Unnormalized glued solution at an eigenvalue.
#[derive(Debug, Clone)]
pub(crate) struct Solution {
    pub energy: f64,
    pub psi1: SampledFunction,
    pub psi2: SampledFunction,
    pub setup: Setup,
    pub residual: f64,
}

struct Track {
    ts: Vec<f64>,
    ys: Vec<State>,
    dys: Vec<State>,
    log_scale: Vec<f64>,
}

impl Track {
    fn last(&self) -> (State, f64) {
        let n = self.ts.len() - 1;
        (self.ys[n], self.log_scale[n])
    }
}

fn norm(y: State) -> f64 {
    y[0].hypot(y[1])
}

impl DiracSystem<'_> {
    pub fn length_scale(&self) -> f64 {
        1.0 / self.m
    }

    pub fn matrix(&self, r: f64, e: f64) -> Matrix {
        let (v, s) = ((self.v)(r), (self.s)(r));
        let kr = if self.k == 0.0 { 0.0 } else { self.k / r };
        [[-kr, self.m + e + s - v], [self.m - e + s + v, kr]]
    }

    /// Squared local decay rate `(m+S)² - (E-V)² + k²/r²`.
    pub fn kappa2(&self, r: f64, e: f64) -> f64 {
        let a = self.matrix(r, e);
        a[0][0] * a[0][0] + a[0][1] * a[1][0]
    }

    /// Start point and unit initial state of the outward integration.
    pub fn start_point(&self, e: f64, cfg: &SolverConfig) -> Result<(f64, State), SolveError> {
        match self.start {
            Start::Regular(y) => Ok((0.0, y)),
            Start::Series { c_v, c_s } => {
                let k = self.k;
                let disc = k * k + c_s * c_s - c_v * c_v;
                if !(disc > 0.0) {
                    return Err(SolveError::InvalidProblem(format!(
                        "no regular solution at the origin: k² + c_S² - c_V² = {disc}"
                    )));
                }
                let g = disc.sqrt();
                // keep r0^γ well inside the double range
                let r0 = cfg.origin_offset.max(10f64.powf(-100.0 / g)) * self.length_scale();
                let a0: Matrix = [[-k, c_s - c_v], [c_s + c_v, k]];
                let c1 = [a0[0][1], g + k];
                let c2 = [g - k, a0[1][0]];
                let v0 = if norm(c1) >= norm(c2) { c1 } else { c2 };
                let n0 = norm(v0);
                let v0 = [v0[0] / n0, v0[1] / n0];
                // (A0 - (γ+1) I) v1 = -B v0 with B the regular part of the matrix
                let a = self.matrix(r0, e);
                let b = [
                    [a[0][0] - a0[0][0] / r0, a[0][1] - a0[0][1] / r0],
                    [a[1][0] - a0[1][0] / r0, a[1][1] - a0[1][1] / r0],
                ];
                let rhs = [
                    -(b[0][0] * v0[0] + b[0][1] * v0[1]),
                    -(b[1][0] * v0[0] + b[1][1] * v0[1]),
                ];
                let mm = [[a0[0][0] - g - 1.0, a0[0][1]], [a0[1][0], a0[1][1] - g - 1.0]];
                let det = mm[0][0] * mm[1][1] - mm[0][1] * mm[1][0];
                let v1 = [
                    (rhs[0] * mm[1][1] - mm[0][1] * rhs[1]) / det,
                    (mm[0][0] * rhs[1] - mm[1][0] * rhs[0]) / det,
                ];
                let y = [v0[0] + r0 * v1[0], v0[1] + r0 * v1[1]];
                let ny = norm(y);
                if !(ny.is_finite() && ny > 0.0) {
                    return Err(SolveError::Numerics(NumericsError::NonFinite { at: r0 }));
                }
                Ok((r0, [y[0] / ny, y[1] / ny]))
            }
        }
    }

    /// Matching point (outermost classical turning point, else the minimum
    /// of the decay rate) and the outer boundary where `∫κ` reaches the
    /// configured decay exponent.
    pub fn setup(&self, e: f64, r_start: f64, cfg: &SolverConfig) -> Setup {
        let l = self.length_scale();
        let cap = cfg.max_radius * l;
        let mut rs = Vec::with_capacity(1024);
        let mut k2s = Vec::with_capacity(1024);
        let mut r = r_start;
        while r < cap {
            let probe = if r == 0.0 && self.k != 0.0 { 1e-300 } else { r };
            let k2 = self.kappa2(probe, e);
            if k2.is_finite() {
                rs.push(r);
                k2s.push(k2);
            }
            r += (0.02 * r).max(0.002 * l);
        }
        rs.push(cap);
        k2s.push(self.kappa2(cap, e));
        let turning = k2s.iter().rposition(|&k2| k2 <= 0.0);
        let im = match turning {
            Some(i) => i,
            None => {
                // no allowed region: take the first point where the decay
                // rate is within a few percent of its minimum, so a slowly
                // flattening tail does not push the match out to the cap
                let min = k2s.iter().copied().fold(f64::INFINITY, f64::min);
                k2s.iter().position(|&k2| k2 <= 1.05 * min).unwrap_or(0)
            }
        };
        let im = im.min(rs.len() - 2);
        let mut rm = rs[im];
        if rm <= r_start {
            rm = r_start + 0.5 * (rs[im + 1] - r_start);
        }
        let mut acc = 0.0;
        let mut x_max = cap;
        for i in im..rs.len() - 1 {
            let ka = k2s[i].max(0.0).sqrt();
            let kb = k2s[i + 1].max(0.0).sqrt();
            acc += 0.5 * (ka + kb) * (rs[i + 1] - rs[i]);
            if acc >= cfg.decay_exponent {
                x_max = rs[i + 1];
                break;
            }
        }
        if x_max <= rm {
            x_max = rm + 0.002 * l;
        }
        Setup { rm, x_max }
    }

    /// Unit vector along the decaying solution of the frozen system at `r`,
    /// oriented with a nonnegative first component.
    fn decaying(&self, r: f64, e: f64) -> State {
        let a = self.matrix(r, e);
        let kap = self.kappa2(r, e).max(0.0).sqrt();
        let sg = if a[0][1] < 0.0 { -1.0 } else { 1.0 };
        let c1 = [a[0][1] * sg, -(a[0][0] + kap) * sg];
        let c2 = [kap - a[0][0], -a[1][0]];
        let v = if norm(c1) >= norm(c2) { c1 } else { c2 };
        let n = norm(v);
        if n > 0.0 {
            [v[0] / n, v[1] / n]
        } else {
            [1.0, 0.0]
        }
    }

    fn integrate(
        &self,
        e: f64,
        t0: f64,
        y0: State,
        t1: f64,
        cfg: &SolverConfig,
        max_step: f64,
    ) -> Result<Track, SolveError> {
        let rhs = |r: f64, y: State| {
            let a = self.matrix(r, e);
            [a[0][0] * y[0] + a[0][1] * y[1], a[1][0] * y[0] + a[1][1] * y[1]]
        };
        let mut ode = cfg.ode();
        ode.max_step = max_step;
        let mut track = Track { ts: vec![], ys: vec![], dys: vec![], log_scale: vec![] };
        let (mut t, mut y, mut log) = (t0, y0, 0.0);
        loop {
            let sol = integrate_ode(rhs, t, y, t1, &ode)?;
            let skip = usize::from(!track.ts.is_empty());
            for i in skip..sol.ts.len() {
                track.ts.push(sol.ts[i]);
                track.ys.push(sol.ys[i]);
                track.dys.push(sol.dys[i]);
                track.log_scale.push(log);
            }
            match sol.termination {
                Termination::Completed => return Ok(track),
                Termination::Overflow { .. } => {
                    let (tl, yl) = (sol.ts[sol.ts.len() - 1], sol.last());
                    if tl == t {
                        return Err(SolveError::Numerics(NumericsError::NonFinite { at: t }));
                    }
                    let n = norm(yl);
                    log += n.ln();
                    t = tl;
                    y = [yl[0] / n, yl[1] / n];
                }
            }
        }
    }

    fn tracks(
        &self,
        e: f64,
        setup: Setup,
        cfg: &SolverConfig,
        max_step: f64,
    ) -> Result<(Track, Track), SolveError> {
        let (r0, y0) = self.start_point(e, cfg)?;
        let out = self.integrate(e, r0, y0, setup.rm, cfg, max_step)?;
        let yin = self.decaying(setup.x_max, e);
        let inw = self.integrate(e, setup.x_max, yin, setup.rm, cfg, max_step)?;
        Ok((out, inw))
    }

    /// Normalized Wronskian `sin Δ` of the outward and inward solutions.
    pub fn mismatch(&self, e: f64, setup: Setup, cfg: &SolverConfig) -> Result<f64, SolveError> {
        let (out, inw) = self.tracks(e, setup, cfg, f64::INFINITY)?;
        let (a, _) = out.last();
        let (b, _) = inw.last();
        let w = (a[0] * b[1] - a[1] * b[0]) / (norm(a) * norm(b));
        if w.is_finite() {
            Ok(w)
        } else {
            Err(SolveError::Numerics(NumericsError::NonFinite { at: setup.rm }))
        }
    }

    fn mismatch_fresh(&self, e: f64, cfg: &SolverConfig) -> Result<(f64, Setup), SolveError> {
        let (r0, _) = self.start_point(e, cfg)?;
        let setup = self.setup(e, r0, cfg);
        Ok((self.mismatch(e, setup, cfg)?, setup))
    }

    /// Glued solution sampled densely on `(r_start, x_max]`.
    pub fn solution(&self, e: f64, setup: Setup, cfg: &SolverConfig) -> Result<Solution, SolveError> {
        let (r0, _) = self.start_point(e, cfg)?;
        let max_step = (setup.x_max - r0) / cfg.dense_points as f64;
        let (out, inw) = self.tracks(e, setup, cfg, max_step)?;
        let (a, log_a) = out.last();
        let (b, log_b) = inw.last();
        let c_in = (a[0] * b[0] + a[1] * b[1]) / (b[0] * b[0] + b[1] * b[1]);
        let mut ts = Vec::with_capacity(out.ts.len() + inw.ts.len());
        let mut ys: Vec<State> = Vec::with_capacity(ts.capacity());
        let mut dys: Vec<State> = Vec::with_capacity(ts.capacity());
        for i in 0..out.ts.len() {
            let f = (out.log_scale[i] - log_a).exp();
            ts.push(out.ts[i]);
            ys.push([out.ys[i][0] * f, out.ys[i][1] * f]);
            dys.push([out.dys[i][0] * f, out.dys[i][1] * f]);
        }
        for i in (0..inw.ts.len() - 1).rev() {
            let f = c_in * (inw.log_scale[i] - log_b).exp();
            ts.push(inw.ts[i]);
            ys.push([inw.ys[i][0] * f, inw.ys[i][1] * f]);
            dys.push([inw.dys[i][0] * f, inw.dys[i][1] * f]);
        }
        let grid = Grid::new(ts)?;
        let comp = |c: usize| {
            SampledFunction::with_slopes(
                grid.clone(),
                ys.iter().map(|y| y[c]).collect(),
                dys.iter().map(|y| y[c]).collect(),
            )
        };
        let (psi1, psi2) = (comp(0)?, comp(1)?);
        let residual = self.residual(e, &psi1, &psi2);
        Ok(Solution { energy: e, psi1, psi2, setup, residual })
    }

    /// Largest per-interval defect of the integral form
    /// `ψ(b) - ψ(a) = ∫_a^b A ψ`, by Simpson's rule on the Hermite
    /// interpolant, relative to the largest component magnitude.
    pub fn residual(&self, e: f64, psi1: &SampledFunction, psi2: &SampledFunction) -> f64 {
        let pts = psi1.points();
        let (y1, y2) = (psi1.values(), psi2.values());
        let scale = psi1.max_abs().max(psi2.max_abs());
        if scale == 0.0 {
            return 0.0;
        }
        let f = |r: f64, a: f64, b: f64| {
            let m = self.matrix(r, e);
            [m[0][0] * a + m[0][1] * b, m[1][0] * a + m[1][1] * b]
        };
        let mut worst = 0.0_f64;
        for i in 0..pts.len() - 1 {
            let (x0, x1) = (pts[i], pts[i + 1]);
            let xm = 0.5 * (x0 + x1);
            let fa = f(x0, y1[i], y2[i]);
            let fb = f(x1, y1[i + 1], y2[i + 1]);
            let fm = f(xm, psi1.midpoint_value(i), psi2.midpoint_value(i));
            let h = x1 - x0;
            for c in 0..2 {
                let (ya, yb) = if c == 0 { (y1[i], y1[i + 1]) } else { (y2[i], y2[i + 1]) };
                let d = yb - ya - h / 6.0 * (fa[c] + 4.0 * fm[c] + fb[c]);
                if d.is_finite() {
                    worst = worst.max(d.abs());
                }
            }
        }
        worst / scale
    }

    fn refine(&self, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<Solution, SolveError> {
        let mid = 0.5 * (lo + hi);
        let (r0, _) = self.start_point(mid, cfg)?;
        let setup = self.setup(mid, r0, cfg);
        let f = |e: f64| self.mismatch(e, setup, cfg).unwrap_or(f64::NAN);
        let (f_lo, f_hi) = (f(lo), f(hi));
        let root = if f_lo * f_hi < 0.0 {
            find_root_bracketed(f, lo, hi, cfg.eig_tol)?
        } else {
            find_root_bracketed(
                |e| self.mismatch_fresh(e, cfg).map(|x| x.0).unwrap_or(f64::NAN),
                lo,
                hi,
                cfg.eig_tol,
            )?
        };
        self.solution(root, setup, cfg)
    }

    /// Walks the energy samples of `window` in `direction` and returns the
    /// first eigenstate accepted by `accept`.
    pub fn search(
        &self,
        window: EnergyWindow,
        direction: Direction,
        cfg: &SolverConfig,
        accept: &mut dyn FnMut(&Solution) -> bool,
    ) -> Result<Solution, SolveError> {
        let mut prev: Option<(f64, f64)> = None;
        for chunk in energy_samples(window, direction, self.m, cfg) {
            for e in chunk {
                let w = match self.mismatch_fresh(e, cfg) {
                    Ok((w, _)) if w != 0.0 => w,
                    _ => continue,
                };
                if let Some((ep, wp)) = prev {
                    if (w > 0.0) != (wp > 0.0) {
                        let (lo, hi) = if ep < e { (ep, e) } else { (e, ep) };
                        if let Ok(sol) = self.refine(lo, hi, cfg) {
                            if accept(&sol) {
                                return Ok(sol);
                            }
                        }
                    }
                }
                prev = Some((e, w));
            }
        }
        Err(SolveError::NoEigenvalue { lo: window.lo, hi: window.hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Up,
    Down,
}

/// Scan direction: a finite window is walked in the direction of
/// increasing `sE`, a half-infinite one away from its finite edge.
pub(crate) fn sweep_direction(window: EnergyWindow, s: f64) -> Direction {
    match (window.lo.is_finite(), window.hi.is_finite()) {
        (true, true) if s > 0.0 => Direction::Up,
        (true, true) => Direction::Down,
        (true, false) => Direction::Up,
        _ => Direction::Down,
    }
}

/// Trial energies in chunks, ordered along `direction`. A finite window is
/// one chunk, densified geometrically toward both edges. A half-infinite
/// window is covered by chunks of doubling width moving away from its
/// finite edge.
pub(crate) fn energy_samples(
    window: EnergyWindow,
    direction: Direction,
    m: f64,
    cfg: &SolverConfig,
) -> Vec<Vec<f64>> {
    let n = cfg.scan_steps;
    let refine = |edge: f64, step: f64| -> Vec<f64> { (1..=12).map(|j| edge + step * 0.5f64.powi(j)).collect() };
    let sort = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v.dedup();
        if direction == Direction::Down {
            v.reverse();
        }
        v
    };
    if window.lo.is_finite() && window.hi.is_finite() {
        let step = (window.hi - window.lo) / n as f64;
        let mut v: Vec<f64> = (1..n).map(|i| window.lo + step * i as f64).collect();
        v.extend(refine(window.lo, step));
        v.extend(refine(window.hi, -step));
        return vec![sort(v)];
    }
    let (edge, away) = if window.lo.is_finite() { (window.lo, 1.0) } else { (window.hi, -1.0) };
    let w = m.max(f64::MIN_POSITIVE);
    let mut chunks = Vec::new();
    for c in 0..9 {
        let a = edge + away * w * (2f64.powi(c) - 1.0);
        let b = edge + away * w * (2f64.powi(c + 1) - 1.0);
        let step = (b - a) / n as f64;
        let mut v: Vec<f64> = (1..=n).map(|i| a + step * i as f64).collect();
        if c == 0 {
            v.extend(refine(edge, step));
        }
        chunks.push(sort(v));
    }
    chunks
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn decay_rate_matches_definition() {
        let v = |r: f64| -0.3 / r;
        let s = |r: f64| -0.1 / r;
        let sys = DiracSystem { v: &v, s: &s, m: 1.0, k: -1.5, start: Start::Series { c_v: -0.3, c_s: -0.1 } };
        let (r, e) = (2.0, 0.4);
        let expect = (1.0 + s(r)).powi(2) - (e - v(r)).powi(2) + 1.5f64.powi(2) / (r * r);
        assert_abs_diff_eq!(sys.kappa2(r, e), expect, epsilon = 1e-14);
    }

    #[test]
    fn series_start_follows_leading_power() {
        // pure Coulomb, S = V: the exact state is ψ ∝ r^{1/2} e^{-κ r}
        let beta: f64 = 0.172;
        let v = move |r: f64| -beta / r;
        let sys = DiracSystem { v: &v, s: &v, m: 1.0, k: -0.5, start: Start::Series { c_v: -beta, c_s: -beta } };
        let e = (1.0 - 4.0 * beta * beta) / (1.0 + 4.0 * beta * beta);
        let (_, y) = sys.start_point(e, &SolverConfig::default()).unwrap();
        // ψ₂ = -2β ψ₁ exactly
        assert_abs_diff_eq!(y[1] / y[0], -2.0 * beta, epsilon = 1e-9);
    }

    #[test]
    fn free_particle_mismatch_has_no_root() {
        let zero = |_: f64| 0.0;
        let sys = DiracSystem { v: &zero, s: &zero, m: 1.0, k: 0.0, start: Start::Regular([1.0, 0.0]) };
        let cfg = SolverConfig { scan_steps: 40, ..SolverConfig::default() };
        let w = EnergyWindow { lo: -1.0, hi: 1.0 };
        let r = sys.search(w, Direction::Up, &cfg, &mut |_| true);
        assert!(matches!(r, Err(SolveError::NoEigenvalue { .. })));
    }

    #[test]
    fn sample_ordering() {
        let cfg = SolverConfig { scan_steps: 10, ..SolverConfig::default() };
        let fin = energy_samples(EnergyWindow { lo: -1.0, hi: 1.0 }, Direction::Down, 1.0, &cfg);
        assert_eq!(fin.len(), 1);
        assert!(fin[0].windows(2).all(|w| w[1] < w[0]));
        assert!(fin[0].iter().all(|&e| e > -1.0 && e < 1.0));
        let semi = energy_samples(
            EnergyWindow { lo: f64::NEG_INFINITY, hi: -1.0 },
            Direction::Down,
            1.0,
            &cfg,
        );
        let flat: Vec<f64> = semi.concat();
        assert!(flat.windows(2).all(|w| w[1] < w[0]));
        assert!(flat[0] < -1.0 && flat[0] > -1.01);
    }
}

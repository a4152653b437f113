//! Dormand–Prince 5(4) integration of two-component first-order systems.
//!
//! The integrator keeps every accepted step together with the exact slope
//! at that node, so the components come back as Hermite-interpolable
//! [`SampledFunction`]s.

use super::{Grid, NumericsError, SampledFunction};

pub type State = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Upper bound on the step length; `f64::INFINITY` leaves it free.
    pub max_step: f64,
    pub max_steps: usize,
    /// Integration stops (without error) once a component exceeds this.
    pub overflow_limit: f64,
}

impl Default for OdeConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            max_step: f64::INFINITY,
            max_steps: 200_000,
            overflow_limit: 1e250,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// Components blew up at `at`; samples up to that point are kept.
    Overflow { at: f64 },
}

#[derive(Debug, Clone)]
pub struct OdeSolution {
    pub ts: Vec<f64>,
    pub ys: Vec<State>,
    pub dys: Vec<State>,
    pub termination: Termination,
}

impl OdeSolution {
    pub fn last(&self) -> State {
        self.ys[self.ys.len() - 1]
    }

    pub fn completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    /// Both components as sampled functions on an increasing grid.
    pub fn components(&self) -> Result<(SampledFunction, SampledFunction), NumericsError> {
        let mut idx: Vec<usize> = (0..self.ts.len()).collect();
        if self.ts.len() > 1 && self.ts[1] < self.ts[0] {
            idx.reverse();
        }
        let grid = Grid::new(idx.iter().map(|&i| self.ts[i]).collect())?;
        let comp = |c: usize| -> Result<SampledFunction, NumericsError> {
            SampledFunction::with_slopes(
                grid.clone(),
                idx.iter().map(|&i| self.ys[i][c]).collect(),
                idx.iter().map(|&i| self.dys[i][c]).collect(),
            )
        };
        Ok((comp(0)?, comp(1)?))
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn axpy(y: State, terms: &[(f64, State)], h: f64) -> State {
    let mut out = y;
    for &(c, k) in terms {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

fn err_norm(err: State, y0: State, y1: State, cfg: &OdeConfig) -> f64 {
    (0..2)
        .map(|i| {
            let sc = cfg.abs_tol + cfg.rel_tol * y0[i].abs().max(y1[i].abs());
            (err[i] / sc).abs()
        })
        .fold(0.0, f64::max)
}

/// Integrates `y' = rhs(t, y)` from `(t0, y0)` to `t1` (either direction).
///
/// Overflow of the components is reported through
/// [`OdeSolution::termination`], not as an error: shooting deliberately
/// feeds trial energies whose solutions blow up.
pub fn integrate_ode<F>(
    rhs: F,
    t0: f64,
    y0: State,
    t1: f64,
    cfg: &OdeConfig,
) -> Result<OdeSolution, NumericsError>
where
    F: Fn(f64, State) -> State,
{
    if !(t0.is_finite() && t1.is_finite()) || y0.iter().any(|v| !v.is_finite()) {
        return Err(NumericsError::NonFinite { at: t0 });
    }
    let span = t1 - t0;
    let dir = if span >= 0.0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut f = rhs(t, y);
    let mut sol = OdeSolution {
        ts: vec![t],
        ys: vec![y],
        dys: vec![f],
        termination: Termination::Completed,
    };
    if span == 0.0 {
        return Ok(sol);
    }

    let mut h = initial_step(&rhs, t, y, f, span.abs(), dir, cfg).min(cfg.max_step);
    let mut steps = 0usize;
    while dir * (t1 - t) > 0.0 {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(NumericsError::TooManySteps { at: t });
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        if last {
            h = remaining;
        }
        let hs = dir * h;
        let k1 = f;
        let k2 = rhs(t + C2 * hs, axpy(y, &[(A21, k1)], hs));
        let k3 = rhs(t + C3 * hs, axpy(y, &[(A31, k1), (A32, k2)], hs));
        let k4 = rhs(t + C4 * hs, axpy(y, &[(A41, k1), (A42, k2), (A43, k3)], hs));
        let k5 = rhs(
            t + C5 * hs,
            axpy(y, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], hs),
        );
        let k6 = rhs(
            t + hs,
            axpy(y, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], hs),
        );
        let y_new = axpy(y, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)], hs);
        let t_new = if last { t1 } else { t + hs };
        let k7 = rhs(t_new, y_new);
        let err = axpy(
            [0.0, 0.0],
            &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
            hs,
        );
        let en = err_norm(err, y, y_new, cfg);
        if !en.is_finite() {
            if y_new.iter().any(|v| !v.is_finite()) && h < 1e-3 * span.abs() {
                sol.termination = Termination::Overflow { at: t };
                return Ok(sol);
            }
            h *= 0.2;
            continue;
        }
        if en <= 1.0 {
            t = t_new;
            y = y_new;
            f = k7;
            sol.ts.push(t);
            sol.ys.push(y);
            sol.dys.push(f);
            if y[0].abs().max(y[1].abs()) > cfg.overflow_limit {
                sol.termination = Termination::Overflow { at: t };
                return Ok(sol);
            }
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            h = (h * fac).min(cfg.max_step);
        } else {
            h *= (0.9 * en.powf(-0.2)).clamp(0.1, 1.0);
            if h <= 1e-14 * t.abs().max(span.abs()) {
                return Err(NumericsError::StepUnderflow { at: t });
            }
        }
    }
    Ok(sol)
}

fn initial_step<F>(
    rhs: &F,
    t: f64,
    y: State,
    f: State,
    span: f64,
    dir: f64,
    cfg: &OdeConfig,
) -> f64
where
    F: Fn(f64, State) -> State,
{
    let sc = |i: usize| cfg.abs_tol + cfg.rel_tol * y[i].abs();
    let d0 = (0..2).map(|i| (y[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / 2f64.sqrt();
    let d1 = (0..2).map(|i| (f[i] / sc(i)).powi(2)).sum::<f64>().sqrt() / 2f64.sqrt();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1 = [y[0] + dir * h0 * f[0], y[1] + dir * h0 * f[1]];
    let f1 = rhs(t + dir * h0, y1);
    let d2 = (0..2)
        .map(|i| ((f1[i] - f[i]) / sc(i)).powi(2))
        .sum::<f64>()
        .sqrt()
        / 2f64.sqrt()
        / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(span).max(1e-12 * span)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn zero_dynamics_stay_constant() {
        let sol = integrate_ode(|_, _| [0.0, 0.0], 0.0, [1.0, 1.0], 1.0, &OdeConfig::default())
            .unwrap();
        assert_eq!(sol.last(), [1.0, 1.0]);
        assert!(sol.completed());
    }

    #[test]
    fn exponential_growth() {
        let sol = integrate_ode(|_, y| [y[1], y[0]], 0.0, [1.0, 1.0], 1.0, &OdeConfig::default())
            .unwrap();
        assert_abs_diff_eq!(sol.last()[0], E, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.last()[1], E, epsilon = 1e-10);
    }

    #[test]
    fn backward_integration() {
        let sol = integrate_ode(|_, y| [y[1], -y[0]], 1.0, [1.0f64.cos(), -1.0f64.sin()], 0.0, &OdeConfig::default())
            .unwrap();
        assert_abs_diff_eq!(sol.last()[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sol.last()[1], 0.0, epsilon = 1e-10);
        let (c, _) = sol.components().unwrap();
        assert_eq!(c.points()[0], 0.0);
    }

    #[test]
    fn overflow_is_reported() {
        let cfg = OdeConfig { overflow_limit: 1e10, ..OdeConfig::default() };
        let sol = integrate_ode(|_, y| [10.0 * y[0], 0.0], 0.0, [1.0, 0.0], 10.0, &cfg).unwrap();
        assert!(matches!(sol.termination, Termination::Overflow { .. }));
    }

    #[test]
    fn singular_rhs_underflows() {
        // y' = 1/(1-t)^2 blows up at t = 1 only through the step size
        let res = integrate_ode(
            |t, _| [1.0 / (1.0 - t).powi(2), 0.0],
            0.0,
            [0.0, 0.0],
            1.0,
            &OdeConfig { overflow_limit: f64::INFINITY, ..OdeConfig::default() },
        );
        assert!(res.is_err() || !res.unwrap().completed());
    }

    #[test]
    fn free_dirac_decay_matches_closed_form() {
        // phi1' = -(E+m) phi2, phi2' = (E-m) phi1, V = S = 0, m = 1, E = 0.5,
        // phi(0) = (0, 1). With k = sqrt(m^2 - E^2):
        //   phi1 = -(E+m)/k sinh(kx),  phi2 = cosh(kx).
        let (m, e) = (1.0f64, 0.5f64);
        let k = (m * m - e * e).sqrt();
        assert_abs_diff_eq!(k, 0.75f64.sqrt(), epsilon = 1e-15);
        let sol = integrate_ode(
            |_, y| [-(e + m) * y[1], (e - m) * y[0]],
            0.0,
            [0.0, 1.0],
            1.0,
            &OdeConfig::default(),
        )
        .unwrap();
        for (t, y) in sol.ts.iter().zip(&sol.ys) {
            assert_abs_diff_eq!(y[0], -(e + m) / k * (k * t).sinh(), epsilon = 1e-9);
            assert_abs_diff_eq!(y[1], (k * t).cosh(), epsilon = 1e-9);
        }
    }
}

use serde::{Deserialize, Serialize};

use super::NumericsError;

/// Interval whose end values have opposite signs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Root of `f` in `[lo, hi]` to within `tol`.
///
/// Bisection carries the guarantee; once the bracket is narrower than
/// `tol` a single secant step inside it polishes the estimate.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, NumericsError> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa * fb < 0.0) {
        return Err(NumericsError::NoSignChange { lo: a, hi: b, f_lo: fa, f_hi: fb });
    }
    let mut fb = fb;
    let tol = tol.max(4.0 * f64::EPSILON * a.abs().max(b.abs()));
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if !fm.is_finite() {
            return Err(NumericsError::NonFinite { at: m });
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
            fb = fm;
        }
    }
    let secant = a - fa * (b - a) / (fb - fa);
    if secant.is_finite() && secant > a && secant < b {
        Ok(secant)
    } else {
        Ok(0.5 * (a + b))
    }
}

/// Brackets of sign changes of `f` on `[a, b]` sampled every `step`.
/// Exact zeros on the sampling grid are stepped over, so a bracket always
/// has nonzero values of opposite sign at its ends.
pub fn scan_sign_changes<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, step: f64) -> Vec<Bracket> {
    let mut out = Vec::new();
    if !(step > 0.0) || !(b > a) {
        return out;
    }
    let n = ((b - a) / step).ceil() as usize;
    let mut last: Option<(f64, f64)> = None;
    for i in 0..=n {
        let x = if i == n { b } else { a + step * i as f64 };
        let v = f(x);
        if !v.is_finite() || v == 0.0 {
            continue;
        }
        if let Some((xl, vl)) = last {
            if (v > 0.0) != (vl > 0.0) {
                out.push(Bracket { lo: xl, hi: x, f_lo: vl, f_hi: v });
            }
        }
        last = Some((x, v));
    }
    out
}

/// Default scan step: 2048 samples across the interval.
pub fn default_scan_step(a: f64, b: f64) -> f64 {
    (b - a) / 2048.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn simple_roots() {
        assert_abs_diff_eq!(find_root_bracketed(|x| x - 0.5, 0.0, 1.0, 1e-12).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(find_root_bracketed(f64::sin, 3.0, 4.0, 1e-12).unwrap(), PI, epsilon = 1e-12);
    }

    #[test]
    fn coulomb_eigenvalue_quadratic() {
        let beta: f64 = 0.172;
        let e = find_root_bracketed(
            |e| e * e - 1.0 + (2.0 * beta * (e + 1.0)).powi(2),
            0.0,
            1.0,
            1e-12,
        )
        .unwrap();
        assert_abs_diff_eq!(e, 0.78837, epsilon = 1e-5);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-10),
            Err(NumericsError::NoSignChange { .. })
        ));
    }

    #[test]
    fn scan_constant_is_empty() {
        assert!(scan_sign_changes(|_| 1.0, 0.0, 10.0, 0.1).is_empty());
    }

    #[test]
    fn scan_cubic_phase_crossings() {
        // zeros of sin(x^3 + beta) x^2 / 2 on (0, 5]: x = (k pi - beta)^(1/3)
        let beta = 1.64;
        let f = |x: f64| (x.powi(3) + beta).sin() * x * x * 0.5;
        let brackets = scan_sign_changes(f, 0.0, 5.0, default_scan_step(0.0, 5.0));
        let expected: Vec<f64> = (1..)
            .map(|k| (k as f64 * PI - beta).cbrt())
            .take_while(|&x| x < 5.0)
            .collect();
        assert_eq!(brackets.len(), expected.len());
        for (br, x) in brackets.iter().zip(&expected) {
            let r = find_root_bracketed(f, br.lo, br.hi, 1e-13).unwrap();
            assert_abs_diff_eq!(r, *x, epsilon = 1e-8);
        }
    }
}

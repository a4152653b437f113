//! Globally adaptive Gauss–Kronrod quadrature, truncated improper
//! integrals, and lobe-by-lobe integration of oscillatory integrands.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum bisection depth of any subinterval.
    pub max_depth: u32,
    /// `|f|` below this on three consecutive probes ends an improper integral.
    pub truncation_threshold: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-11,
            rel_tol: 1e-10,
            max_depth: 48,
            truncation_threshold: 1e-14,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.truncation_threshold > 0.0)
            || self.max_depth == 0
        {
            return Err(NumericsError::InvalidConfig(
                "quadrature tolerances and depth must be positive".into(),
            ));
        }
        Ok(())
    }
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// 15-point Kronrod rule with the QUADPACK error estimate.
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let fc = f(centr);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let absc = hlgth * XGK[j];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = resk * 0.5;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let result = resk * hlgth;
    resabs *= hlgth.abs();
    resasc *= hlgth.abs();
    let mut abserr = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * (200.0 * abserr / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    (result, abserr)
}

fn adaptive_finite<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64), NumericsError> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = qk15(f, a, b);
    if !v.is_finite() {
        return Err(NumericsError::NonFinite { at: 0.5 * (a + b) });
    }
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e, depth: 0 });
    let (mut total, mut err) = (v, e);
    let max_segments = 20_000usize;
    loop {
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if err <= tol {
            return Ok((total, err));
        }
        let worst = heap.pop().expect("heap never empties");
        // Roundoff floor: nothing left to gain from splitting this one.
        if worst.error <= 100.0 * f64::EPSILON * worst.value.abs().max(f64::MIN_POSITIVE)
            && err <= 10.0 * tol
        {
            return Ok((total, err));
        }
        if worst.depth >= cfg.max_depth || heap.len() >= max_segments {
            return Err(NumericsError::MaxDepthExceeded {
                a: worst.a,
                b: worst.b,
                error: err,
            });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1) = qk15(f, worst.a, mid);
        let (v2, e2) = qk15(f, mid, worst.b);
        if !(v1.is_finite() && v2.is_finite()) {
            return Err(NumericsError::NonFinite { at: mid });
        }
        total += v1 + v2 - worst.value;
        err += e1 + e2 - worst.error;
        let depth = worst.depth + 1;
        heap.push(Segment { a: worst.a, b: mid, value: v1, error: e1, depth });
        heap.push(Segment { a: mid, b: worst.b, value: v2, error: e2, depth });
        if heap.len() % 64 == 0 {
            // resum to keep the running totals honest
            total = heap.iter().map(|s| s.value).sum();
            err = heap.iter().map(|s| s.error).sum();
        }
    }
}

/// Point beyond which `|f|` stays under the truncation threshold.
fn truncation_point<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, NumericsError> {
    let mut x = a;
    let mut quiet = 0;
    let limit = 1e15 * a.abs().max(1.0);
    while x < limit {
        x += 0.25 * x.abs().max(1.0);
        let v = f(x);
        if !v.is_finite() {
            return Err(NumericsError::NonFinite { at: x });
        }
        // x|f(x)| bounds the remaining area for anything decaying faster than 1/x
        if v.abs() * x.abs().max(1.0) < cfg.truncation_threshold {
            quiet += 1;
            if quiet == 3 {
                return Ok(x);
            }
        } else {
            quiet = 0;
        }
    }
    Err(NumericsError::NonDecayingTail { last_probe: x })
}

/// `∫_a^b f`, with `b = f64::INFINITY` allowed for integrands that decay
/// below the truncation threshold.
pub fn quad_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, NumericsError> {
    quad_adaptive_with_error(f, a, b, cfg).map(|(v, _)| v)
}

/// As [`quad_adaptive`], also returning the error estimate.
pub fn quad_adaptive_with_error<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    cfg: &QuadratureConfig,
) -> Result<(f64, f64), NumericsError> {
    cfg.validate()?;
    if b.is_infinite() && b > 0.0 {
        let end = truncation_point(&f, a, cfg)?;
        // geometric pieces keep early structure from being under-resolved
        let mut lo = a;
        let mut width = 1.0_f64;
        let (mut total, mut err) = (0.0, 0.0);
        while lo < end {
            let hi = (lo + width).min(end);
            let (v, e) = adaptive_finite(&f, lo, hi, cfg)?;
            total += v;
            err += e;
            lo = hi;
            width *= 2.0;
        }
        return Ok((total, err));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    if b < a {
        return adaptive_finite(&f, b, a, cfg).map(|(v, e)| (-v, e));
    }
    adaptive_finite(&f, a, b, cfg)
}

/// Signed total and absolute lobe areas of an oscillatory integrand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryResult {
    pub total: f64,
    pub lobes: Vec<f64>,
}

impl OscillatoryResult {
    pub fn lobes_nonincreasing(&self) -> bool {
        self.lobes.windows(2).all(|w| w[1] <= w[0])
    }
}

fn check_sign_change<F: Fn(f64) -> f64>(f: &F, z: f64, left: f64, right: f64) -> Result<(), NumericsError> {
    let d = 1e-6 * (right - left).min(1.0);
    let (l, r) = (f(z - d), f(z + d));
    let scale = f(0.5 * (left + z)).abs().max(f(0.5 * (z + right)).abs());
    if l * r > 0.0 && l.abs().min(r.abs()) > 1e-6 * scale {
        return Err(NumericsError::NotASignChange { at: z });
    }
    Ok(())
}

/// Integrates `f` lobe by lobe between consecutive entries of `zeros`.
///
/// The first and last entries are integration limits; every interior entry
/// must be a sign change of `f`.
pub fn quad_oscillatory<F: Fn(f64) -> f64>(
    f: F,
    zeros: &[f64],
    cfg: &QuadratureConfig,
) -> Result<OscillatoryResult, NumericsError> {
    if zeros.len() < 2 {
        return Err(NumericsError::InvalidInterval {
            a: zeros.first().copied().unwrap_or(f64::NAN),
            b: f64::NAN,
        });
    }
    if let Some(w) = zeros.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(NumericsError::InvalidInterval { a: w[0], b: w[1] });
    }
    for i in 1..zeros.len() - 1 {
        check_sign_change(&f, zeros[i], zeros[i - 1], zeros[i + 1])?;
    }
    let mut total = 0.0;
    let mut lobes = Vec::with_capacity(zeros.len() - 1);
    for w in zeros.windows(2) {
        let v = quad_adaptive(&f, w[0], w[1], cfg)?;
        total += v;
        lobes.push(v.abs());
    }
    Ok(OscillatoryResult { total, lobes })
}

/// Infinite alternating tail `∫_start^∞ f`, where `zero(k)` (k = 0, 1, ...)
/// enumerates the sign changes after `start`.
///
/// Lobes are accumulated until one falls below `1e-12`; partial sums are
/// accelerated with Wynn's epsilon algorithm, which is what makes slowly
/// decaying (1/x) tails tractable. The returned lobe list holds the lobes
/// actually integrated.
pub fn quad_oscillatory_tail<F, Z>(
    f: F,
    start: f64,
    zero: Z,
    cfg: &QuadratureConfig,
) -> Result<OscillatoryResult, NumericsError>
where
    F: Fn(f64) -> f64,
    Z: Fn(usize) -> f64,
{
    let mut lobes = Vec::new();
    let mut partial = Vec::new();
    let mut sum = 0.0;
    let mut left = start;
    let mut previous_estimate = f64::NAN;
    let mut stable = 0;
    for k in 0..4000 {
        let right = zero(k);
        if !(right > left) {
            return Err(NumericsError::InvalidInterval { a: left, b: right });
        }
        let v = quad_adaptive(&f, left, right, cfg)?;
        sum += v;
        lobes.push(v.abs());
        partial.push(sum);
        left = right;
        if v.abs() < 1e-12 {
            return Ok(OscillatoryResult { total: sum, lobes });
        }
        if partial.len() >= 8 {
            let est = wynn_epsilon(&partial);
            let tol = cfg.abs_tol.max(cfg.rel_tol * est.abs());
            if (est - previous_estimate).abs() <= tol {
                stable += 1;
                if stable >= 3 {
                    return Ok(OscillatoryResult { total: est, lobes });
                }
            } else {
                stable = 0;
            }
            previous_estimate = est;
        }
    }
    Err(NumericsError::NonDecayingTail { last_probe: left })
}

/// Wynn's epsilon extrapolation of a sequence of partial sums.
pub fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    if n < 3 {
        return s[n - 1];
    }
    // e[k] holds column k of the epsilon table over the trailing entries.
    let mut prev: Vec<f64> = vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = s[n - 1];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let base = prev[i + 1];
            let v = if d == 0.0 { f64::INFINITY } else { base + 1.0 / d };
            next.push(v);
        }
        col += 1;
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                } else {
                    break;
                }
            }
        }
    }
    best
}

use serde::{Deserialize, Serialize};

use super::{TheoremError, TransformConfig, SIGN_TOL};
use crate::diracd::{Channel, CoulombExact};
use crate::numerics::{
    find_root_bracketed, quad_adaptive, scan_sign_changes, wynn_epsilon, Grid, SampledFunction,
};
use crate::potentials::{Component, SymmetryMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    G,
    P,
    Rho,
    Mu,
}

impl TransformKind {
    pub fn name(self) -> &'static str {
        match self {
            TransformKind::G => "g",
            TransformKind::P => "p",
            TransformKind::Rho => "rho",
            TransformKind::Mu => "mu",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightDescriptor {
    None,
    Wavefunction,
    PowerLaw { exponent: f64 },
    WavefunctionPowerLaw { exponent: f64 },
}

/// Positive weight multiplying `V_b - V_a` inside a transform.
#[derive(Debug, Clone, Copy)]
pub enum Weight<'a> {
    Unit,
    /// `t^p`
    Power(f64),
    /// `|f(t)| t^p`, zero outside the sampled range.
    Sampled { f: &'a SampledFunction, power: f64 },
    /// `|ψ₁(t)| t^p` of the closed-form Coulomb state.
    Exact { state: CoulombExact, power: f64 },
}

fn pow(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        t.powf(p)
    }
}

impl Weight<'_> {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Weight::Unit => 1.0,
            Weight::Power(p) => pow(t, p),
            Weight::Sampled { f, power } => {
                if t < f.points()[0] || t > f.points()[f.len() - 1] {
                    0.0
                } else {
                    f.eval(t).abs() * pow(t, power)
                }
            }
            Weight::Exact { state, power } => state.psi1(t).abs() * pow(t, power),
        }
    }

    /// Where the weight becomes identically zero.
    pub fn support_end(&self) -> f64 {
        match *self {
            Weight::Sampled { f, .. } => f.points()[f.len() - 1],
            _ => f64::INFINITY,
        }
    }

    pub fn descriptor(&self) -> WeightDescriptor {
        match *self {
            Weight::Unit => WeightDescriptor::None,
            Weight::Power(exponent) => WeightDescriptor::PowerLaw { exponent },
            Weight::Sampled { power, .. } | Weight::Exact { power, .. } => {
                if power == 0.0 {
                    WeightDescriptor::Wavefunction
                } else {
                    WeightDescriptor::WavefunctionPowerLaw { exponent: power }
                }
            }
        }
    }

    /// `d(t) w(t)`, taken as zero wherever the weight vanishes so that
    /// singular differences never meet a zero weight as `∞ · 0`.
    pub(crate) fn apply<'b>(&'b self, d: &'b dyn Fn(f64) -> f64) -> impl Fn(f64) -> f64 + 'b {
        move |t| {
            let w = self.eval(t);
            if w == 0.0 {
                0.0
            } else {
                d(t) * w
            }
        }
    }
}

/// A cumulative transform sampled on `[0, extension_factor · R]`, with
/// the value at infinity and the minimum including a bound on the far
/// tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformCurve {
    pub which: TransformKind,
    pub weight: WeightDescriptor,
    pub curve: SampledFunction,
    /// Infimum over `[0, ∞)`; `-∞` when the transform diverges downward.
    pub min_value: f64,
    pub min_location: f64,
    /// Limit at infinity; `±∞` when the integral diverges.
    pub final_value: f64,
    /// Largest finite magnitude on the curve.
    pub scale: f64,
    pub nonnegative: bool,
    /// End of the dense sampling `R`.
    pub domain_end: f64,
}

impl TransformCurve {
    pub fn value_at(&self, x: f64) -> f64 {
        self.curve.eval(x)
    }
}

/// Sign changes of `f` on `(lo, hi)` from a uniform scan of `samples`
/// steps, each refined to near machine precision.
pub(crate) fn refined_roots(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    let step = (hi - lo) / samples.max(1) as f64;
    scan_sign_changes(f, lo, hi, step)
        .into_iter()
        .filter_map(|b| find_root_bracketed(f, b.lo, b.hi, 1e-14 * b.hi.abs().max(1.0)).ok())
        .collect()
}

fn merge_points(mut pts: Vec<f64>, span: f64) -> Vec<f64> {
    pts.sort_by(|a, b| a.total_cmp(b));
    let gap = 1e-12 * span;
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&q) if p - q <= gap => {}
            _ => out.push(p),
        }
    }
    out
}

/// Cumulative transform `∫₀ˣ d(t) w(t) dt`.
pub fn weighted_transform(
    which: TransformKind,
    d: &dyn Fn(f64) -> f64,
    weight: Weight<'_>,
    domain_end: f64,
    cfg: &TransformConfig,
) -> Result<TransformCurve, TheoremError> {
    if !(domain_end > 0.0 && domain_end.is_finite()) {
        return Err(TheoremError::InvalidDomain(domain_end));
    }
    let f = weight.apply(d);
    let support = weight.support_end();
    let r = domain_end.min(support);
    let q = &cfg.quad;

    let mut pts: Vec<f64> = (0..=cfg.samples).map(|i| r * i as f64 / cfg.samples as f64).collect();
    pts.extend(refined_roots(&f, 0.0, r, cfg.scan_samples));
    pts.retain(|&x| x >= 0.0 && x <= r);
    let mut xs = merge_points(pts, r);
    let mut ys = vec![0.0; xs.len()];
    for i in 1..xs.len() {
        ys[i] = ys[i - 1] + quad_adaptive(&f, xs[i - 1], xs[i], q)?;
    }

    let cum_r = *ys.last().unwrap();
    let mut far_min = cum_r;
    let final_value;
    if support <= domain_end {
        // weight is identically zero past the sampled state
        final_value = cum_r;
    } else {
        let r2 = cfg.extension_factor.max(1.0) * r;
        let roots = refined_roots(&f, r, r2, cfg.extension_samples);
        let mut edges: Vec<f64> = roots.iter().copied().filter(|&x| x > r && x < r2).collect();
        edges.push(r2);
        let mut edges = merge_points(edges, r2);
        edges.retain(|&x| x > *xs.last().unwrap());
        let mut cum = cum_r;
        let mut lobes = Vec::with_capacity(edges.len());
        let mut left = r;
        for &e in &edges {
            let v = quad_adaptive(&f, left, e, q)?;
            cum += v;
            lobes.push(v);
            xs.push(e);
            ys.push(cum);
            left = e;
        }
        let interior = edges.len().saturating_sub(1);
        if interior >= 4 {
            // Oscillating tail: extrapolate the partial sums at the crossings
            // and bound the remainder by the last complete lobe.
            let start = ys.len() - 1 - interior;
            let partial: Vec<f64> = ys[start..ys.len() - 1].to_vec();
            let take = partial.len().min(40);
            let est = wynn_epsilon(&partial[partial.len() - take..]);
            let last_lobe = lobes[lobes.len() - 2].abs();
            final_value = est;
            far_min = (est - last_lobe).min(cum);
        } else {
            let sign_far = f(r2);
            match quad_adaptive(&f, r2, f64::INFINITY, q) {
                Ok(v) => {
                    final_value = cum + v;
                    far_min = final_value.min(cum);
                }
                Err(_) if sign_far >= 0.0 => {
                    final_value = f64::INFINITY;
                    far_min = cum;
                }
                Err(_) => {
                    final_value = f64::NEG_INFINITY;
                    far_min = f64::NEG_INFINITY;
                }
            }
        }
    }

    let (mut min_value, mut min_location) = (0.0, 0.0);
    for (&x, &y) in xs.iter().zip(&ys) {
        if y < min_value {
            min_value = y;
            min_location = x;
        }
    }
    if far_min < min_value {
        min_value = far_min;
        min_location = f64::INFINITY;
    }
    let mut scale = ys.iter().fold(0.0_f64, |m, y| m.max(y.abs()));
    if final_value.is_finite() {
        scale = scale.max(final_value.abs());
    }
    let curve = SampledFunction::new(Grid::new(xs)?, ys)?;
    Ok(TransformCurve {
        which,
        weight: weight.descriptor(),
        curve,
        min_value,
        min_location,
        final_value,
        scale,
        nonnegative: min_value >= -SIGN_TOL * scale,
        domain_end: r,
    })
}

/// `g(x) = ∫₀ˣ (V_b - V_a) dt`.
pub fn transform_g(
    va: &dyn Fn(f64) -> f64,
    vb: &dyn Fn(f64) -> f64,
    x_max: f64,
    cfg: &TransformConfig,
) -> Result<TransformCurve, TheoremError> {
    let d = |t: f64| vb(t) - va(t);
    weighted_transform(TransformKind::G, &d, Weight::Unit, x_max, cfg)
}

/// `p(x) = ∫₀ˣ (V_b - V_a) |φ_l| dt`; `component` says which component
/// `phi_l` is and must be the one designated by `mode`.
pub fn transform_p(
    va: &dyn Fn(f64) -> f64,
    vb: &dyn Fn(f64) -> f64,
    phi_l: &SampledFunction,
    component: Component,
    mode: SymmetryMode,
    cfg: &TransformConfig,
) -> Result<TransformCurve, TheoremError> {
    if component != mode.q() {
        return Err(TheoremError::SelectorMismatch { given: component, expected: mode.q(), mode });
    }
    let d = |t: f64| vb(t) - va(t);
    let end = phi_l.points()[phi_l.len() - 1];
    weighted_transform(TransformKind::P, &d, Weight::Sampled { f: phi_l, power: 0.0 }, end, cfg)
}

fn negative_sk(mode: SymmetryMode, channel: Channel) -> Result<f64, TheoremError> {
    channel.validate()?;
    let sk = mode.s() * channel.kd();
    if sk >= 0.0 {
        return Err(TheoremError::NotNodeless { sk });
    }
    Ok(sk)
}

/// `ρ(r) = ∫₀ʳ (V_b - V_a) t^{-2sk_d} dt`.
pub fn transform_rho(
    va: &dyn Fn(f64) -> f64,
    vb: &dyn Fn(f64) -> f64,
    mode: SymmetryMode,
    channel: Channel,
    r_max: f64,
    cfg: &TransformConfig,
) -> Result<TransformCurve, TheoremError> {
    let sk = negative_sk(mode, channel)?;
    let d = |t: f64| vb(t) - va(t);
    weighted_transform(TransformKind::Rho, &d, Weight::Power(-2.0 * sk), r_max, cfg)
}

/// Wavefunction entering `μ`.
#[derive(Debug, Clone, Copy)]
pub enum MuWeight<'a> {
    Sampled { f: &'a SampledFunction, component: Component },
    /// Upper component of the closed-form `d = 2` Coulomb state.
    CoulombExact(CoulombExact),
}

/// `μ(r) = ∫₀ʳ (V_b - V_a) |ψ_l| t^{-sk_d} dt`.
pub fn transform_mu(
    va: &dyn Fn(f64) -> f64,
    vb: &dyn Fn(f64) -> f64,
    psi_l: MuWeight<'_>,
    mode: SymmetryMode,
    channel: Channel,
    r_max: f64,
    cfg: &TransformConfig,
) -> Result<TransformCurve, TheoremError> {
    let sk = negative_sk(mode, channel)?;
    let weight = match psi_l {
        MuWeight::Sampled { f, component } => {
            if component != mode.q() {
                return Err(TheoremError::SelectorMismatch {
                    given: component,
                    expected: mode.q(),
                    mode,
                });
            }
            Weight::Sampled { f, power: -sk }
        }
        MuWeight::CoulombExact(state) => {
            if mode != SymmetryMode::Spin {
                return Err(TheoremError::SelectorMismatch {
                    given: Component::Upper,
                    expected: mode.q(),
                    mode,
                });
            }
            Weight::Exact { state, power: -sk }
        }
    };
    let d = |t: f64| vb(t) - va(t);
    weighted_transform(TransformKind::Mu, &d, weight, r_max, cfg)
}

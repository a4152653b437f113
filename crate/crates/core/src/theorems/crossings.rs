use serde::{Deserialize, Serialize};

use super::transforms::refined_roots;
use super::{TheoremError, TransformConfig, Weight, WeightDescriptor, SIGN_TOL};
use crate::numerics::quad_adaptive;

/// Sign changes of `V_b - V_a` on a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingSet {
    /// Increasing crossing points inside the domain.
    pub points: Vec<f64>,
    pub count: usize,
    /// `V_a ≤ V_b` on `[lo, x₁]` (the whole domain if there is no crossing).
    pub ordered_first_interval: bool,
    pub domain: (f64, f64),
    /// Further sign changes were found past the domain end.
    pub continues_beyond: bool,
}

fn ordered_on(d: &dyn Fn(f64) -> f64, lo: f64, hi: f64, samples: usize) -> bool {
    let n = samples.max(2);
    let vals: Vec<f64> = (0..=n)
        .map(|i| d(lo + (hi - lo) * i as f64 / n as f64))
        .filter(|v| v.is_finite())
        .collect();
    let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    vals.iter().all(|&v| v >= -SIGN_TOL * scale)
}

/// Crossings of `V_a` and `V_b` on `domain`, plus a finer scan of
/// `[hi, extension_factor · hi]` to see whether they continue.
pub fn detect_crossings(
    va: &dyn Fn(f64) -> f64,
    vb: &dyn Fn(f64) -> f64,
    domain: (f64, f64),
    cfg: &TransformConfig,
) -> CrossingSet {
    let d = |t: f64| vb(t) - va(t);
    let (lo, hi) = domain;
    let points: Vec<f64> = refined_roots(&d, lo, hi, cfg.scan_samples)
        .into_iter()
        .filter(|&x| x > lo && x < hi)
        .collect();
    let first_end = points.first().copied().unwrap_or(hi);
    let ordered_first_interval = ordered_on(&d, lo, first_end, cfg.scan_samples);
    let far = cfg.extension_factor.max(1.0) * hi;
    let continues_beyond = far > hi && !refined_roots(&d, hi, far, cfg.extension_samples).is_empty();
    CrossingSet { count: points.len(), points, ordered_first_interval, domain, continues_beyond }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaVerdict {
    /// The lobe areas imply the transform is nonnegative everywhere.
    Nonnegative,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaCheck {
    pub weight: WeightDescriptor,
    /// Absolute weighted areas between consecutive crossings, starting at
    /// the domain start.
    pub areas: Vec<f64>,
    /// Absolute areas after the last crossing: the whole remainder, or the
    /// lobes found in the extension when crossings continue.
    pub tail_areas: Vec<f64>,
    pub nonincreasing: bool,
    /// False when the first interval is not ordered.
    pub applicable: bool,
    pub verdict: AreaVerdict,
}

fn nonincreasing(seq: &[f64]) -> bool {
    let scale = seq.iter().copied().filter(|v| v.is_finite()).fold(0.0_f64, f64::max);
    seq.windows(2).all(|w| w[1] <= w[0] + SIGN_TOL * scale)
}

/// Weighted lobe-area test: with the first interval ordered, absolute
/// areas that never increase (and, for an odd crossing count, a tail no
/// larger than the last finite lobe) imply the transform stays
/// nonnegative.
pub fn corollary_area_check(
    va: &dyn Fn(f64) -> f64,
    vb: &dyn Fn(f64) -> f64,
    crossings: &CrossingSet,
    weight: Weight<'_>,
    cfg: &TransformConfig,
) -> Result<AreaCheck, TheoremError> {
    let descriptor = weight.descriptor();
    if !crossings.ordered_first_interval {
        return Ok(AreaCheck {
            weight: descriptor,
            areas: Vec::new(),
            tail_areas: Vec::new(),
            nonincreasing: false,
            applicable: false,
            verdict: AreaVerdict::Inconclusive,
        });
    }
    let d = |t: f64| vb(t) - va(t);
    let f = weight.apply(&d);
    let q = &cfg.quad;
    let (lo, hi) = crossings.domain;
    let support = weight.support_end();
    let points: Vec<f64> = crossings.points.iter().copied().filter(|&x| x < support).collect();

    let mut bounds = vec![lo];
    bounds.extend(&points);
    let mut areas = Vec::with_capacity(points.len());
    for w in bounds.windows(2) {
        areas.push(quad_adaptive(&f, w[0], w[1], q)?.abs());
    }
    let last = *bounds.last().unwrap();
    let n = points.len();
    let mut tail_areas = Vec::new();
    let oscillating = support.is_infinite() && crossings.continues_beyond;
    if support.is_finite() {
        tail_areas.push(quad_adaptive(&f, last, support, q)?.abs());
    } else if oscillating {
        let far = cfg.extension_factor.max(1.0) * hi;
        let mut left = last;
        for e in refined_roots(&d, hi, far, cfg.extension_samples) {
            if e > left {
                tail_areas.push(quad_adaptive(&f, left, e, q)?.abs());
                left = e;
            }
        }
    } else {
        // a divergent remainder is infinitely large
        let a = quad_adaptive(&f, last, f64::INFINITY, q).map(f64::abs).unwrap_or(f64::INFINITY);
        tail_areas.push(a);
    }

    let ok = if oscillating {
        let mut seq = areas.clone();
        seq.extend(&tail_areas);
        nonincreasing(&seq)
    } else {
        let mut ok = nonincreasing(&areas);
        if n % 2 == 1 {
            let a_last = areas[n - 1];
            let tail = tail_areas[0];
            ok &= tail <= a_last + SIGN_TOL * a_last;
        }
        ok
    };
    Ok(AreaCheck {
        weight: descriptor,
        areas,
        tail_areas,
        nonincreasing: ok,
        applicable: true,
        verdict: if ok { AreaVerdict::Nonnegative } else { AreaVerdict::Inconclusive },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PotentialSpec;
    use approx::assert_abs_diff_eq;

    fn cfg() -> TransformConfig {
        TransformConfig::default()
    }

    #[test]
    fn shifted_potential_has_no_crossing() {
        let va = |x: f64| x * x - 1.0;
        let vb = |x: f64| x * x;
        let c = detect_crossings(&va, &vb, (0.0, 5.0), &cfg());
        assert_eq!(c.count, 0);
        assert!(c.ordered_first_interval && !c.continues_beyond);
        let chk = corollary_area_check(&va, &vb, &c, Weight::Unit, &cfg()).unwrap();
        assert_eq!(chk.verdict, AreaVerdict::Nonnegative);
    }

    #[test]
    fn sine_modulated_crossings_and_lobes() {
        let va = PotentialSpec::Harmonic { a: 0.5 };
        let vb = PotentialSpec::SineModulatedHarmonic { b: 0.5, beta: 1.64 };
        let (fa, fb) = (|x| va.value(x), |x| vb.value(x));
        let c = detect_crossings(&fa, &fb, (0.0, 3.0), &cfg());
        // zeros of sin(x³ + β)
        for (k, x) in c.points.iter().enumerate() {
            let exact = ((k + 1) as f64 * std::f64::consts::PI - 1.64).cbrt();
            assert_abs_diff_eq!(*x, exact, epsilon = 1e-10);
        }
        assert_eq!(c.count, ((27.0 + 1.64) / std::f64::consts::PI) as usize);
        assert!(c.ordered_first_interval && c.continues_beyond);
        let chk = corollary_area_check(&fa, &fb, &c, Weight::Unit, &cfg()).unwrap();
        assert_eq!(chk.verdict, AreaVerdict::Nonnegative);
        let s = 0.5 / 3.0;
        assert_abs_diff_eq!(chk.areas[0] / s, 0.43810, epsilon = 1e-5);
        assert_abs_diff_eq!(chk.areas[1] / s, 0.43379, epsilon = 1e-5);
    }

    #[test]
    fn swapped_pair_is_inapplicable() {
        let va = PotentialSpec::Yukawa { alpha: 0.2, a: 0.1 };
        let vb = PotentialSpec::Coulomb { beta: 0.172 };
        let (fa, fb) = (|x| va.value(x), |x| vb.value(x));
        let c = detect_crossings(&fa, &fb, (0.0, 60.0), &cfg());
        assert_eq!(c.count, 1);
        assert_abs_diff_eq!(c.points[0], (0.2f64 / 0.172).ln() / 0.1, epsilon = 1e-10);
        assert!(c.ordered_first_interval && !c.continues_beyond);
        let s = detect_crossings(&fb, &fa, (0.0, 60.0), &cfg());
        assert!(!s.ordered_first_interval);
        let chk = corollary_area_check(&fb, &fa, &s, Weight::Unit, &cfg()).unwrap();
        assert!(!chk.applicable);
        assert_eq!(chk.verdict, AreaVerdict::Inconclusive);
    }

    #[test]
    fn two_crossings_with_negative_dip_is_inconclusive() {
        // positive, dips negative, positive again
        let va = |_: f64| 0.0;
        let vb = |x: f64| 0.1 * (x - 1.0) * (x - 4.0) * (-0.05 * x).exp();
        let c = detect_crossings(&va, &vb, (0.0, 10.0), &cfg());
        assert_eq!(c.count, 2);
        let chk = corollary_area_check(&va, &vb, &c, Weight::Unit, &cfg()).unwrap();
        // first lobe ∫₀¹ is smaller than the negative lobe ∫₁⁴
        assert!(chk.areas[0] < chk.areas[1]);
        assert_eq!(chk.verdict, AreaVerdict::Inconclusive);
    }
}

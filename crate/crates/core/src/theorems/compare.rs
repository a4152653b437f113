use serde::{Deserialize, Serialize};

use super::{
    corollary_area_check, detect_crossings, weighted_transform, AreaCheck, AreaVerdict,
    CrossingSet, TheoremError, TransformConfig, TransformKind, Weight, SIGN_TOL,
};
use crate::dirac1d::ParityChoice;
use crate::diracd::ScalarCoupling;
use crate::problem::{BoundState, Geometry, Problem};
use crate::shooting::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    /// Pointwise ordering of the potentials.
    #[serde(rename = "basic")]
    Basic,
    T1,
    T2,
    T3,
    T4,
    T5,
    C1,
    C2,
    C4,
    C5,
    #[serde(rename = "n-intersection")]
    NIntersection,
}

impl TheoremId {
    pub fn name(self) -> &'static str {
        match self {
            TheoremId::Basic => "basic",
            TheoremId::T1 => "T1",
            TheoremId::T2 => "T2",
            TheoremId::T3 => "T3",
            TheoremId::T4 => "T4",
            TheoremId::T5 => "T5",
            TheoremId::C1 => "C1",
            TheoremId::C2 => "C2",
            TheoremId::C4 => "C4",
            TheoremId::C5 => "C5",
            TheoremId::NIntersection => "n-intersection",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let all = [
            TheoremId::Basic,
            TheoremId::T1,
            TheoremId::T2,
            TheoremId::T3,
            TheoremId::T4,
            TheoremId::T5,
            TheoremId::C1,
            TheoremId::C2,
            TheoremId::C4,
            TheoremId::C5,
            TheoremId::NIntersection,
        ];
        all.into_iter().find(|t| t.name().eq_ignore_ascii_case(s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Prediction {
    #[serde(rename = "E_a<=E_b")]
    ALeB,
    #[serde(rename = "E_b<=E_a")]
    BLeA,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    #[default]
    Auto,
    Theorem(TheoremId),
}

/// Which ground state supplies the wavefunction weight of `p` and `μ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum WeightChoice {
    /// The closed-form Coulomb state when either problem has one, else `a`.
    #[default]
    Auto,
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompareOptions {
    pub strategy: Strategy,
    pub weight: WeightChoice,
    pub transform: TransformConfig,
}

/// One hypothesis test made while comparing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attempt {
    pub theorem: TheoremId,
    pub hypothesis_satisfied: bool,
    pub predicted: Prediction,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform_final: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub crossings: Option<CrossingSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area_check: Option<AreaCheck>,
}

impl Attempt {
    fn new(theorem: TheoremId, satisfied: bool, predicted: Prediction, detail: impl Into<String>) -> Self {
        Self {
            theorem,
            hypothesis_satisfied: satisfied,
            predicted: if satisfied { predicted } else { Prediction::Inconclusive },
            detail: detail.into(),
            transform_min: None,
            transform_final: None,
            crossings: None,
            area_check: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub theorem_applied: Option<TheoremId>,
    pub hypothesis_satisfied: bool,
    pub predicted: Prediction,
    pub energy_a: f64,
    pub energy_b: f64,
    /// `¬hypothesis ∨` the predicted ordering holds within `tolerance`.
    pub consistent: bool,
    /// Hypothesis satisfied but the eigenvalues are out of order.
    pub falsified: bool,
    pub tolerance: f64,
    /// Which ground state weighted `p`/`μ`, when one was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight_source: Option<String>,
    pub attempts: Vec<Attempt>,
}

/// Solves both problems (concurrently) and compares them.
pub fn compare(
    a: &Problem,
    b: &Problem,
    opts: &CompareOptions,
    cfg: &SolverConfig,
) -> Result<ComparisonReport, TheoremError> {
    check_compatible(a, b)?;
    let (sa, sb) = std::thread::scope(|s| {
        let ha = s.spawn(|| a.solve(cfg));
        let sb = b.solve(cfg);
        (ha.join().expect("solver thread panicked"), sb)
    });
    compare_solved(a, b, &sa?, &sb?, opts)
}

fn check_compatible(a: &Problem, b: &Problem) -> Result<(), TheoremError> {
    if a.mass != b.mass {
        return Err(TheoremError::Incompatible(format!("masses differ: {} vs {}", a.mass, b.mass)));
    }
    match (a.geometry, b.geometry) {
        (Geometry::Line { .. }, Geometry::Line { .. }) => {}
        (Geometry::Radial { channel: ca }, Geometry::Radial { channel: cb }) if ca == cb => {}
        _ => {
            return Err(TheoremError::Incompatible(
                "problems must share dimension and channel".into(),
            ))
        }
    }
    match (&a.scalar, &b.scalar) {
        (ScalarCoupling::Symmetric(ma), ScalarCoupling::Symmetric(mb)) if ma == mb => Ok(()),
        (ScalarCoupling::Explicit(_), ScalarCoupling::Explicit(_)) => Ok(()),
        _ => Err(TheoremError::Incompatible("problems must share the scalar coupling type".into())),
    }
}

struct Ctx<'a> {
    a: &'a Problem,
    b: &'a Problem,
    sa: &'a BoundState,
    sb: &'a BoundState,
    opts: &'a CompareOptions,
    domain_end: f64,
}

impl Ctx<'_> {
    fn d(&self) -> impl Fn(f64) -> f64 + '_ {
        move |t| self.b.potential.value(t) - self.a.potential.value(t)
    }

    fn radial(&self) -> bool {
        matches!(self.a.geometry, Geometry::Radial { .. })
    }

    /// Sign of `V_b - V_a` on `(0, extension · R]`.
    fn pointwise(&self) -> (bool, bool) {
        let d = self.d();
        let tc = &self.opts.transform;
        let far = tc.extension_factor.max(1.0) * self.domain_end;
        let n = tc.extension_samples.max(2);
        let vals: Vec<f64> = (1..=n).map(|i| d(far * i as f64 / n as f64)).filter(|v| v.is_finite()).collect();
        let scale = vals.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let tol = SIGN_TOL * scale;
        (vals.iter().all(|&v| v >= -tol), vals.iter().all(|&v| v <= tol))
    }

    fn basic(&self, theorem: TheoremId) -> Attempt {
        let (a_le_b, b_le_a) = self.pointwise();
        if a_le_b {
            Attempt::new(theorem, true, Prediction::ALeB, "V_a <= V_b everywhere")
        } else if b_le_a {
            Attempt::new(theorem, true, Prediction::BLeA, "V_a >= V_b everywhere")
        } else {
            Attempt::new(theorem, false, Prediction::Inconclusive, "potentials cross")
        }
    }

    fn t3(&self) -> Attempt {
        match (&self.a.scalar, &self.b.scalar) {
            (ScalarCoupling::Explicit(x), ScalarCoupling::Explicit(y)) if x == y => {
                self.basic(TheoremId::T3)
            }
            _ => Attempt::new(
                TheoremId::T3,
                false,
                Prediction::Inconclusive,
                "needs a common independent scalar potential",
            ),
        }
    }

    /// Refined theorems need node-free designated components.
    fn refined_precondition(&self, theorem: TheoremId) -> Option<Attempt> {
        let fail = |why: &str| Some(Attempt::new(theorem, false, Prediction::Inconclusive, why));
        let mode = self.a.mode()?;
        match (self.a.geometry, self.b.geometry) {
            (Geometry::Line { parity: pa }, Geometry::Line { parity: pb }) => {
                if pa != ParityChoice::Auto || pb != ParityChoice::Auto {
                    return fail("refined one-dimensional theorems need the ground-state parity");
                }
            }
            _ => {
                let sk = self.a.sk().unwrap_or(0.0);
                if sk >= 0.0 {
                    return fail("s k_d >= 0: node-free states are not guaranteed");
                }
            }
        }
        let q = mode.q();
        let nodes = |s: &BoundState| s.component(q).sign_changes(1e-12);
        if nodes(self.sa) != 0 || nodes(self.sb) != 0 {
            return fail("designated component has nodes");
        }
        None
    }

    fn weight_for(&self, weighted: bool) -> (Weight<'_>, Option<String>) {
        let sk = self.a.sk().unwrap_or(0.0);
        if !weighted {
            return if self.radial() { (Weight::Power(-2.0 * sk), None) } else { (Weight::Unit, None) };
        }
        let power = if self.radial() { -sk } else { 0.0 };
        let q = self.a.mode().expect("symmetric").q();
        let exact = match self.opts.weight {
            WeightChoice::Auto => self
                .b
                .coulomb_exact()
                .map(|c| (c, "b (closed-form Coulomb)"))
                .or_else(|| self.a.coulomb_exact().map(|c| (c, "a (closed-form Coulomb)"))),
            _ => None,
        };
        if let Some((state, label)) = exact {
            return (Weight::Exact { state, power }, Some(label.into()));
        }
        let (s, label) = match self.opts.weight {
            WeightChoice::B => (self.sb, "b"),
            _ => (self.sa, "a"),
        };
        (Weight::Sampled { f: s.component(q), power }, Some(label.into()))
    }

    fn corollary(&self, weighted: bool, forced: Option<TheoremId>) -> Result<(Attempt, Option<String>), TheoremError> {
        let base = match (self.radial(), weighted) {
            (false, false) => TheoremId::C1,
            (false, true) => TheoremId::C2,
            (true, false) => TheoremId::C4,
            (true, true) => TheoremId::C5,
        };
        let label = forced.unwrap_or(base);
        if let Some(at) = self.refined_precondition(label) {
            return Ok((at, None));
        }
        let (weight, source) = self.weight_for(weighted);
        let end = self.domain_end.min(weight.support_end());
        let va = |t: f64| self.a.potential.value(t);
        let vb = |t: f64| self.b.potential.value(t);
        let tc = &self.opts.transform;
        let crossings = detect_crossings(&va, &vb, (0.0, end), tc);
        let check = corollary_area_check(&va, &vb, &crossings, weight, tc)?;
        let many = crossings.count > 2 || (crossings.continues_beyond && weight.support_end().is_infinite());
        let theorem = forced.unwrap_or(if many { TheoremId::NIntersection } else { base });
        let ok = check.verdict == AreaVerdict::Nonnegative;
        let detail = if !check.applicable {
            "first interval not ordered (V_a > V_b near the origin)".to_string()
        } else if ok {
            format!("{} crossing(s); absolute lobe areas nonincreasing", crossings.count)
        } else {
            format!("{} crossing(s); lobe areas increase", crossings.count)
        };
        let mut at = Attempt::new(theorem, ok, Prediction::ALeB, detail);
        at.crossings = Some(crossings);
        at.area_check = Some(check);
        Ok((at, source))
    }

    fn direct(&self, weighted: bool) -> Result<(Attempt, Option<String>), TheoremError> {
        let (theorem, kind) = match (self.radial(), weighted) {
            (false, false) => (TheoremId::T1, TransformKind::G),
            (false, true) => (TheoremId::T2, TransformKind::P),
            (true, false) => (TheoremId::T4, TransformKind::Rho),
            (true, true) => (TheoremId::T5, TransformKind::Mu),
        };
        if let Some(at) = self.refined_precondition(theorem) {
            return Ok((at, None));
        }
        let (weight, source) = self.weight_for(weighted);
        let d = self.d();
        let curve = weighted_transform(kind, &d, weight, self.domain_end, &self.opts.transform)?;
        let detail = format!(
            "{} has minimum {:.6e} (final value {:.6e})",
            kind.name(),
            curve.min_value,
            curve.final_value
        );
        let mut at = Attempt::new(theorem, curve.nonnegative, Prediction::ALeB, detail);
        at.transform_min = Some(curve.min_value);
        at.transform_final = Some(curve.final_value);
        Ok((at, source))
    }

    fn run(&self, theorem: TheoremId) -> Result<(Attempt, Option<String>), TheoremError> {
        let radial = self.radial();
        let symmetric = self.a.mode().is_some();
        let geometry_ok = match theorem {
            TheoremId::T1 | TheoremId::T2 | TheoremId::C1 | TheoremId::C2 => !radial && symmetric,
            TheoremId::T4 | TheoremId::T5 | TheoremId::C4 | TheoremId::C5 => radial && symmetric,
            TheoremId::T3 => !symmetric,
            TheoremId::Basic | TheoremId::NIntersection => symmetric,
        };
        if !geometry_ok {
            return Err(TheoremError::NotApplicable(format!(
                "{} does not apply to this pair of problems",
                theorem.name()
            )));
        }
        match theorem {
            TheoremId::Basic => Ok((self.basic(TheoremId::Basic), None)),
            TheoremId::T3 => Ok((self.t3(), None)),
            TheoremId::T1 | TheoremId::T4 => self.direct(false),
            TheoremId::T2 | TheoremId::T5 => self.direct(true),
            TheoremId::C1 | TheoremId::C4 => self.corollary(false, Some(theorem)),
            TheoremId::C2 | TheoremId::C5 => self.corollary(true, Some(theorem)),
            TheoremId::NIntersection => self.corollary(false, Some(theorem)),
        }
    }
}

/// Compares two already solved problems. Refined theorems are only tried
/// in the `a → b` direction; the pointwise test works both ways.
pub fn compare_solved(
    a: &Problem,
    b: &Problem,
    sa: &BoundState,
    sb: &BoundState,
    opts: &CompareOptions,
) -> Result<ComparisonReport, TheoremError> {
    check_compatible(a, b)?;
    let ctx = Ctx { a, b, sa, sb, opts, domain_end: sa.domain_end().max(sb.domain_end()), };
    let mut attempts = Vec::new();
    let mut chosen: Option<(Attempt, Option<String>)> = None;

    let plan: Vec<TheoremId> = match opts.strategy {
        Strategy::Theorem(t) => vec![t],
        Strategy::Auto if a.mode().is_none() => vec![TheoremId::T3],
        Strategy::Auto if ctx.radial() => {
            vec![TheoremId::Basic, TheoremId::C4, TheoremId::T4, TheoremId::C5, TheoremId::T5]
        }
        Strategy::Auto => vec![TheoremId::Basic, TheoremId::C1, TheoremId::T1, TheoremId::C2, TheoremId::T2],
    };
    for t in plan {
        // corollaries relabel themselves; automatic runs do not force a label
        let (at, src) = match (opts.strategy, t) {
            (Strategy::Auto, TheoremId::C1 | TheoremId::C4) => ctx.corollary(false, None)?,
            (Strategy::Auto, TheoremId::C2 | TheoremId::C5) => ctx.corollary(true, None)?,
            _ => ctx.run(t)?,
        };
        let done = at.hypothesis_satisfied;
        attempts.push(at.clone());
        if done {
            chosen = Some((at, src));
            break;
        }
    }

    let (ea, eb) = (sa.energy(), sb.energy());
    let tol = opts.transform.tolerance;
    let (theorem_applied, predicted, weight_source) = match chosen {
        Some((at, src)) => (Some(at.theorem), at.predicted, src),
        None => (None, Prediction::Inconclusive, None),
    };
    let holds = match predicted {
        Prediction::ALeB => ea <= eb + tol,
        Prediction::BLeA => eb <= ea + tol,
        Prediction::Inconclusive => true,
    };
    let hypothesis_satisfied = predicted != Prediction::Inconclusive;
    Ok(ComparisonReport {
        theorem_applied,
        hypothesis_satisfied,
        predicted,
        energy_a: ea,
        energy_b: eb,
        consistent: holds,
        falsified: hypothesis_satisfied && !holds,
        tolerance: tol,
        weight_source,
        attempts,
    })
}

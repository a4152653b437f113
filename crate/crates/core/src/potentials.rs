//! Catalog of radial (and even one-dimensional) potentials, the symmetry
//! parameter `s`, and the asymptotic classes that fix the energy window.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PotentialError {
    #[error("invalid parameter for {kind}: {message}")]
    InvalidParameter { kind: &'static str, message: String },
    #[error("{kind} is singular at r = {r}")]
    Singular { kind: &'static str, r: f64 },
    #[error("unclassified potential has no energy window")]
    Unclassified,
    #[error("tabulated potential: {0}")]
    Table(String),
}

/// `s = +1` for spin symmetry (`S = V`), `s = -1` for pseudo-spin symmetry
/// (`S = -V`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryMode {
    Spin,
    PseudoSpin,
}

/// Spinor component index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    Upper,
    Lower,
}

impl Component {
    pub fn index(self) -> usize {
        match self {
            Component::Upper => 0,
            Component::Lower => 1,
        }
    }

    pub fn other(self) -> Component {
        match self {
            Component::Upper => Component::Lower,
            Component::Lower => Component::Upper,
        }
    }
}

impl SymmetryMode {
    pub fn from_sign(s: i32) -> Option<Self> {
        match s {
            1 => Some(SymmetryMode::Spin),
            -1 => Some(SymmetryMode::PseudoSpin),
            _ => None,
        }
    }

    pub fn s(self) -> f64 {
        match self {
            SymmetryMode::Spin => 1.0,
            SymmetryMode::PseudoSpin => -1.0,
        }
    }

    pub fn sign(self) -> i32 {
        self.s() as i32
    }

    /// The component that carries the Schrödinger-like reduction:
    /// upper for `s = +1`, lower for `s = -1`.
    pub fn q(self) -> Component {
        match self {
            SymmetryMode::Spin => Component::Upper,
            SymmetryMode::PseudoSpin => Component::Lower,
        }
    }
}

/// Declared behaviour at infinity for tabulated potentials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailLimit {
    Zero,
    PlusInfinity,
    MinusInfinity,
}

/// A parameterized potential. Formulas are radial; one-dimensional use
/// evaluates at `|x|`, so every kind is even by construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    /// `a x²`
    Harmonic { a: f64 },
    /// `b x² (1 + sin(x³ + β)/(x³ + β))`
    SineModulatedHarmonic { b: f64, beta: f64 },
    /// `-β / r`
    Coulomb { beta: f64 },
    /// `-v / (r + a)`
    CutoffCoulomb { v: f64, a: f64 },
    /// `-α / (r e^{a r})`
    Yukawa { alpha: f64, a: f64 },
    /// `-α / (r^q + a^q)^{1/q}`
    Softcore { alpha: f64, a: f64, q: f64 },
    /// `-4β / (e^{b r} + e^{-b r})²`
    SechSquared { beta: f64, b: f64 },
    Zero,
    /// Linear interpolation in a table; beyond the last point the declared
    /// tail decides: zero, or linear extrapolation for unbounded tails.
    #[serde(rename = "user_tabulated", alias = "tabulated")]
    Tabulated { r: Vec<f64>, v: Vec<f64>, tail: TailLimit },
}

/// Asymptotic class of a potential relative to the symmetry mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialClass {
    /// `sV ≤ 0`, `V → 0`: `-m < E < m`.
    Class1,
    /// `sV ≥ 0`, `V → s∞`: `sE > m`.
    Class2,
    /// `sV ≤ 0`, `V → -s∞`: `sE < -m`.
    Class3,
    Unclassified,
}

/// Open energy interval; infinite ends are `±f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyWindow {
    pub lo: f64,
    pub hi: f64,
}

impl EnergyWindow {
    pub fn contains(&self, e: f64) -> bool {
        e > self.lo && e < self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    NonNegative,
    NonPositive,
    Zero,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Limit {
    Zero,
    PlusInf,
    MinusInf,
}

fn param_err(kind: &'static str, message: impl Into<String>) -> PotentialError {
    PotentialError::InvalidParameter { kind, message: message.into() }
}

fn finite(kind: &'static str, name: &str, x: f64) -> Result<(), PotentialError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(param_err(kind, format!("{name} must be finite")))
    }
}

impl PotentialSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PotentialSpec::Harmonic { .. } => "harmonic",
            PotentialSpec::SineModulatedHarmonic { .. } => "sine_modulated_harmonic",
            PotentialSpec::Coulomb { .. } => "coulomb",
            PotentialSpec::CutoffCoulomb { .. } => "cutoff_coulomb",
            PotentialSpec::Yukawa { .. } => "yukawa",
            PotentialSpec::Softcore { .. } => "softcore",
            PotentialSpec::SechSquared { .. } => "sech_squared",
            PotentialSpec::Zero => "zero",
            PotentialSpec::Tabulated { .. } => "user_tabulated",
        }
    }

    /// Checks parameter ranges.
    pub fn validate(&self) -> Result<(), PotentialError> {
        let kind = self.kind_name();
        match *self {
            PotentialSpec::Harmonic { a } => finite(kind, "a", a),
            PotentialSpec::SineModulatedHarmonic { b, beta } => {
                finite(kind, "b", b)?;
                if !(beta > 0.0) {
                    return Err(param_err(kind, "beta must be > 0"));
                }
                Ok(())
            }
            PotentialSpec::Coulomb { beta } => finite(kind, "beta", beta),
            PotentialSpec::CutoffCoulomb { v, a } => {
                finite(kind, "v", v)?;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(param_err(kind, "a must be > 0"));
                }
                Ok(())
            }
            PotentialSpec::Yukawa { alpha, a } => {
                finite(kind, "alpha", alpha)?;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(param_err(kind, "a must be > 0"));
                }
                Ok(())
            }
            PotentialSpec::Softcore { alpha, a, q } => {
                finite(kind, "alpha", alpha)?;
                if !(a > 0.0 && a.is_finite()) {
                    return Err(param_err(kind, "a must be > 0"));
                }
                if !(q >= 1.0 && q.is_finite()) {
                    return Err(param_err(kind, "q must be >= 1"));
                }
                Ok(())
            }
            PotentialSpec::SechSquared { beta, b } => {
                finite(kind, "beta", beta)?;
                if !(b > 0.0 && b.is_finite()) {
                    return Err(param_err(kind, "b must be > 0"));
                }
                Ok(())
            }
            PotentialSpec::Zero => Ok(()),
            PotentialSpec::Tabulated { ref r, ref v, .. } => {
                if r.len() < 2 || r.len() != v.len() {
                    return Err(PotentialError::Table(
                        "need at least two points and equal r/v lengths".into(),
                    ));
                }
                if r[0] != 0.0 {
                    return Err(PotentialError::Table("table must start at r = 0".into()));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) || v.iter().any(|x| !x.is_finite()) {
                    return Err(PotentialError::Table(
                        "r must be strictly increasing and v finite".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Whether `V(0)` is finite (required for one-dimensional problems).
    pub fn finite_at_origin(&self) -> bool {
        !matches!(
            self,
            PotentialSpec::Coulomb { beta } | PotentialSpec::Yukawa { alpha: beta, .. } if *beta != 0.0
        )
    }

    /// `lim_{r→0} r V(r)`: the Coulomb-like coefficient at the origin.
    pub fn coulomb_coefficient(&self) -> f64 {
        match *self {
            PotentialSpec::Coulomb { beta } => -beta,
            PotentialSpec::Yukawa { alpha, .. } => -alpha,
            _ => 0.0,
        }
    }

    /// `V(r)` for `r ≥ 0`.
    pub fn eval(&self, r: f64) -> Result<f64, PotentialError> {
        if r == 0.0 && !self.finite_at_origin() {
            return Err(PotentialError::Singular { kind: self.kind_name(), r });
        }
        Ok(self.value(r))
    }

    /// `V(r)` without the singularity check; Coulomb-type kinds give `-∞`
    /// at the origin. Negative arguments are folded (`V(|x|)`).
    pub fn value(&self, r: f64) -> f64 {
        let r = r.abs();
        match *self {
            PotentialSpec::Harmonic { a } => a * r * r,
            PotentialSpec::SineModulatedHarmonic { b, beta } => {
                let z = r * r * r + beta;
                b * r * r * (1.0 + z.sin() / z)
            }
            PotentialSpec::Coulomb { beta } => -beta / r,
            PotentialSpec::CutoffCoulomb { v, a } => -v / (r + a),
            PotentialSpec::Yukawa { alpha, a } => -alpha * (-a * r).exp() / r,
            PotentialSpec::Softcore { alpha, a, q } => {
                // factor out the larger scale so r^q does not overflow
                let big = r.max(a);
                let s = ((r / big).powf(q) + (a / big).powf(q)).powf(1.0 / q);
                -alpha / (big * s)
            }
            PotentialSpec::SechSquared { beta, b } => {
                let x = b * r;
                if x > 350.0 {
                    return -4.0 * beta * (-2.0 * x).exp();
                }
                -beta / x.cosh().powi(2)
            }
            PotentialSpec::Zero => 0.0,
            PotentialSpec::Tabulated { r: ref rs, ref v, tail } => table_value(rs, v, tail, r),
        }
    }

    /// Closure `x ↦ V(x)` (unchecked).
    pub fn as_fn(&self) -> impl Fn(f64) -> f64 + '_ {
        move |x| self.value(x)
    }

    fn sign(&self) -> Sign {
        let of = |x: f64| {
            if x > 0.0 {
                Sign::NonNegative
            } else if x < 0.0 {
                Sign::NonPositive
            } else {
                Sign::Zero
            }
        };
        match *self {
            PotentialSpec::Harmonic { a } => of(a),
            // |sin z / z| < 1 for z > 0, so the bracket is positive
            PotentialSpec::SineModulatedHarmonic { b, .. } => of(b),
            PotentialSpec::Coulomb { beta } => of(-beta),
            PotentialSpec::CutoffCoulomb { v, .. } => of(-v),
            PotentialSpec::Yukawa { alpha, .. } => of(-alpha),
            PotentialSpec::Softcore { alpha, .. } => of(-alpha),
            PotentialSpec::SechSquared { beta, .. } => of(-beta),
            PotentialSpec::Zero => Sign::Zero,
            PotentialSpec::Tabulated { ref v, .. } => {
                let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
                let tol = 1e-12 * scale;
                let pos = v.iter().all(|&x| x >= -tol);
                let neg = v.iter().all(|&x| x <= tol);
                match (pos, neg) {
                    (true, true) => Sign::Zero,
                    (true, false) => Sign::NonNegative,
                    (false, true) => Sign::NonPositive,
                    (false, false) => Sign::Mixed,
                }
            }
        }
    }

    fn limit(&self) -> Limit {
        match *self {
            PotentialSpec::Harmonic { a } | PotentialSpec::SineModulatedHarmonic { b: a, .. } => {
                if a > 0.0 {
                    Limit::PlusInf
                } else if a < 0.0 {
                    Limit::MinusInf
                } else {
                    Limit::Zero
                }
            }
            PotentialSpec::Tabulated { tail, .. } => match tail {
                TailLimit::Zero => Limit::Zero,
                TailLimit::PlusInfinity => Limit::PlusInf,
                TailLimit::MinusInfinity => Limit::MinusInf,
            },
            _ => Limit::Zero,
        }
    }

    /// Whether the declared or analytic limit at infinity is zero.
    pub fn vanishes_at_infinity(&self) -> bool {
        self.limit() == Limit::Zero
    }

    /// Multiplies the potential by `c` (strength parameters scale).
    pub fn scaled(&self, c: f64) -> PotentialSpec {
        match self.clone() {
            PotentialSpec::Harmonic { a } => PotentialSpec::Harmonic { a: c * a },
            PotentialSpec::SineModulatedHarmonic { b, beta } => {
                PotentialSpec::SineModulatedHarmonic { b: c * b, beta }
            }
            PotentialSpec::Coulomb { beta } => PotentialSpec::Coulomb { beta: c * beta },
            PotentialSpec::CutoffCoulomb { v, a } => PotentialSpec::CutoffCoulomb { v: c * v, a },
            PotentialSpec::Yukawa { alpha, a } => PotentialSpec::Yukawa { alpha: c * alpha, a },
            PotentialSpec::Softcore { alpha, a, q } => {
                PotentialSpec::Softcore { alpha: c * alpha, a, q }
            }
            PotentialSpec::SechSquared { beta, b } => PotentialSpec::SechSquared { beta: c * beta, b },
            PotentialSpec::Zero => PotentialSpec::Zero,
            PotentialSpec::Tabulated { r, v, tail } => PotentialSpec::Tabulated {
                r,
                v: v.into_iter().map(|x| c * x).collect(),
                tail: if c < 0.0 {
                    match tail {
                        TailLimit::PlusInfinity => TailLimit::MinusInfinity,
                        TailLimit::MinusInfinity => TailLimit::PlusInfinity,
                        TailLimit::Zero => TailLimit::Zero,
                    }
                } else {
                    tail
                },
            },
        }
    }
}

fn table_value(rs: &[f64], vs: &[f64], tail: TailLimit, r: f64) -> f64 {
    let n = rs.len();
    if r >= rs[n - 1] {
        return match tail {
            TailLimit::Zero => 0.0,
            _ => {
                let slope = (vs[n - 1] - vs[n - 2]) / (rs[n - 1] - rs[n - 2]);
                vs[n - 1] + slope * (r - rs[n - 1])
            }
        };
    }
    let i = rs.partition_point(|&p| p <= r).saturating_sub(1).min(n - 2);
    let t = (r - rs[i]) / (rs[i + 1] - rs[i]);
    vs[i] + t * (vs[i + 1] - vs[i])
}

/// Class of `spec` under symmetry `mode`.
pub fn classify(spec: &PotentialSpec, mode: SymmetryMode) -> PotentialClass {
    let s = mode.s();
    let sign = spec.sign();
    let s_v_nonpos = match sign {
        Sign::Zero => true,
        Sign::NonPositive => s > 0.0,
        Sign::NonNegative => s < 0.0,
        Sign::Mixed => false,
    };
    let s_v_nonneg = match sign {
        Sign::Zero => true,
        Sign::NonPositive => s < 0.0,
        Sign::NonNegative => s > 0.0,
        Sign::Mixed => false,
    };
    let to_s_inf = if s > 0.0 { Limit::PlusInf } else { Limit::MinusInf };
    let to_minus_s_inf = if s > 0.0 { Limit::MinusInf } else { Limit::PlusInf };
    let limit = spec.limit();
    if s_v_nonpos && limit == Limit::Zero {
        PotentialClass::Class1
    } else if s_v_nonneg && limit == to_s_inf {
        PotentialClass::Class2
    } else if s_v_nonpos && limit == to_minus_s_inf {
        PotentialClass::Class3
    } else {
        PotentialClass::Unclassified
    }
}

/// Open interval of admissible energies for a class.
pub fn energy_window(
    class: PotentialClass,
    mode: SymmetryMode,
    m: f64,
) -> Result<EnergyWindow, PotentialError> {
    let s = mode.s();
    let inf = f64::INFINITY;
    match class {
        PotentialClass::Class1 => Ok(EnergyWindow { lo: -m, hi: m }),
        // sE > m
        PotentialClass::Class2 if s > 0.0 => Ok(EnergyWindow { lo: m, hi: inf }),
        PotentialClass::Class2 => Ok(EnergyWindow { lo: -inf, hi: -m }),
        // sE < -m
        PotentialClass::Class3 if s > 0.0 => Ok(EnergyWindow { lo: -inf, hi: -m }),
        PotentialClass::Class3 => Ok(EnergyWindow { lo: m, hi: inf }),
        PotentialClass::Unclassified => Err(PotentialError::Unclassified),
    }
}

/// `r ↦ V_b(r) - V_a(r)`.
pub fn difference<'a>(a: &'a PotentialSpec, b: &'a PotentialSpec) -> impl Fn(f64) -> f64 + 'a {
    move |r| b.value(r) - a.value(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn evaluation_examples() {
        assert_eq!(PotentialSpec::Harmonic { a: 0.5 }.eval(2.0).unwrap(), 2.0);
        assert_abs_diff_eq!(
            PotentialSpec::CutoffCoulomb { v: 1.5, a: 0.01 }.eval(0.0).unwrap(),
            -150.0,
            epsilon = 1e-12
        );
        assert_eq!(
            PotentialSpec::SineModulatedHarmonic { b: 0.5, beta: 1.64 }.eval(0.0).unwrap(),
            0.0
        );
        assert!(matches!(
            PotentialSpec::Coulomb { beta: 0.2 }.eval(0.0),
            Err(PotentialError::Singular { .. })
        ));
    }

    #[test]
    fn formulas_match_direct_expressions() {
        let r: f64 = 1.7;
        let sc = PotentialSpec::Softcore { alpha: 0.8, a: 1.6, q: 3.0 };
        assert_abs_diff_eq!(
            sc.value(r),
            -0.8 / (r.powi(3) + 1.6f64.powi(3)).cbrt(),
            epsilon = 1e-15
        );
        let s2 = PotentialSpec::SechSquared { beta: 0.5, b: 0.31 };
        assert_abs_diff_eq!(
            s2.value(r),
            -4.0 * 0.5 / ((0.31 * r).exp() + (-0.31 * r).exp()).powi(2),
            epsilon = 1e-15
        );
        let y = PotentialSpec::Yukawa { alpha: 0.2, a: 0.1 };
        assert_abs_diff_eq!(y.value(r), -0.2 / (r * (0.1 * r).exp()), epsilon = 1e-15);
        // huge radii stay finite
        assert!(s2.value(1e6).is_finite() && sc.value(1e200).is_finite());
    }

    #[test]
    fn classification_examples() {
        use PotentialClass::*;
        assert_eq!(classify(&PotentialSpec::Coulomb { beta: 0.172 }, SymmetryMode::Spin), Class1);
        assert_eq!(classify(&PotentialSpec::Harmonic { a: 0.5 }, SymmetryMode::Spin), Class2);
        assert_eq!(classify(&PotentialSpec::Harmonic { a: 0.5 }, SymmetryMode::PseudoSpin), Class3);
        assert_eq!(classify(&PotentialSpec::Harmonic { a: -0.5 }, SymmetryMode::PseudoSpin), Class2);
        assert_eq!(classify(&PotentialSpec::Zero, SymmetryMode::Spin), Class1);
        assert_eq!(
            classify(&PotentialSpec::CutoffCoulomb { v: 1.0, a: 1.0 }, SymmetryMode::PseudoSpin),
            Unclassified
        );
        assert_eq!(
            classify(&PotentialSpec::CutoffCoulomb { v: -1.0, a: 1.0 }, SymmetryMode::PseudoSpin),
            Class1
        );
    }

    #[test]
    fn windows() {
        let m = 1.0;
        let w = energy_window(PotentialClass::Class1, SymmetryMode::PseudoSpin, m).unwrap();
        assert_eq!((w.lo, w.hi), (-1.0, 1.0));
        let w = energy_window(PotentialClass::Class2, SymmetryMode::PseudoSpin, m).unwrap();
        assert!(w.contains(-1.5) && !w.contains(-0.5));
        let w = energy_window(PotentialClass::Class3, SymmetryMode::PseudoSpin, m).unwrap();
        assert!(w.contains(1.5) && !w.contains(0.5));
        assert!(energy_window(PotentialClass::Unclassified, SymmetryMode::Spin, m).is_err());
    }

    #[test]
    fn differences() {
        let h = PotentialSpec::Harmonic { a: 0.5 };
        let z = difference(&h, &h);
        assert_eq!(z(1.3), 0.0);
        let sm = PotentialSpec::SineModulatedHarmonic { b: 0.5, beta: 1.64 };
        let d = difference(&h, &sm);
        let x: f64 = 1.1;
        let zz = x.powi(3) + 1.64;
        assert_abs_diff_eq!(d(x), 0.5 * x * x * zz.sin() / zz, epsilon = 1e-15);
        let y = PotentialSpec::Yukawa { alpha: 0.2, a: 0.1 };
        let c = PotentialSpec::Coulomb { beta: 0.172 };
        let d = difference(&y, &c);
        assert_abs_diff_eq!(d(0.01), -17.2 + 0.2 * (-0.001f64).exp() / 0.01, epsilon = 1e-12);
        assert!(d(0.01) > 2.7);
    }

    #[test]
    fn validation() {
        assert!(PotentialSpec::Softcore { alpha: 1.0, a: 1.0, q: 0.5 }.validate().is_err());
        assert!(PotentialSpec::CutoffCoulomb { v: 1.0, a: 0.0 }.validate().is_err());
        assert!(PotentialSpec::SechSquared { beta: 1.0, b: -1.0 }.validate().is_err());
        assert!(PotentialSpec::Harmonic { a: 0.5 }.validate().is_ok());
    }

    #[test]
    fn tabulated_requires_tail_and_interpolates() {
        let t = PotentialSpec::Tabulated {
            r: vec![0.0, 1.0, 2.0],
            v: vec![0.0, 1.0, 4.0],
            tail: TailLimit::PlusInfinity,
        };
        assert!(t.validate().is_ok());
        assert_abs_diff_eq!(t.value(1.5), 2.5, epsilon = 1e-15);
        assert_abs_diff_eq!(t.value(3.0), 7.0, epsilon = 1e-15);
        assert_eq!(classify(&t, SymmetryMode::Spin), PotentialClass::Class2);
        let missing: Result<PotentialSpec, _> =
            serde_json::from_str(r#"{"kind":"user_tabulated","r":[0,1],"v":[0,1]}"#);
        assert!(missing.is_err());
    }

    #[test]
    fn serde_round_trip() {
        let p = PotentialSpec::Softcore { alpha: 0.8, a: 1.6, q: 3.0 };
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"kind":"softcore","alpha":0.8,"a":1.6,"q":3.0}"#);
        assert_eq!(serde_json::from_str::<PotentialSpec>(&s).unwrap(), p);
    }
}

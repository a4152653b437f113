//! Command implementations. Each returns a [`RunOutput`]; the binary only
//! decides where the pieces are written.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use dirac_core::diracd::node_structure;
use dirac_core::potentials::Component;
use dirac_core::problem::{BoundState, Geometry, Problem};
use dirac_core::shooting::SolverConfig;
use dirac_core::theorems::{
    compare as compare_problems, detect_crossings, transform_g, transform_mu, transform_p,
    transform_rho, CompareOptions, MuWeight, Strategy, TransformConfig, TransformCurve,
    TransformKind, WeightChoice,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::ProblemConfig;
use crate::registry::{self, Status};
use crate::{solve_error, theorem_error, CliError, EXIT_FALSIFIED, EXIT_OK, EXIT_SOLVER};

/// Fields that differ between otherwise identical runs.
pub const VOLATILE_KEYS: [&str; 2] = ["timestamp", "timing_ms"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub json: Value,
    /// Headered CSV table, when the command produces one.
    pub csv: Option<String>,
    /// Human-readable summary.
    pub text: Option<String>,
    pub exit_code: i32,
}

fn stamp(mut v: Value, started: Instant) -> Value {
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    if let Value::Object(m) = &mut v {
        m.insert("timestamp".into(), json!(ts));
        m.insert("timing_ms".into(), json!(started.elapsed().as_millis() as u64));
    }
    v
}

/// Removes [`VOLATILE_KEYS`] at every depth.
pub fn strip_volatile(v: &mut Value) {
    match v {
        Value::Object(m) => {
            for k in VOLATILE_KEYS {
                m.remove(k);
            }
            m.values_mut().for_each(strip_volatile);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_volatile),
        _ => {}
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn solve_problem(p: &Problem, cfg: &SolverConfig) -> Result<BoundState, CliError> {
    p.solve(cfg).map_err(solve_error)
}

/// `solve`: eigenvalue summary plus the `r, psi1, psi2` table.
pub fn solve(config: &ProblemConfig, cross_check: bool) -> Result<RunOutput, CliError> {
    let started = Instant::now();
    let problem = config.to_problem()?;
    let cfg = config.solver_config()?;
    let state = solve_problem(&problem, &cfg)?;
    let (n1, n2) = state.nodes();
    let lemma = problem.lemma_check(&state);
    let nodes = match (&state, problem.mode()) {
        (BoundState::Radial(s), Some(mode)) => Some(node_structure(s, mode)),
        _ => None,
    };
    let reduced = if cross_check && problem.mode().is_some() {
        Some(problem.solve_reduced(&cfg).map_err(solve_error)?)
    } else {
        None
    };
    let window = state.window();
    let doc = json!({
        "command": "solve",
        "problem": problem,
        "energy": state.energy(),
        "window": { "lo": window.lo, "hi": window.hi },
        "nodes": [n1, n2],
        "node_structure": nodes,
        "norm": state.norm(),
        "residual": state.residual(),
        "domain_end": state.domain_end(),
        "monotonicity": lemma,
        "reduced_energy": reduced,
        "reduced_difference": reduced.map(|e| e - state.energy()),
    });
    let p1 = state.component(Component::Upper);
    let p2 = state.component(Component::Lower);
    let rows = p1
        .points()
        .iter()
        .zip(p1.values())
        .zip(p2.values())
        // adding zero turns -0 into 0
        .map(|((r, a), b)| vec![r.to_string(), (a + 0.0).to_string(), (b + 0.0).to_string()]);
    Ok(RunOutput {
        json: stamp(doc, started),
        csv: Some(csv_table(&["r", "psi1", "psi2"], rows)?),
        text: None,
        exit_code: EXIT_OK,
    })
}

/// `compare`: exit code 3 when a satisfied hypothesis is contradicted by
/// the computed eigenvalues.
pub fn compare(
    a: &ProblemConfig,
    b: &ProblemConfig,
    strategy: Strategy,
    weight: WeightChoice,
) -> Result<RunOutput, CliError> {
    let started = Instant::now();
    let (pa, pb) = (a.to_problem()?, b.to_problem()?);
    let cfg = a.solver_config()?;
    let opts = CompareOptions { strategy, weight, transform: TransformConfig::default() };
    let report = compare_problems(&pa, &pb, &opts, &cfg).map_err(theorem_error)?;
    let exit_code = if report.falsified { EXIT_FALSIFIED } else { EXIT_OK };
    let text = format!(
        "E_a = {:.8}  E_b = {:.8}  theorem = {}  predicted = {}  consistent = {}",
        report.energy_a,
        report.energy_b,
        report.theorem_applied.map(|t| t.name()).unwrap_or("none"),
        serde_json::to_value(report.predicted).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
        report.consistent
    );
    let doc = json!({ "command": "compare", "problem_a": pa, "problem_b": pb, "report": report });
    Ok(RunOutput { json: stamp(doc, started), csv: None, text: Some(text), exit_code })
}

fn curve_rows(c: &TransformCurve) -> Vec<Vec<String>> {
    c.curve.points().iter().zip(c.curve.values()).map(|(x, v)| vec![x.to_string(), v.to_string()]).collect()
}

/// `transform`: one cumulative transform of `V_b - V_a` as an `x, value`
/// table plus its sign verdict.
pub fn transform(
    a: &ProblemConfig,
    b: &ProblemConfig,
    which: TransformKind,
    weight: WeightChoice,
    domain: Option<f64>,
) -> Result<RunOutput, CliError> {
    let started = Instant::now();
    let (pa, pb) = (a.to_problem()?, b.to_problem()?);
    let cfg = a.solver_config()?;
    let tc = TransformConfig::default();
    if pa.mass != pb.mass || std::mem::discriminant(&pa.geometry) != std::mem::discriminant(&pb.geometry) {
        return Err(CliError::Config("problems must share mass and dimension".into()));
    }
    let mode = match (pa.mode(), pb.mode()) {
        (Some(x), Some(y)) if x == y => x,
        _ => return Err(CliError::Config("transforms need both problems with the same S = sV symmetry".into())),
    };
    let radial = matches!(pa.geometry, Geometry::Radial { .. });
    let wants_radial = matches!(which, TransformKind::Rho | TransformKind::Mu);
    if radial != wants_radial {
        return Err(CliError::Config(format!(
            "{} applies to {} problems",
            which.name(),
            if wants_radial { "radial (d >= 2)" } else { "one-dimensional" }
        )));
    }
    if radial && pa.channel() != pb.channel() {
        return Err(CliError::Config("problems must share the channel (d, j, tau)".into()));
    }

    let exact = match weight {
        WeightChoice::Auto if which == TransformKind::Mu => {
            pb.coulomb_exact().map(|c| (c, "b (closed-form Coulomb)")).or_else(|| pa.coulomb_exact().map(|c| (c, "a (closed-form Coulomb)")))
        }
        _ => None,
    };
    let needs_states = domain.is_none() || (matches!(which, TransformKind::P | TransformKind::Mu) && exact.is_none());
    let states = if needs_states {
        let (sa, sb) = rayon::join(|| solve_problem(&pa, &cfg), || solve_problem(&pb, &cfg));
        Some((sa?, sb?))
    } else {
        None
    };
    let end = match (domain, &states) {
        (Some(d), _) => d,
        (None, Some((sa, sb))) => sa.domain_end().max(sb.domain_end()),
        (None, None) => unreachable!("states are solved when no domain is given"),
    };
    let va = |x: f64| pa.potential.value(x);
    let vb = |x: f64| pb.potential.value(x);
    let pick = |states: &Option<(BoundState, BoundState)>| -> (BoundState, &'static str) {
        let (sa, sb) = states.as_ref().expect("solved");
        match weight {
            WeightChoice::B => (sb.clone(), "b"),
            _ => (sa.clone(), "a"),
        }
    };
    let q = mode.q();
    let (curve, source) = match which {
        TransformKind::G => (transform_g(&va, &vb, end, &tc), None),
        TransformKind::Rho => {
            (transform_rho(&va, &vb, mode, pa.channel().expect("radial"), end, &tc), None)
        }
        TransformKind::P => {
            let (s, label) = pick(&states);
            (transform_p(&va, &vb, s.component(q), q, mode, &tc), Some(label.to_string()))
        }
        TransformKind::Mu => match exact {
            Some((c, label)) => (
                transform_mu(&va, &vb, MuWeight::CoulombExact(c), mode, pa.channel().expect("radial"), end, &tc),
                Some(label.to_string()),
            ),
            None => {
                let (s, label) = pick(&states);
                let w = MuWeight::Sampled { f: s.component(q), component: q };
                (
                    transform_mu(&va, &vb, w, mode, pa.channel().expect("radial"), end, &tc),
                    Some(label.to_string()),
                )
            }
        },
    };
    let curve = curve.map_err(theorem_error)?;
    let crossings = detect_crossings(&va, &vb, (0.0, end), &tc);
    let doc = json!({
        "command": "transform",
        "which": which,
        "weight": curve.weight,
        "weight_source": source,
        "min_value": curve.min_value,
        "min_location": curve.min_location,
        "final_value": curve.final_value,
        "scale": curve.scale,
        "nonnegative": curve.nonnegative,
        "domain_end": curve.domain_end,
        "crossings": crossings,
        "problem_a": pa,
        "problem_b": pb,
    });
    Ok(RunOutput {
        json: stamp(doc, started),
        csv: Some(csv_table(&["x", "value"], curve_rows(&curve))?),
        text: None,
        exit_code: EXIT_OK,
    })
}

/// `reproduce`: exit code 2 if any asserted value is out of tolerance.
pub fn reproduce(id: &str, cfg: &SolverConfig) -> Result<RunOutput, CliError> {
    let started = Instant::now();
    let ids: Vec<&str> = if id == "all" { registry::IDS.to_vec() } else { vec![id] };
    let results = registry::run_ids(&ids, cfg)?;
    let failed = results.iter().any(|r| !r.passed);
    let infos = results.iter().flat_map(|r| &r.measurements).filter(|m| m.status == Status::Info).count();
    let mut text = registry::format_table(&results);
    text.push_str(&format!(
        "{} record(s), {} failed, {} informational\n",
        results.len(),
        results.iter().filter(|r| !r.passed).count(),
        infos
    ));
    let doc = json!({ "command": "reproduce", "results": results });
    Ok(RunOutput {
        json: stamp(doc, started),
        csv: None,
        text: Some(text),
        exit_code: if failed { EXIT_SOLVER } else { EXIT_OK },
    })
}

fn set_path(table: &mut toml::Table, path: &str, v: f64) -> Result<(), CliError> {
    let mut parts: Vec<&str> = path.split('.').collect();
    let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| CliError::Usage(format!("bad parameter path {path:?}")))?;
    let mut t = table;
    for p in parts {
        t = t
            .entry(p)
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Usage(format!("{p:?} in {path:?} is not a table")))?;
    }
    let value = match t.get(last) {
        Some(toml::Value::Integer(_)) if v.fract() == 0.0 => toml::Value::Integer(v as i64),
        _ => toml::Value::Float(v),
    };
    t.insert(last.to_string(), value);
    Ok(())
}

/// `scan`: ground-state energy as one parameter sweeps `[from, to]`.
pub fn scan(base: &str, param: &str, from: f64, to: f64, steps: usize) -> Result<RunOutput, CliError> {
    let started = Instant::now();
    if steps == 0 {
        return Err(CliError::Usage("steps must be at least 1".into()));
    }
    let table: toml::Table = toml::from_str(base).map_err(|e| CliError::Config(e.to_string()))?;
    ProblemConfig::parse(base)?.to_problem()?;
    let values: Vec<f64> = (0..=steps).map(|i| from + (to - from) * i as f64 / steps as f64).collect();
    let rows: Vec<Result<(f64, BoundState), String>> = values
        .par_iter()
        .map(|&v| {
            let mut t = table.clone();
            set_path(&mut t, param, v).map_err(|e| e.to_string())?;
            let text = toml::to_string(&t).map_err(|e| e.to_string())?;
            let c = ProblemConfig::parse(&text).map_err(|e| e.to_string())?;
            let p = c.to_problem().map_err(|e| e.to_string())?;
            let cfg = c.solver_config().map_err(|e| e.to_string())?;
            p.solve(&cfg).map(|s| (v, s)).map_err(|e| e.to_string())
        })
        .collect();
    let mut ok = 0;
    let mut points = Vec::new();
    let csv_rows: Vec<Vec<String>> = values
        .iter()
        .zip(&rows)
        .map(|(v, r)| match r {
            Ok((_, s)) => {
                ok += 1;
                let (n1, n2) = s.nodes();
                points.push(json!({ "value": v, "energy": s.energy() }));
                vec![v.to_string(), s.energy().to_string(), n1.to_string(), n2.to_string(), "ok".into()]
            }
            Err(e) => {
                points.push(json!({ "value": v, "error": e }));
                vec![v.to_string(), "NaN".into(), String::new(), String::new(), e.clone()]
            }
        })
        .collect();
    let doc = json!({ "command": "scan", "parameter": param, "points": points });
    Ok(RunOutput {
        json: stamp(doc, started),
        csv: Some(csv_table(&[param, "energy", "nodes1", "nodes2", "status"], csv_rows)?),
        text: None,
        exit_code: if ok > 0 { EXIT_OK } else { EXIT_SOLVER },
    })
}

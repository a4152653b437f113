use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dirac_cli::commands::strip_volatile;
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn dirac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirac"))
        .args(args)
        .current_dir(configs())
        .env_remove("DIRAC_ABS_TOL")
        .env_remove("DIRAC_REL_TOL")
        .env_remove("DIRAC_EIG_TOL")
        .output()
        .expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn solve_reports_energy_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("psi.csv");
    let o = dirac(&["solve", "harmonic.toml", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["energy"].as_f64().unwrap() - 1.77935).abs() < 1e-4);
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("r,psi1,psi2\n"));
    assert!(table.lines().count() > 100);
}

#[test]
fn output_is_deterministic() {
    let mut a = json(&dirac(&["solve", "cutoff_left.toml"]));
    let mut b = json(&dirac(&["solve", "cutoff_left.toml"]));
    assert!(a.get("timestamp").is_some());
    strip_volatile(&mut a);
    strip_volatile(&mut b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!((a["energy"].as_f64().unwrap() - 0.47399).abs() < 1e-4);
}

#[test]
fn dumped_config_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["harmonic.toml", "softcore.toml", "yukawa.toml"] {
        let first = dirac(&["solve", name, "--dump-config"]);
        assert_eq!(first.status.code(), Some(0));
        let path = dir.path().join(name);
        std::fs::write(&path, &first.stdout).unwrap();
        let second = dirac(&["solve", path.to_str().unwrap(), "--dump-config"]);
        assert_eq!(first.stdout, second.stdout);
    }
}

#[test]
fn schema_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(configs().join("harmonic.toml")).unwrap().replace("mass = 1.2\n", "");
    std::fs::write(&path, text).unwrap();
    let o = dirac(&["solve", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("mass") && err.contains("line"), "{err}");
    assert_eq!(dirac(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(dirac(&["reproduce", "no-such-id"]).status.code(), Some(1));
}

#[test]
fn compare_pairs() {
    let o = dirac(&["compare", "yukawa.toml", "coulomb.toml", "--theorem", "C5"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json(&o)["report"];
    assert_eq!(r["theorem_applied"], "C5");
    assert_eq!(r["consistent"], true);

    let swapped = dirac(&["compare", "coulomb.toml", "yukawa.toml"]);
    assert_eq!(swapped.status.code(), Some(0));
    let r = &json(&swapped)["report"];
    assert_eq!(r["predicted"], "inconclusive");
    assert!((r["energy_b"].as_f64().unwrap() - 0.75632).abs() < 1e-4);

    let lower = json(&dirac(&["compare", "yukawa.toml", "coulomb_strong.toml"]));
    assert_eq!(lower["report"]["theorem_applied"], "basic");
    assert_eq!(lower["report"]["predicted"], "E_b<=E_a");

    let mixed = dirac(&["compare", "harmonic.toml", "coulomb.toml"]);
    assert_eq!(mixed.status.code(), Some(1));
}

#[test]
fn transforms() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("mu.csv");
    let o = dirac(&["transform", "yukawa.toml", "coulomb.toml", "--which", "mu", "--csv", csv.to_str().unwrap()]);
    let v = json(&o);
    assert!((v["final_value"].as_f64().unwrap() - 0.00006).abs() < 2e-5);
    assert!(std::fs::read_to_string(csv).unwrap().starts_with("x,value\n"));

    let same = json(&dirac(&["transform", "harmonic.toml", "harmonic.toml", "--which", "g", "--domain", "5"]));
    assert_eq!(same["min_value"], 0.0);
    assert_eq!(same["final_value"], 0.0);

    let g = json(&dirac(&["transform", "harmonic.toml", "sine_modulated.toml", "--which", "g"]));
    assert_eq!(g["nonnegative"], true);

    let wrong = dirac(&["transform", "harmonic.toml", "sine_modulated.toml", "--which", "rho"]);
    assert_eq!(wrong.status.code(), Some(1));
}

#[test]
fn reproduce_single_record() {
    let o = dirac(&["reproduce", "coulomb-exact-closedform"]);
    assert_eq!(o.status.code(), Some(0));
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("PASS") && !table.contains("FAIL"));
}

#[test]
fn scan_sweeps_a_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let o = dirac(&[
        "scan", "coulomb.toml", "--param", "potential.beta", "--from", "0.1", "--to", "0.3", "--steps", "4",
        "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(csv).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "potential.beta,energy,nodes1,nodes2,status");
    assert_eq!(rows.len(), 6);
    for row in &rows[1..] {
        let f: Vec<&str> = row.split(',').collect();
        let beta: f64 = f[0].parse().unwrap();
        let e: f64 = f[1].parse().unwrap();
        let exact = (1.0 - 4.0 * beta * beta) / (1.0 + 4.0 * beta * beta);
        assert!((e - exact).abs() < 1e-6, "{row}");
    }
}

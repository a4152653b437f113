use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dirac_cli::commands::{self, RunOutput};
use dirac_cli::config::{apply_env, ProblemConfig};
use dirac_cli::{CliError, EXIT_USAGE};
use dirac_core::shooting::SolverConfig;
use dirac_core::theorems::{Strategy, TheoremId, TransformKind, WeightChoice};

/// Dirac bound states under spin and pseudo-spin symmetry, and eigenvalue
/// comparison for crossing potentials.
#[derive(Parser)]
#[command(name = "dirac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    G,
    P,
    Rho,
    Mu,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightArg {
    Auto,
    A,
    B,
}

#[derive(clap::Args)]
struct Outputs {
    /// Write the JSON document here instead of stdout.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write the CSV table here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Ground state of one problem file.
    Solve {
        config: PathBuf,
        /// Also solve the second-order reduction and report the difference.
        #[arg(long)]
        cross_check: bool,
        /// Print the normalized problem file and exit.
        #[arg(long)]
        dump_config: bool,
        #[command(flatten)]
        out: Outputs,
    },
    /// Compare the ground-state energies of two problem files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Test only this theorem (basic, T1..T5, C1, C2, C4, C5, n-intersection).
        #[arg(long)]
        theorem: Option<String>,
        #[arg(long, value_enum, default_value = "auto")]
        weight: WeightArg,
        #[command(flatten)]
        out: Outputs,
    },
    /// Cumulative transform of V_b - V_a.
    Transform {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, value_enum, default_value = "auto")]
        weight: WeightArg,
        /// Dense sampling end; defaults to the larger solved domain.
        #[arg(long)]
        domain: Option<f64>,
        #[command(flatten)]
        out: Outputs,
    },
    /// Run reference calculations by id, or `all`.
    Reproduce {
        id: String,
        #[command(flatten)]
        out: Outputs,
    },
    /// Ground-state energy while one parameter sweeps a range.
    Scan {
        config: PathBuf,
        /// Dotted key, e.g. `potential.beta` or `problem.mass`.
        #[arg(long)]
        param: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        out: Outputs,
    },
}

fn weight(w: WeightArg) -> WeightChoice {
    match w {
        WeightArg::Auto => WeightChoice::Auto,
        WeightArg::A => WeightChoice::A,
        WeightArg::B => WeightChoice::B,
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Writes to stdout; a closed pipe (`| head`) is not an error.
fn to_stdout(text: &str) -> Result<(), CliError> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn emit(run: RunOutput, dest: &Outputs, table_on_stdout: bool) -> Result<i32, CliError> {
    let json = serde_json::to_string_pretty(&run.json).expect("json values serialize");
    match &dest.json {
        Some(p) => write(p, &(json + "\n"))?,
        None if !table_on_stdout => to_stdout(&(json + "\n"))?,
        None => {}
    }
    if let (Some(p), Some(csv)) = (&dest.csv, &run.csv) {
        write(p, csv)?;
    }
    if let Some(text) = &run.text {
        if table_on_stdout {
            to_stdout(text)?;
        } else {
            eprintln!("{text}");
        }
    }
    Ok(run.exit_code)
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Solve { config, cross_check, dump_config, out } => {
            let c = ProblemConfig::load(&config)?;
            if dump_config {
                c.to_problem()?;
                to_stdout(&c.to_toml())?;
                return Ok(0);
            }
            emit(commands::solve(&c, cross_check)?, &out, false)
        }
        Command::Compare { a, b, theorem, weight: w, out } => {
            let strategy = match theorem {
                None => Strategy::Auto,
                Some(t) => Strategy::Theorem(
                    TheoremId::parse(&t).ok_or_else(|| CliError::Usage(format!("unknown theorem {t:?}")))?,
                ),
            };
            let (ca, cb) = (ProblemConfig::load(&a)?, ProblemConfig::load(&b)?);
            emit(commands::compare(&ca, &cb, strategy, weight(w))?, &out, false)
        }
        Command::Transform { a, b, which, weight: w, domain, out } => {
            let kind = match which {
                Which::G => TransformKind::G,
                Which::P => TransformKind::P,
                Which::Rho => TransformKind::Rho,
                Which::Mu => TransformKind::Mu,
            };
            let (ca, cb) = (ProblemConfig::load(&a)?, ProblemConfig::load(&b)?);
            emit(commands::transform(&ca, &cb, kind, weight(w), domain)?, &out, false)
        }
        Command::Reproduce { id, out } => {
            let mut cfg = SolverConfig::default();
            apply_env(&mut cfg, |k| std::env::var(k).ok())?;
            emit(commands::reproduce(&id, &cfg)?, &out, true)
        }
        Command::Scan { config, param, from, to, steps, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            emit(commands::scan(&text, &param, from, to, steps)?, &out, false)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

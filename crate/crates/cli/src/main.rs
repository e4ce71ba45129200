use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};
use serde::Serialize;

use spectral_bounds::bounds::Selection;
use spectral_bounds::ensemble::{EnsembleKind, EnsembleSpec};
use spectral_bounds::harness::{results_to_csv, run_report, verify, verify_with_threads, worked_example};
use spectral_bounds::market::read_matrix_market;
use spectral_bounds::tol;

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_VIOLATION: u8 = 2;

/// Certified eigenvalue, perturbation and spread bounds for dense complex
/// matrices.
#[derive(Parser)]
#[command(name = "spectral-bounds", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate bounds on a matrix (and optionally a second one) read from
    /// Matrix Market files.
    Report {
        #[arg(long)]
        matrix: PathBuf,
        /// Second matrix; defaults to the first.
        #[arg(long = "matrix-b")]
        matrix_b: Option<PathBuf>,
        /// "all" or a comma-separated list of bound names.
        #[arg(long, default_value = "all")]
        bounds: String,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Also write one CSV row per result.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check every selected bound on a seeded random ensemble.
    Verify {
        #[arg(long)]
        ensemble: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = "all")]
        bounds: String,
        /// Worker threads; defaults to the number of cores.
        #[arg(long)]
        threads: Option<usize>,
        /// Write the JSON summary here instead of stdout.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Recompute the worked 3x3 example.
    #[command(name = "paper-example")]
    WorkedExample {
        /// Print machine-readable JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Violation(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn emit<T: Serialize>(value: &T, path: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value)?;
    match path {
        Some(p) => fs::write(p, text + "\n").map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tolerance = tol::verify_from_env();
    match cli.command {
        Command::Report {
            matrix,
            matrix_b,
            bounds,
            json,
            csv,
        } => {
            let selection: Selection = bounds.parse()?;
            let a = read_matrix_market(&matrix).map_err(|e| Failure::Usage(format!("{}: {e}", matrix.display())))?;
            let b = match &matrix_b {
                Some(p) => Some(read_matrix_market(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?),
                None => None,
            };
            let report = run_report(&a, b.as_ref(), &selection, None)?;
            emit(&report, json.as_deref())?;
            if let Some(p) = csv {
                fs::write(&p, results_to_csv(&report.results)?)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            }
            let violations = report.violations(tolerance);
            if violations > 0 {
                return Err(Failure::Violation(format!("{violations} inequality violation(s)")));
            }
            Ok(())
        }
        Command::Verify {
            ensemble,
            n,
            trials,
            seed,
            bounds,
            threads,
            json,
        } => {
            let kind: EnsembleKind = ensemble.parse()?;
            let spec = EnsembleSpec::new(kind, n, trials, seed)?;
            let selection: Selection = bounds.parse()?;
            let summary = match threads {
                Some(t) => verify_with_threads(&spec, &selection, tolerance, t)?,
                None => verify(&spec, &selection, tolerance)?,
            };
            emit(&summary, json.as_deref())?;
            if summary.total_violations > 0 {
                return Err(Failure::Violation(format!(
                    "{} inequality violation(s)",
                    summary.total_violations
                )));
            }
            Ok(())
        }
        Command::WorkedExample { json } => {
            let ex = worked_example()?;
            if json {
                emit(&ex, None)?;
            } else {
                println!(
                    "A^2 matches the printed matrix: {}",
                    if ex.square_matches { "yes" } else { "no" }
                );
                for c in &ex.checks {
                    println!(
                        "{}: {:.4} (expected {:.4}) {}",
                        c.label,
                        c.value,
                        c.expected,
                        if c.pass { "pass" } else { "FAIL" }
                    );
                }
                let v: Vec<String> = ex.checks.iter().map(|c| format!("{:.4}", c.value)).collect();
                println!("M - m >= {}", v.join(" <= "));
            }
            if !ex.pass {
                return Err(Failure::Violation("worked example does not reproduce".into()));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(EXIT_OK),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(EXIT_VIOLATION)
        }
    }
}

//! The `czeno` command-line interface: subcommand definitions, dispatch,
//! output writing and process exit codes.
//!
//! Exit codes: 0 on success, 2 for configuration errors (including
//! argument parsing), 3 when a numerical invariant fails.

pub mod config;
pub mod record;
pub mod selftest;
pub mod sweep;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::{Result, SimError};

use config::{Format, RunArgs, RunKind};
use record::RunRecord;
use selftest::SelftestArgs;
use sweep::SweepArgs;

#[derive(Debug, Parser)]
#[command(
    name = "czeno",
    version,
    about = "Counterfactual Rydberg-mediated CZ gate simulator for dual-rail photons"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interaction-free bomb test (detection operating point).
    Ev(RunArgs),
    /// Sign-mode interrogation (θ = π/N).
    Sign(RunArgs),
    /// Light-matter CZ between the bomb and a single photon.
    LmCz(RunArgs),
    /// Full two-photon CZ gate with heralded feed-forward.
    PhotonCz(RunArgs),
    /// Cartesian parameter sweep over one or more axes.
    Sweep(SweepArgs),
    /// Randomized probability-conservation self-test.
    Selftest(SelftestArgs),
}

/// Entry point used by the binary: parse, dispatch, map errors to exit
/// codes. Clap itself exits with code 2 on bad arguments.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// 2 for configuration problems, 3 for numerical-invariant failures.
pub fn exit_code(err: &SimError) -> i32 {
    match err {
        SimError::InvariantViolation(_)
        | SimError::NotTracePreserving(_)
        | SimError::NonOrthonormalBasis
        | SimError::NotNormalized(_) => 3,
        _ => 2,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ev(args) => single(RunKind::Ev, &args),
        Command::Sign(args) => single(RunKind::Sign, &args),
        Command::LmCz(args) => single(RunKind::LmCz, &args),
        Command::PhotonCz(args) => single(RunKind::PhotonCz, &args),
        Command::Sweep(args) => run_sweep(&args),
        Command::Selftest(args) => run_selftest_cmd(&args),
    }
}

fn single(kind: RunKind, args: &RunArgs) -> Result<()> {
    let resolved = config::resolve(args, kind)?;
    let rec = record::execute(kind, &resolved, args.oracle)?;
    let text = render(&[rec], args.format, args.oracle, false)?;
    write_out(&args.out, &text)
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let kind = args.run;
    let resolved = config::resolve(&args.base, kind)?;
    let total = sweep::grid_size(&args.axes, args.allow_large)?;
    let records = sweep::run_points(kind, &resolved, &args.axes, total, args.base.oracle)?;
    let text = render(&records, args.base.format, args.base.oracle, true)?;
    write_out(&args.base.out, &text)
}

fn run_selftest_cmd(args: &SelftestArgs) -> Result<()> {
    let report = selftest::run_selftest(args.trials, args.seed)?;
    println!(
        "selftest: {} randomized configurations, 0 failures, max conservation error {:.3e}",
        report.trials, report.max_conservation_error
    );
    Ok(())
}

fn render(records: &[RunRecord], format: Format, oracle: bool, many: bool) -> Result<String> {
    match format {
        Format::Json => {
            let text = if many {
                serde_json::to_string_pretty(records)
            } else {
                serde_json::to_string_pretty(&records[0])
            }
            .map_err(|e| SimError::Io(format!("serialization failed: {e}")))?;
            Ok(text + "\n")
        }
        Format::Csv => {
            let mut out = record::csv_header(oracle);
            out.push('\n');
            for rec in records {
                out.push_str(&rec.csv_row(oracle));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| SimError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| SimError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

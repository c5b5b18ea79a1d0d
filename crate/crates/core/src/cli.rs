//! Command-line front end.
//!
//! Exit codes: 0 when the command evaluated (whatever the verdict), 2 on
//! input or parse errors, 3 on descriptor inconsistencies (validation
//! failures and parity errors). Verdicts never affect the exit code, so
//! batch pipelines can tell "answered NO" from "could not run".

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::charclass::{lai_indices, CharClassError};
use crate::decide::{
    decide_cr_embedding, decide_parallelizable, decide_ph_embedding, DecisionError,
};
use crate::descriptor::{validate, ManifoldDescriptor};
use crate::format::{read_descriptor_str, read_matrix_str, write_descriptor};
use crate::groups::{abelianization, parse_presentation};
use crate::homology::{euler_characteristic, semi_characteristic, Betti};
use crate::matrix::smith_normal_form;
use crate::obstruction::{gamma_homotopy, kervaire_group};
use crate::surgery::construct_manifold;

const EXIT_OK: i32 = 0;
const EXIT_INPUT: i32 = 2;
const EXIT_INCONSISTENT: i32 = 3;

#[derive(Parser)]
#[command(
    name = "crembed",
    version,
    about = "Exact-arithmetic manifold invariants, obstruction tables, and embedding decisions",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the computable invariants of a descriptor file
    Invariants { file: PathBuf },
    /// Decide a parallelizability or embedding question for a descriptor
    Decide {
        #[arg(value_enum)]
        kind: DecideKind,
        file: PathBuf,
    },
    /// Evaluate the Lai indices from a descriptor's pairing data
    Lai { file: PathBuf },
    /// Build a manifold with prescribed fundamental group
    Construct {
        /// Presentation, e.g. "<a, b | a b a^-1 b^-1>"
        #[arg(long)]
        group: String,
        /// Even target dimension, at least 6
        #[arg(long)]
        dim: usize,
        /// Write the descriptor here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the provenance log here instead of stdout
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Print obstruction-group tables
    Tables {
        #[command(subcommand)]
        table: TableKind,
    },
    /// Invariant factors of an integer matrix file
    Snf { file: PathBuf },
    /// Check a descriptor file for internal consistency
    Validate { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum DecideKind {
    Parallelizable,
    Ph,
    Cr,
    Ac6,
}

#[derive(Subcommand)]
enum TableKind {
    /// Kervaire obstruction groups K_n for n = 1..=max
    Kn {
        #[arg(long)]
        max: usize,
    },
    /// Stable homotopy of the space of complex structures on R^(2n)
    Bott {
        #[arg(long)]
        n: usize,
        #[arg(long = "max-k")]
        max_k: usize,
    },
}

/// Run the CLI on the given arguments, writing to the supplied streams.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INPUT
                }
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Display) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    fn inconsistent(message: impl Display) -> Self {
        CliError {
            code: EXIT_INCONSISTENT,
            message: message.to_string(),
        }
    }
}

impl From<DecisionError> for CliError {
    fn from(e: DecisionError) -> Self {
        match &e {
            DecisionError::ValidationFailure(_) => CliError::inconsistent(e),
            DecisionError::CharClass(CharClassError::ParityError) => CliError::inconsistent(e),
            _ => CliError::input(e),
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_descriptor(path: &Path) -> Result<ManifoldDescriptor, CliError> {
    let text = read_file(path)?;
    read_descriptor_str(&text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Invariants { file } => invariants(&file, out),
        Command::Decide { kind, file } => decide(kind, &file, out),
        Command::Lai { file } => lai(&file, out),
        Command::Construct {
            group,
            dim,
            out: out_path,
            log,
        } => construct(&group, dim, out_path.as_deref(), log.as_deref(), out),
        Command::Tables { table } => tables(table, out),
        Command::Snf { file } => snf(&file, out),
        Command::Validate { file } => validate_cmd(&file, out),
    }
}

fn emit(out: &mut dyn Write, text: impl Display) -> Result<(), CliError> {
    write!(out, "{text}").map_err(|e| CliError::input(format!("write failed: {e}")))
}

fn invariants(file: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let m = load_descriptor(file)?;
    let mut text = String::new();
    text.push_str(&format!("dim = {}\n", m.dim()));
    text.push_str(&format!(
        "betti_z = {}\n",
        m.betti
            .z()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    ));
    text.push_str(&format!(
        "betti_z2 = {}\n",
        m.betti
            .z2()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(",")
    ));
    let chi = match euler_characteristic(&m.betti) {
        Ok(Betti::Known(v)) => v.to_string(),
        _ => match m.chi() {
            Some(v) => format!("{v} (from c_top pairing)"),
            None => "?".to_string(),
        },
    };
    text.push_str(&format!("chi = {chi}\n"));
    if m.dim() % 2 == 1 {
        let sc = match semi_characteristic(&m.betti) {
            Ok(Betti::Known(v)) => v.to_string(),
            _ => "?".to_string(),
        };
        text.push_str(&format!("semi_chi = {sc}\n"));
    }
    if let Some(p) = &m.pi1 {
        let inv = abelianization(p).map_err(CliError::input)?;
        text.push_str(&format!("h1 = {inv}\n"));
    }
    emit(out, text)
}

fn decide(kind: DecideKind, file: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let m = load_descriptor(file)?;
    let decision = match kind {
        DecideKind::Parallelizable => decide_parallelizable(&m)?,
        DecideKind::Ph => decide_ph_embedding(&m)?,
        DecideKind::Cr => decide_cr_embedding(&m)?,
        DecideKind::Ac6 => {
            let report = validate(&m);
            if !report.is_empty() {
                return Err(CliError::inconsistent(format!(
                    "descriptor failed validation:\n{report}"
                )));
            }
            crate::charclass::admits_ac_structure_6d(&m).map_err(CliError::input)?
        }
    };
    emit(out, decision)
}

fn lai(file: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let m = load_descriptor(file)?;
    let data = m
        .lai
        .as_ref()
        .ok_or_else(|| CliError::input("descriptor has no lai.n / lai.pairings data"))?;
    let chi = m
        .chi()
        .ok_or_else(|| CliError::input("Euler characteristic undetermined"))?;
    let (ip, im) = lai_indices(chi, data).map_err(|e| match e {
        CharClassError::ParityError => CliError::inconsistent(e),
        other => CliError::input(other),
    })?;
    emit(out, format!("I+ = {ip}\nI- = {im}\n"))
}

fn construct(
    group: &str,
    dim: usize,
    out_path: Option<&Path>,
    log_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let p = parse_presentation(group).map_err(CliError::input)?;
    let (m, log) = construct_manifold(&p, dim).map_err(CliError::input)?;
    let descriptor_text = write_descriptor(&m);
    match out_path {
        Some(path) => std::fs::write(path, &descriptor_text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        None => emit(out, &descriptor_text)?,
    }
    let log_text = log.to_string();
    match log_path {
        Some(path) => std::fs::write(path, &log_text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?,
        None => {
            // Keep stdout parseable as a descriptor file: log lines become
            // comments.
            for line in log_text.lines() {
                emit(out, format!("# {line}\n"))?;
            }
        }
    }
    Ok(())
}

fn tables(table: TableKind, out: &mut dyn Write) -> Result<(), CliError> {
    match table {
        TableKind::Kn { max } => {
            if max < 1 {
                return Err(CliError::input("--max must be at least 1"));
            }
            let width = max.to_string().len();
            let mut text = String::new();
            for n in 1..=max {
                text.push_str(&format!("{n:>width$}  {}\n", kervaire_group(n)));
            }
            emit(out, text)
        }
        TableKind::Bott { n, max_k } => {
            if n < 1 {
                return Err(CliError::input("--n must be at least 1"));
            }
            let width = max_k.to_string().len();
            let mut text = String::new();
            for k in 0..=max_k {
                text.push_str(&format!("{k:>width$}  {}\n", gamma_homotopy(k, n)));
            }
            emit(out, text)
        }
    }
}

fn snf(file: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let text = read_file(file)?;
    let m = read_matrix_str(&text).map_err(CliError::input)?;
    let snf = smith_normal_form(&m).map_err(CliError::input)?;
    let line = snf
        .diagonal
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(" ");
    emit(out, format!("{line}\n"))
}

fn validate_cmd(file: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let m = load_descriptor(file)?;
    let report = validate(&m);
    if report.is_empty() {
        emit(out, "OK\n")
    } else {
        emit(out, &report)?;
        Err(CliError::inconsistent(format!(
            "{} violation(s)",
            report.violations().len()
        )))
    }
}

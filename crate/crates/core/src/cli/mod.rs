//! Command-line front end.
//!
//! Exit codes: 0 the law holds (or the command succeeded), 1 it fails or a
//! fuzz run found an unflagged inconsistency, 2 invalid input, 3 the
//! verdict is indeterminate because a decision fell near a cutoff.

pub mod commands;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::algebra::AlgebraSignature;
use crate::reverse_order::{Dims, InstanceKind, DEFAULT_TOL};

pub use commands::{certify, cmd_check, cmd_fuzz, cmd_pinv, dump_instance, run_fuzz, FuzzConfig, FuzzReport};
pub use format::{CertificateOutput, OperatorFile};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "penrose", version, about = "Moore-Penrose inverses and reverse-order-law certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pseudoinverse report for one operator file.
    Pinv {
        file: PathBuf,
        /// Absolute singular-value cutoff (default: relative to the largest).
        #[arg(long, value_parser = positive_f64)]
        tol: Option<f64>,
        /// Write the pseudoinverse to this operator file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify whether (TS)^+ = S^+ T^+ for a pair of operator files.
    Check {
        file_t: PathBuf,
        file_s: PathBuf,
        /// Verdict tolerance on relative residuals.
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive_f64)]
        tol: f64,
        /// Emit the certificate as JSON.
        #[arg(long)]
        machine: bool,
    },
    /// Generate seeded instances and cross-check every equivalence.
    Fuzz {
        /// Module dimensions p,m,k of T : A^m -> A^p and S : A^k -> A^m.
        #[arg(long, default_value = "4,4,4", value_parser = parse_dims)]
        dims: Dims,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        count: u64,
        #[arg(long)]
        seed: u64,
        /// Algebra block sizes n1,n2,...
        #[arg(long, default_value = "1", value_parser = parse_signature)]
        signature: AlgebraSignature,
        /// Comma-separated instance kinds, cycled by index.
        #[arg(long, value_delimiter = ',')]
        kinds: Option<Vec<InstanceKind>>,
        #[arg(long, default_value_t = DEFAULT_TOL, value_parser = positive_f64)]
        tol: f64,
        /// Emit the report as JSON.
        #[arg(long)]
        machine: bool,
        /// Worker threads (default: one per core). Output does not depend on it.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Where inconsistent instances are written for replay.
        #[arg(long, default_value = "penrose-fuzz-dumps")]
        dump_dir: PathBuf,
    },
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| format!("`{p}` is not a nonnegative integer")))
        .collect()
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    match parse_list(s)?.as_slice() {
        &[p, m, k] if p > 0 && m > 0 && k > 0 => Ok(Dims::new(p, m, k)),
        _ => Err(format!("`{s}` is not three positive integers p,m,k")),
    }
}

fn parse_signature(s: &str) -> Result<AlgebraSignature, String> {
    AlgebraSignature::new(&parse_list(s)?).map_err(|e| e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_HOLDS };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match cli.command {
        Command::Pinv { file, tol, out: out_path } => cmd_pinv(&file, tol, out_path.as_deref(), out, err),
        Command::Check { file_t, file_s, tol, machine } => cmd_check(&file_t, &file_s, tol, machine, out, err),
        Command::Fuzz {
            dims,
            count,
            seed,
            signature,
            kinds,
            tol,
            machine,
            jobs,
            dump_dir,
        } => {
            let config = FuzzConfig {
                dims,
                count: count as usize,
                seed,
                signature,
                kinds,
                tol,
                jobs: jobs.map(|j| j as usize),
                dump_dir,
            };
            cmd_fuzz(&config, machine, out, err)
        }
    }
}

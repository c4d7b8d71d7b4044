//! `mgroupoid`: analyze bodies for material uniformity and defects.
//!
//! Exit codes: 0 ok, 2 non-uniform, 3 indeterminate, 4 invalid groupoid, 10 and above errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mgroupoid::io::{ImplantPreset, SynthesisKind};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "MGROUPOID_THREADS";

#[derive(Debug, Parser)]
#[command(name = "mgroupoid", version, about = "Material groupoids, uniformity and torsion of discretized bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide uniformity, fix a gauge and, for uniform bodies, compute Christoffel symbols and torsion.
    Analyze {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        eps_iso: Option<f64>,
        #[arg(long)]
        eps_reject: Option<f64>,
        /// Defaults to 10·h².
        #[arg(long)]
        tol_torsion: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        starts: Option<usize>,
    },
    /// Christoffel symbols, torsion and homogeneity verdict of a given gauge field.
    Connection {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        gauge: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        tol_torsion: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a builtin test body with its ground truth.
    Synthesize {
        /// constant, implanted or fgm
        #[arg(long)]
        kind: SynthesisKind,
        /// identity, shear-x3, gradient-x2, diag-x1 or exp-x1
        #[arg(long, default_value = "shear-x3")]
        implant: ImplantPreset,
        #[arg(long, default_value_t = 0.2)]
        beta: f64,
        #[arg(long, default_value_t = 11)]
        n: usize,
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, default_value_t = 0.5)]
        rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the groupoid axioms of an interchange file.
    ValidateGroupoid {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Worker count requested through [`THREADS_ENV`], if any.
fn thread_count(raw: Option<&str>) -> Result<Option<usize>, commands::Failure> {
    let Some(raw) = raw else {
        return Ok(None);
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| commands::Failure::config(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    if n == 0 {
        return Err(commands::Failure::config(format!("{THREADS_ENV} must be at least 1")));
    }
    Ok(Some(n))
}

fn configure_threads() -> Result<(), commands::Failure> {
    let raw = std::env::var(THREADS_ENV).ok();
    match thread_count(raw.as_deref())? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| commands::Failure::config(e.to_string())),
        None => Ok(()),
    }
}

/// Exit code for a command line clap refused. Help and version requests are not errors.
fn usage_code(e: &clap::Error) -> u8 {
    if e.use_stderr() {
        commands::EXIT_USAGE
    } else {
        commands::EXIT_OK
    }
}

fn dispatch(command: Command, w: &mut dyn std::io::Write) -> Result<u8, commands::Failure> {
    match command {
        Command::Analyze {
            input,
            out,
            eps_iso,
            eps_reject,
            tol_torsion,
            seed,
            starts,
        } => commands::analyze(&commands::AnalyzeArgs {
            input,
            out,
            eps_iso,
            eps_reject,
            tol_torsion,
            seed,
            starts,
        }, w),
        Command::Connection {
            input,
            gauge,
            out,
            tol_torsion,
            seed,
        } => commands::connection(&input, &gauge, &out, tol_torsion, seed, w),
        Command::Synthesize {
            kind,
            implant,
            beta,
            n,
            h,
            mu,
            rate,
            out,
        } => commands::synthesize(
            &mgroupoid::io::SynthesisSpec {
                kind,
                implant,
                beta,
                n,
                h,
                mu,
                rate,
            },
            &out,
            w,
        ),
        Command::ValidateGroupoid { input } => commands::validate_groupoid(&input, w),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(usage_code(&e));
        }
    };
    let mut stdout = std::io::stdout().lock();
    match configure_threads().and_then(|()| dispatch(cli.command, &mut stdout)) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests;

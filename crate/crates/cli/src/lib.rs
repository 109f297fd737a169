//! The `dirikit` command-line tool.
//!
//! Subcommands read graphs, order isomorphisms and metrics as JSON (`-` for
//! stdin) and emit JSON or text. Exit codes: `0` success / verdict true,
//! `1` verdict false, `2` usage or input error.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use dirikit::{Family, Tol};

mod commands;
pub mod error;
pub mod json;

pub use error::{CliError, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Environment variable holding the default relative tolerance.
pub const TOL_ENV: &str = "DIRIKIT_TOL";

#[derive(Debug, Parser)]
#[command(
    name = "dirikit",
    version,
    about = "Finite Dirichlet spaces on weighted graphs"
)]
pub struct Cli {
    /// Relative tolerance (overrides DIRIKIT_TOL; default 1e-9)
    #[arg(long, global = true)]
    pub tol: Option<f64>,

    /// Seed for all randomized generation
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write output to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    /// Worker threads for search
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    Relabel,
    Doob,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a graph and report irreducibility, recurrence and spectrum
    Check { graph: String },

    /// Enumerate intertwining order isomorphisms from G1 to G2
    Search {
        g1: String,
        g2: String,
        /// Stop after this many intertwiners
        #[arg(long, default_value_t = 10_000)]
        max: usize,
        /// Tolerance for spectrum and vertex-invariant filters
        #[arg(long, default_value_t = 1e-6)]
        spectral_tol: f64,
    },

    /// Certify an order isomorphism U between G1 and G2
    Certify {
        /// G1.json G2.json U.json
        #[arg(num_args = 0..=3)]
        files: Vec<String>,
        /// Bundle with keys "g1", "g2", "u" (as written by gen-pair)
        #[arg(long, conflicts_with = "files")]
        pair: Option<String>,
    },

    /// Effective resistance matrix of a graph without killing
    Resistance { graph: String },

    /// Canonical intrinsic metric, or check a given one with --metric
    Intrinsic {
        graph: String,
        #[arg(long, value_name = "FILE")]
        metric: Option<String>,
    },

    /// Jump measure and killing of a graph
    Decompose { graph: String },

    /// Emit a graph of a standard family
    Gen {
        #[arg(long)]
        family: Family,
        /// Vertex count (level for sierpinski)
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        conductance: f64,
        #[arg(long, default_value_t = 1.0)]
        measure: f64,
        #[arg(long, default_value_t = 0.0)]
        killing: f64,
    },

    /// Emit a random intertwined pair {"g1", "g2", "u"}
    GenPair {
        #[arg(long, value_enum)]
        transform: Transform,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Measure/conductance factor for relabel (random in [0.5, 2] if absent)
        #[arg(long)]
        scale: Option<f64>,
        /// Add killing to a relabel pair
        #[arg(long)]
        killing: bool,
        /// Also write g1.json, g2.json and u.json into DIR
        #[arg(long, value_name = "DIR")]
        dir: Option<PathBuf>,
    },
}

/// Process streams and environment handed to [`run_with_io`].
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    /// Value of `DIRIKIT_TOL`, if set.
    pub env_tol: Option<String>,
}

/// Runs with the process's streams and environment; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut io = Io {
        stdin: &mut stdin.lock(),
        stdout: &mut stdout.lock(),
        stderr: &mut stderr.lock(),
        env_tol: std::env::var(TOL_ENV).ok(),
    };
    run_with_io(argv, &mut io)
}

pub fn run_with_io<I, T>(argv: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(io.stdout, "{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let line = rendered.lines().next().unwrap_or("invalid arguments");
            let line = line.strip_prefix("error: ").unwrap_or(line);
            let _ = writeln!(io.stderr, "dirikit: {line}");
            return EXIT_ERROR;
        }
    };
    match execute(&cli, io) {
        Ok(code) => code,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(io.stderr, "dirikit: {msg}");
            EXIT_ERROR
        }
    }
}

fn execute(cli: &Cli, io: &mut Io<'_>) -> Result<i32> {
    let tol = resolve_tol(cli.tol, io.env_tol.as_deref())?;
    let output = commands::dispatch(cli, tol, io)?;
    let body = match cli.format {
        Format::Json => json::render(&output.value),
        Format::Text => output.text,
    };
    match &cli.out {
        Some(path) => fs::write(path, body).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?,
        None => io
            .stdout
            .write_all(body.as_bytes())
            .map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                message: e.to_string(),
            })?,
    }
    Ok(output.code)
}

/// `--tol` wins over the environment; both must be finite and positive.
pub fn resolve_tol(flag: Option<f64>, env: Option<&str>) -> Result<Tol> {
    let rel = match (flag, env) {
        (Some(t), _) => t,
        (None, Some(s)) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("{TOL_ENV}=`{s}` is not a number")))?,
        (None, None) => Tol::DEFAULT_REL,
    };
    if !(rel.is_finite() && rel > 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance must be finite and positive, got {rel}"
        )));
    }
    Ok(Tol::relative(rel))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_precedence() {
        assert_eq!(resolve_tol(None, None).unwrap(), Tol::default());
        assert_eq!(resolve_tol(None, Some("1e-6")).unwrap().rel, 1e-6);
        assert_eq!(resolve_tol(Some(1e-3), Some("1e-6")).unwrap().rel, 1e-3);
        assert!(resolve_tol(None, Some("abc")).is_err());
        assert!(resolve_tol(Some(-1.0), None).is_err());
        assert!(resolve_tol(Some(f64::NAN), None).is_err());
    }
}

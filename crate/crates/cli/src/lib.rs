//! `wlab`: command-line front end for whitney-lab.
//!
//! `wlab <command> [--config FILE] [--key value | --key=value]... [--seed N] [--out DIR]`
//!
//! Every run writes its artifacts, a `config.json` echo of the resolved
//! configuration and a `manifest.json` (file hashes, config hash, seed,
//! wall time) into the output directory. Exit status is 0 on success, 2 on a
//! reported numerical failure and 1 on usage or I/O errors.

pub mod commands;
pub mod config;
pub mod output;

use std::path::Path;

use whitney_lab::expansion::ExpansionError;
use whitney_lab::geometry::GeometryError;
use whitney_lab::io::IoError;
use whitney_lab::jets::JetError;
use whitney_lab::laguerre::LaguerreError;
use whitney_lab::mrs::MrsError;
use whitney_lab::ortho::{InvalidBeta, RecurrenceError};

pub use config::{parse_args, ConfigError, RunConfig, OUTPUT_ROOT_ENV};
pub use output::{Emitter, Manifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("io: {0}")]
    Io(String),
    #[error("{module}: {message}")]
    Module { module: &'static str, message: String, numerical: bool },
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    fn module(module: &'static str, e: impl std::fmt::Display, numerical: bool) -> Self {
        CliError::Module { module, message: e.to_string(), numerical }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Module { numerical: true, .. } => EXIT_NUMERICAL,
            _ => EXIT_USAGE,
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        let numerical = matches!(e, GeometryError::DegenerateSample { .. });
        CliError::module("geometry", e, numerical)
    }
}

impl From<JetError> for CliError {
    fn from(e: JetError) -> Self {
        CliError::module("jets", e, false)
    }
}

impl From<MrsError> for CliError {
    fn from(e: MrsError) -> Self {
        let numerical = matches!(e, MrsError::BracketFailure { .. });
        CliError::module("mrs", e, numerical)
    }
}

impl From<InvalidBeta> for CliError {
    fn from(e: InvalidBeta) -> Self {
        CliError::module("ortho", e, false)
    }
}

impl From<RecurrenceError> for CliError {
    fn from(e: RecurrenceError) -> Self {
        match e {
            RecurrenceError::Mrs(inner) => inner.into(),
            RecurrenceError::NoConvergence { .. }
            | RecurrenceError::NonzeroDiagonal { .. }
            | RecurrenceError::NonPositiveAlpha { .. } => CliError::module("ortho", e, true),
            _ => CliError::module("ortho", e, false),
        }
    }
}

impl From<ExpansionError> for CliError {
    fn from(e: ExpansionError) -> Self {
        match e {
            ExpansionError::Recurrence(inner) => inner.into(),
            ExpansionError::Mrs(inner) => inner.into(),
            ExpansionError::IntegrationDivergence { .. } | ExpansionError::NonFinite { .. } => {
                CliError::module("expansion", e, true)
            }
            _ => CliError::module("expansion", e, false),
        }
    }
}

impl From<LaguerreError> for CliError {
    fn from(e: LaguerreError) -> Self {
        let numerical = matches!(e, LaguerreError::IntegrationDivergence { .. });
        CliError::module("laguerre", e, numerical)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Geometry(inner) => inner.into(),
            other => CliError::Io(other.to_string()),
        }
    }
}

/// Parses and runs one invocation; returns the manifest on success.
pub fn run(cfg: &RunConfig) -> Result<Manifest, CliError> {
    let mut out = Emitter::new(&cfg.output);
    commands::run(cfg, &mut out)?;
    out.finish(cfg)
}

pub fn usage() -> String {
    format!(
        "usage: wlab <command> [--config FILE] [--key value]... [--seed N] [--out DIR]\ncommands: {}\n\
         default output directory: ${OUTPUT_ROOT_ENV}/<command> or ./wlab-out/<command>",
        config::COMMANDS.join(", ")
    )
}

/// Entry point shared by the binary and the tests; returns the exit status.
pub fn run_main(args: &[String]) -> i32 {
    if args.is_empty() || matches!(args[0].as_str(), "-h" | "--help" | "help") {
        eprintln!("{}", usage());
        return if args.is_empty() { EXIT_USAGE } else { EXIT_OK };
    }
    let cwd = match std::env::current_dir() {
        Ok(d) => d,
        Err(e) => {
            eprintln!("io: current directory: {e}");
            return EXIT_USAGE;
        }
    };
    let env_root = std::env::var_os(OUTPUT_ROOT_ENV).map(std::path::PathBuf::from);
    let result = parse_args(args, &cwd, env_root.as_deref()).map_err(CliError::from).and_then(|cfg| run(&cfg));
    match result {
        Ok(m) => {
            println!("{}: wrote {} files ({:.3} s)", m.command, m.files.len() + 1, m.wall_time_seconds);
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{e}");
            if matches!(e, CliError::Config(_)) {
                eprintln!("{}", usage());
            }
            e.exit_code()
        }
    }
}

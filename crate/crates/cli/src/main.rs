mod args;
mod commands;
mod config;
mod persist;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use config::{ConfigFile, RunConfig};

/// Exit codes: 0 pass, 1 verified failure, 2 inconclusive (a budget or
/// size limit was hit), 3 usage error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Self::usage(format!("{}: {err}", path.display()))
    }
}

impl From<nearorth::Error> for Failure {
    fn from(err: nearorth::Error) -> Self {
        use nearorth::Error as E;
        let code = match err {
            E::Inconclusive { .. } | E::TooLarge { .. } | E::NoConvergence { .. } => 2,
            E::Unverified(_) | E::Internal(_) => 1,
            _ => 3,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

/// What a command produced: the files to persist, in a fixed order, and a
/// one-line summary for stdout.
pub struct Outcome {
    pub status: Status,
    pub summary: String,
    pub files: Vec<(String, Vec<u8>)>,
}

pub fn pretty_json<T: serde::Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable output");
    bytes.push(b'\n');
    bytes
}

fn run() -> Result<Status, Failure> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return Err(Failure {
                code,
                message: String::new(),
            });
        }
    };
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let output_dir = cli
        .output_dir
        .clone()
        .or_else(|| file.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("runs"));

    if let Command::Replay(a) = &cli.command {
        let manifest = a
            .manifest
            .clone()
            .ok_or_else(|| Failure::usage("missing required flag --manifest"))?;
        return persist::replay(&manifest);
    }

    let config = RunConfig::from_command(cli.command, &file)?;
    let outcome = commands::execute(&config)?;
    let dir = persist::write_run(&output_dir, &config, &outcome)?;
    println!("{} {}", outcome.status.label(), outcome.summary);
    println!("run directory: {}", dir.display());
    Ok(outcome.status)
}

fn main() -> ExitCode {
    match run() {
        Ok(status) => ExitCode::from(status.code()),
        Err(failure) => {
            if !failure.message.is_empty() {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}

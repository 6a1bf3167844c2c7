//! Config files and flag merging.
//!
//! A config file is TOML with an optional top-level `output_dir` and one
//! table per subcommand whose keys are flag names with underscores:
//!
//! ```toml
//! output_dir = "runs"
//!
//! [construct]
//! p = 2
//! t = 5
//! max_retries = 20
//! ```
//!
//! Flags given on the command line override the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{
    Command, ConstructArgs, CountArgs, CoversArgs, ExportArgs, SpectralArgs, SweepArgs, VerifyArgs,
};
use crate::Failure;

#[derive(Debug, Default)]
pub struct ConfigFile {
    pub output_dir: Option<PathBuf>,
    sections: toml::Table,
}

const SECTIONS: [&str; 7] = [
    "construct",
    "verify",
    "spectral",
    "covers",
    "count",
    "sweep",
    "export",
];

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
        let output_dir = match table.remove("output_dir") {
            Some(toml::Value::String(s)) => Some(PathBuf::from(s)),
            Some(other) => {
                return Err(Failure::usage(format!(
                    "output_dir must be a string, got {other}"
                )))
            }
            None => None,
        };
        let allowed: BTreeSet<&str> = SECTIONS.into_iter().collect();
        if let Some(key) = table.keys().find(|k| !allowed.contains(k.as_str())) {
            return Err(Failure::usage(format!(
                "{}: unknown config key `{key}`",
                path.display()
            )));
        }
        Ok(Self {
            output_dir,
            sections: table,
        })
    }

    fn section(&self, name: &str) -> Result<Value, Failure> {
        match self.sections.get(name) {
            None => Ok(Value::Object(Default::default())),
            Some(toml::Value::Table(t)) => {
                serde_json::to_value(t).map_err(|e| Failure::usage(format!("[{name}]: {e}")))
            }
            Some(_) => Err(Failure::usage(format!(
                "config key `{name}` must be a table"
            ))),
        }
    }
}

/// Overlays the flags that were given onto the config file section.
fn merge<T: Serialize + DeserializeOwned>(
    flags: &T,
    name: &str,
    file: &ConfigFile,
) -> Result<T, Failure> {
    let mut base = file.section(name)?;
    let given = serde_json::to_value(flags).expect("flag structs serialize");
    let (Value::Object(base_map), Value::Object(given)) = (&mut base, given) else {
        unreachable!("flag structs serialize to objects")
    };
    for (key, value) in given {
        if !value.is_null() {
            base_map.insert(key, value);
        }
    }
    serde_json::from_value(base).map_err(|e| Failure::usage(format!("[{name}]: {e}")))
}

/// A fully resolved invocation; this is what a manifest records and what
/// `replay` re-executes.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "command", content = "args", rename_all = "snake_case")]
pub enum RunConfig {
    Construct(ConstructArgs),
    Verify(VerifyArgs),
    Spectral(SpectralArgs),
    Covers(CoversArgs),
    Count(CountArgs),
    Sweep(SweepArgs),
    Export(ExportArgs),
}

impl RunConfig {
    pub fn from_command(command: Command, file: &ConfigFile) -> Result<Self, Failure> {
        let name = command.name();
        Ok(match command {
            Command::Construct(a) => RunConfig::Construct(merge(&a, name, file)?.resolve()?),
            Command::Verify(a) => RunConfig::Verify(merge(&a, name, file)?.resolve()?),
            Command::Spectral(a) => RunConfig::Spectral(merge(&a, name, file)?.resolve()?),
            Command::Covers(a) => RunConfig::Covers(merge(&a, name, file)?.resolve()?),
            Command::Count(a) => RunConfig::Count(merge(&a, name, file)?.resolve()?),
            Command::Sweep(a) => RunConfig::Sweep(merge(&a, name, file)?.resolve()?),
            Command::Export(a) => RunConfig::Export(merge(&a, name, file)?.resolve()?),
            Command::Replay(_) => unreachable!("replay is dispatched before config resolution"),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Construct(_) => "construct",
            RunConfig::Verify(_) => "verify",
            RunConfig::Spectral(_) => "spectral",
            RunConfig::Covers(_) => "covers",
            RunConfig::Count(_) => "count",
            RunConfig::Sweep(_) => "sweep",
            RunConfig::Export(_) => "export",
        }
    }

    /// Input files the run reads.
    pub fn inputs(&self) -> Vec<&Path> {
        let paths: Vec<&Option<PathBuf>> = match self {
            RunConfig::Verify(a) => vec![&a.input],
            RunConfig::Covers(a) => vec![&a.input, &a.input2],
            RunConfig::Export(a) => vec![&a.input],
            _ => vec![],
        };
        paths.into_iter().flatten().map(PathBuf::as_path).collect()
    }
}

//! Run directories and manifests.
//!
//! A run directory is named `<command>-<id>`, where `id` is the first 16 hex
//! digits of a SHA-256 over the resolved config and every output file. The
//! outputs are deterministic, so the timestamp lives only in
//! `manifest.json`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::{commands, pretty_json, Failure, Outcome, Status};

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    tool: String,
    version: String,
    run_id: String,
    config: RunConfig,
    /// SHA-256 of each input file, keyed by path as given.
    inputs: BTreeMap<String, String>,
    /// SHA-256 of each output file in the run directory.
    outputs: BTreeMap<String, String>,
    created_unix: u64,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn hash_inputs(config: &RunConfig) -> Result<BTreeMap<String, String>, Failure> {
    config
        .inputs()
        .into_iter()
        .map(|path| {
            let bytes = std::fs::read(path).map_err(|e| Failure::io(path, e))?;
            Ok((path.display().to_string(), sha256_hex(&bytes)))
        })
        .collect()
}

fn run_id(config: &RunConfig, outcome: &Outcome) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serde_json::to_vec(config).expect("config serializes"));
    for (name, bytes) in &outcome.files {
        hasher.update((name.len() as u64).to_le_bytes());
        hasher.update(name.as_bytes());
        hasher.update((bytes.len() as u64).to_le_bytes());
        hasher.update(bytes);
    }
    hex::encode(&hasher.finalize()[..8])
}

pub fn write_run(
    output_dir: &Path,
    config: &RunConfig,
    outcome: &Outcome,
) -> Result<PathBuf, Failure> {
    let id = run_id(config, outcome);
    let dir = output_dir.join(format!("{}-{id}", config.name()));
    std::fs::create_dir_all(&dir).map_err(|e| Failure::io(&dir, e))?;
    let mut outputs = BTreeMap::new();
    for (name, bytes) in &outcome.files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| Failure::io(&path, e))?;
        outputs.insert(name.clone(), sha256_hex(bytes));
    }
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        run_id: id,
        config: config.clone(),
        inputs: hash_inputs(config)?,
        outputs,
        created_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
    };
    let path = dir.join("manifest.json");
    std::fs::write(&path, pretty_json(&manifest)).map_err(|e| Failure::io(&path, e))?;
    Ok(dir)
}

/// Re-executes a manifest's config and compares output hashes. Nothing is
/// written.
pub fn replay(path: &Path) -> Result<Status, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("{}: not a run manifest: {e}", path.display())))?;
    if manifest.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, replaying with {}",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let inputs = hash_inputs(&manifest.config)?;
    let mut identical = true;
    for (name, hash) in &manifest.inputs {
        if inputs.get(name) != Some(hash) {
            println!("input {name}: changed since the run");
            identical = false;
        }
    }
    let outcome = commands::execute(&manifest.config)?;
    let produced: BTreeMap<&str, String> = outcome
        .files
        .iter()
        .map(|(name, bytes)| (name.as_str(), sha256_hex(bytes)))
        .collect();
    for (name, hash) in &manifest.outputs {
        let same = produced.get(name.as_str()) == Some(hash);
        println!("{name}: {}", if same { "identical" } else { "differs" });
        identical &= same;
    }
    if produced.len() != manifest.outputs.len() {
        println!("output file sets differ");
        identical = false;
    }
    if identical {
        println!("PASS replay of {} reproduced every output", manifest.run_id);
        Ok(Status::Pass)
    } else {
        println!(
            "FAIL replay of {} did not reproduce the run",
            manifest.run_id
        );
        Ok(Status::Fail)
    }
}

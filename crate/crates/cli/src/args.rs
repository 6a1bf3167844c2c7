//! Command-line surface. Every subcommand's flags are optional at the clap
//! level so that a config file can supply them; `resolve` fills defaults and
//! reports what is still missing. The resolved structs are what gets
//! persisted in a run manifest.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use nearorth::verify::CheckMode;

use crate::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "nearorth",
    version,
    about = "Nearly orthogonal vector sets over prime fields"
)]
pub struct Cli {
    /// TOML file with a `[<subcommand>]` table of flag values; flags given on
    /// the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Parent directory for run directories (default: `runs`).
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample, deduplicate and verify a tensor-product set.
    Construct(ConstructArgs),
    /// Check a vector set for k-near-orthogonality or the bipartite property.
    Verify(VerifyArgs),
    /// Spectrum, mixing and cross-bound checks on the orthogonality graph G(p,t).
    Spectral(SpectralArgs),
    /// Subspace cover constructions.
    Covers(CoversArgs),
    /// Count pairwise non-orthogonal sets in F_p^t.
    Count(CountArgs),
    /// Run `construct` over a parameter grid and write a CSV summary.
    Sweep(SweepArgs),
    /// Export the graph of a verified set with clique cover bounds.
    Export(ExportArgs),
    /// Re-run a persisted manifest and compare output hashes.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Verify(_) => "verify",
            Command::Spectral(_) => "spectral",
            Command::Covers(_) => "covers",
            Command::Count(_) => "count",
            Command::Sweep(_) => "sweep",
            Command::Export(_) => "export",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Clique,
    Bipartite,
}

impl From<Mode> for CheckMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Clique => CheckMode::Clique,
            Mode::Bipartite => CheckMode::Bipartite,
        }
    }
}

impl From<CheckMode> for Mode {
    fn from(m: CheckMode) -> Self {
        match m {
            CheckMode::Clique => Mode::Clique,
            CheckMode::Bipartite => Mode::Bipartite,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    F2,
    Fp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverOp {
    F2cover,
    Gcheck,
    Pair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Dimacs,
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::usage(format!("missing required flag --{flag}")))
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Ambient dimension; products are zero-padded up to it (default t^m).
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_retries: Option<usize>,
    /// Derive t, m and n from k and d by a parameter schedule.
    #[arg(long, value_enum)]
    pub schedule: Option<ScheduleKind>,
    /// Subset budget for bipartite checks.
    #[arg(long)]
    pub budget: Option<u64>,
}

impl ConstructArgs {
    pub fn resolve(mut self) -> Result<Self, Failure> {
        self.p.get_or_insert(2);
        self.mode.get_or_insert(Mode::Clique);
        self.seed.get_or_insert(0);
        self.max_retries.get_or_insert(20);
        self.budget
            .get_or_insert(nearorth::verify::DEFAULT_SUBSET_BUDGET as u64);
        required(self.k, "k")?;
        if self.schedule.is_some() {
            required(self.d, "d")?;
            if self.t.is_some() || self.m.is_some() || self.n.is_some() {
                return Err(Failure::usage(
                    "--schedule derives t, m and n; do not pass them too",
                ));
            }
        } else {
            required(self.t, "t")?;
            required(self.m, "m")?;
            required(self.n, "n")?;
        }
        Ok(self)
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// Vector set JSON (a list of vectors, `{"p", "vectors"}`, or a run file).
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub budget: Option<u64>,
}

impl VerifyArgs {
    pub fn resolve(mut self) -> Result<Self, Failure> {
        required(self.input.as_ref(), "input")?;
        required(self.k, "k")?;
        self.mode.get_or_insert(Mode::Clique);
        self.budget
            .get_or_insert(nearorth::verify::DEFAULT_SUBSET_BUDGET as u64);
        Ok(self)
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub t: Option<usize>,
    /// Random subset pairs for the expander mixing check.
    #[arg(long)]
    pub mixing_samples: Option<usize>,
    /// Also check |C1||C2| <= p^(t+2) over cross non-orthogonal pairs.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub cross: Option<bool>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl SpectralArgs {
    pub fn resolve(mut self) -> Result<Self, Failure> {
        required(self.p, "p")?;
        required(self.t, "t")?;
        self.mixing_samples.get_or_insert(0);
        self.cross.get_or_insert(false);
        self.seed.get_or_insert(0);
        Ok(self)
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoversArgs {
    #[arg(long, value_enum)]
    pub op: Option<CoverOp>,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub t: Option<usize>,
    /// Input set (`f2cover`), or the first set of a pair (`pair`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Second set of a pair (`pair`).
    #[arg(long)]
    pub input2: Option<PathBuf>,
    /// Pair budget for `gcheck`.
    #[arg(long)]
    pub budget: Option<u64>,
}

impl CoversArgs {
    pub fn resolve(mut self) -> Result<Self, Failure> {
        match required(self.op, "op")? {
            CoverOp::F2cover => {
                required(self.input.as_ref(), "input")?;
            }
            CoverOp::Gcheck => {
                required(self.p, "p")?;
                required(self.t, "t")?;
                self.budget
                    .get_or_insert(nearorth::covers::DEFAULT_PAIR_BUDGET as u64);
            }
            CoverOp::Pair => {
                required(self.input.as_ref(), "input")?;
                required(self.input2.as_ref(), "input2")?;
            }
        }
        Ok(self)
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountArgs {
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub t: Option<usize>,
}

impl CountArgs {
    pub fn resolve(self) -> Result<Self, Failure> {
        required(self.p, "p")?;
        required(self.t, "t")?;
        Ok(self)
    }
}

/// Grid axes are lists (`3,4,5`), inclusive ranges (`3..5`), or a mix.
#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub t: Option<String>,
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub max_retries: Option<usize>,
    /// Refuse grids with more points than this.
    #[arg(long)]
    pub max_points: Option<usize>,
}

impl SweepArgs {
    pub fn resolve(mut self) -> Result<Self, Failure> {
        self.p.get_or_insert_with(|| "2".into());
        self.n.get_or_insert_with(|| "32".into());
        self.seeds.get_or_insert_with(|| "1".into());
        self.mode.get_or_insert(Mode::Clique);
        self.max_retries.get_or_insert(20);
        self.max_points.get_or_insert(10_000);
        required(self.t.as_ref(), "t")?;
        required(self.m.as_ref(), "m")?;
        required(self.k.as_ref(), "k")?;
        Ok(self)
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportArgs {
    /// Run file or vector set JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Defaults to the run's k when the input is a run file.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl ExportArgs {
    pub fn resolve(mut self) -> Result<Self, Failure> {
        required(self.input.as_ref(), "input")?;
        self.format.get_or_insert(Format::Json);
        Ok(self)
    }
}

#[derive(Clone, Debug, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayArgs {
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

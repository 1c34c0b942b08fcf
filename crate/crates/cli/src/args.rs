use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "qprecomp",
    version,
    about = "Precomputed quantum gate application: simulations and cost tables"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Corrected Clifford gate teleportation against direct application.
    Teleport(TeleportArgs),
    /// The layered protocol for random diagonal elements of level k.
    ZkRun(ZkRunArgs),
    /// Density matrix exponentiation error against the number of copies.
    DmeSweep(DmeSweepArgs),
    /// Gate-count table with fitted scaling exponents.
    CostTable(CostTableArgs),
    /// Built-in consistency checks.
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Overwrite an existing --out file.
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Teleport the identity instead of random Clifford circuits.
    #[arg(long)]
    pub identity: bool,
    /// Fail instead of falling back to ledger-only runs.
    #[arg(long)]
    pub require_verify: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ZkRunArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    /// Stop level; defaults to max(1, ⌊k/2⌋).
    #[arg(long)]
    pub a: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub require_verify: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct DmeSweepArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = PI)]
    pub t: f64,
    /// Copy counts to sweep.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200,400,800,1600")]
    pub m: Vec<usize>,
    /// Probe states per copy count.
    #[arg(long, default_value_t = 5)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also report the copy count the calibrated budget assigns to this accuracy.
    #[arg(long)]
    pub eps: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CostTableArgs {
    /// Sizes, either `N` or the inclusive range `LO..HI`.
    #[arg(long, default_value = "2..8")]
    pub n: SizeRange,
    /// Level of the diagonal element; 0 tabulates Clifford teleportation.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Stop level; defaults to 0 for k = 0 and max(1, ⌊k/2⌋) otherwise.
    #[arg(long)]
    pub a: Option<usize>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub require_verify: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Corrupt the frozen destination table first; the run must then fail.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
    /// Write the checks as JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub force: bool,
}

/// Inclusive range of sizes; never empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeRange {
    pub lo: usize,
    pub hi: usize,
}

impl SizeRange {
    pub fn values(&self) -> Vec<usize> {
        (self.lo..=self.hi).collect()
    }
}

impl FromStr for SizeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| format!("bad size {t:?}: {e}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((lo, hi)) => (parse(lo)?, parse(hi.trim_start_matches('='))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty size range {s:?}"));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for SizeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

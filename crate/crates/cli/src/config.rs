//! Run configuration: command-line flags over an optional JSON file over
//! per-command defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use bonnesen_core::{PolygonKind, Precision};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// Environment variable naming a default config file.
pub const CONFIG_ENV: &str = "BONNESEN_CONFIG";

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_SAMPLES: usize = 10_000;
pub const DEFAULT_MARGIN: f64 = 1e-6;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_BUDGET: usize = 10_000;
pub const DEFAULT_STARTS: usize = 20;

#[derive(Debug, Parser)]
#[command(name = "bonnesen", version, about = "Numerical verification of Bonnesen-style polygon inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Verify,
    Certify,
    Search,
    Catalog,
    Report,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Verify => "verify",
            CommandKind::Certify => "certify",
            CommandKind::Search => "search",
            CommandKind::Catalog => "catalog",
            CommandKind::Report => "report",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every catalog entry on sampled polygons.
    Verify(Flags),
    /// Classify the master functions by sampling their Schur condition.
    Certify(Flags),
    /// Minimize each entry's slack and attempt falsification.
    Search(Flags),
    /// List the catalog.
    Catalog(Flags),
    /// Check and re-render a saved report.
    Report(ReportFlags),
}

/// Flags shared by the working subcommands. Everything is optional so the
/// config file and defaults can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Polygon sizes, e.g. `3..8` or `3,5,7`.
    #[arg(long)]
    pub n: Option<IntSet>,
    #[arg(long)]
    pub alpha: Option<IntSet>,
    #[arg(long)]
    pub k: Option<IntSet>,
    /// Comma-separated polygon kinds (`tangential`, `cyclic`).
    #[arg(long, value_delimiter = ',')]
    pub kinds: Option<Vec<PolygonKind>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Minimum distance of every angle from 0 and pi/2.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Relative slack below which a record counts as a violation.
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub precision: Option<PrecisionMode>,
    /// Significant digits in high-precision mode.
    #[arg(long)]
    pub digits: Option<u32>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Falsifier evaluations per search problem.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Optimizer starts per search problem.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Lattice resolution for the grid cross-check in `search` (n of 3 or 4 only).
    #[arg(long)]
    pub grid: Option<usize>,
    /// Add a deliberately false entry to the catalog.
    #[arg(long)]
    pub plant_fault: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ReportFlags {
    /// Report to check.
    pub input: PathBuf,
    #[arg(long)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PrecisionMode {
    Standard,
    High,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
    Text,
}

/// A set of integers written as a comma list of values and `a..b` ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSet(pub Vec<u32>);

impl FromStr for IntSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, b)) = part.split_once("..") {
                let b = b.strip_prefix('=').unwrap_or(b);
                let a: u32 = a.trim().parse().map_err(|_| format!("bad range start in `{part}`"))?;
                let b: u32 = b.trim().parse().map_err(|_| format!("bad range end in `{part}`"))?;
                if a > b {
                    return Err(format!("empty range `{part}`"));
                }
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| format!("bad integer `{part}`"))?);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(IntSet(out))
    }
}

/// Contents of a JSON config file. Unknown keys are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<Vec<u32>>,
    pub alpha: Option<Vec<u32>>,
    pub k: Option<Vec<u32>>,
    pub kinds: Option<Vec<PolygonKind>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub margin: Option<f64>,
    pub tolerance: Option<f64>,
    pub precision: Option<PrecisionMode>,
    pub digits: Option<u32>,
    pub radius: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub budget: Option<usize>,
    pub starts: Option<usize>,
    pub grid: Option<usize>,
    pub plant_fault: Option<bool>,
}

/// A fully resolved configuration, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub n: Vec<u32>,
    pub alpha: Vec<u32>,
    pub k: Vec<u32>,
    pub kinds: Vec<PolygonKind>,
    pub samples: usize,
    pub seed: u64,
    pub margin: f64,
    pub tolerance: f64,
    pub precision: Precision,
    pub radius: f64,
    pub budget: usize,
    pub starts: usize,
    pub grid: Option<usize>,
    pub plant_fault: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

pub fn load_file(path: &Path) -> Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| ConfigError(format!("invalid config {}: {e}", path.display())))
}

/// The config file named by `--config`, else by [`CONFIG_ENV`], else none.
pub fn config_path(flags: &Flags) -> Option<PathBuf> {
    flags
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
}

fn default_n(command: CommandKind) -> Vec<u32> {
    match command {
        CommandKind::Search => vec![3, 4, 5],
        _ => (3..=8).collect(),
    }
}

impl RunConfig {
    /// Applies precedence flags > file > defaults and validates the result.
    pub fn resolve(command: CommandKind, flags: &Flags, file: &ConfigFile) -> Result<RunConfig, ConfigError> {
        let n = flags.n.clone().map(|s| s.0).or_else(|| file.n.clone()).unwrap_or_else(|| default_n(command));
        let alpha = flags.alpha.clone().map(|s| s.0).or_else(|| file.alpha.clone()).unwrap_or_else(|| vec![1, 2, 3]);
        let k = flags.k.clone().map(|s| s.0).or_else(|| file.k.clone()).unwrap_or_else(|| vec![2, 3]);
        let mut kinds = flags
            .kinds
            .clone()
            .or_else(|| file.kinds.clone())
            .unwrap_or_else(|| PolygonKind::ALL.to_vec());
        kinds.sort_unstable();
        kinds.dedup();
        let precision = match flags.precision.or(file.precision).unwrap_or(PrecisionMode::Standard) {
            PrecisionMode::Standard => Precision::Standard,
            PrecisionMode::High => Precision::High {
                digits: flags.digits.or(file.digits).unwrap_or(Precision::DEFAULT_HIGH_DIGITS),
            },
        };
        let default_format = if command == CommandKind::Catalog {
            OutputFormat::Text
        } else {
            OutputFormat::Json
        };
        let cfg = RunConfig {
            command,
            n: sorted(n),
            alpha: sorted(alpha),
            k: sorted(k),
            kinds,
            samples: flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            margin: flags.margin.or(file.margin).unwrap_or(DEFAULT_MARGIN),
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(DEFAULT_TOLERANCE),
            precision,
            radius: flags.radius.or(file.radius).unwrap_or(1.0),
            budget: flags.budget.or(file.budget).unwrap_or(DEFAULT_BUDGET),
            starts: flags.starts.or(file.starts).unwrap_or(DEFAULT_STARTS),
            grid: flags.grid.or(file.grid),
            plant_fault: flags.plant_fault || file.plant_fault.unwrap_or(false),
            out: flags.out.clone().or_else(|| file.out.clone()),
            format: flags.format.or(file.format).unwrap_or(default_format),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        if self.n.is_empty() || self.alpha.is_empty() || self.k.is_empty() || self.kinds.is_empty() {
            return err("n, alpha, k and kinds must all be nonempty");
        }
        if let Some(&n) = self.n.iter().find(|&&n| n < 3) {
            return err(format!("polygons need n >= 3, got {n}"));
        }
        if self.alpha.contains(&0) {
            return err("alpha must be >= 1");
        }
        if let Some(&k) = self.k.iter().find(|&&k| k < 2) {
            return err(format!("k must be >= 2, got {k}"));
        }
        if self.samples == 0 {
            return err("samples must be >= 1");
        }
        if !(self.margin > 0.0 && self.margin.is_finite()) {
            return err("margin must be positive");
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return err("tolerance must be nonnegative");
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return err("radius must be positive");
        }
        if self.budget == 0 {
            return err("budget must be >= 1");
        }
        if self.starts == 0 {
            return err("starts must be >= 1");
        }
        if let Precision::High { digits } = self.precision {
            if digits < Precision::MIN_HIGH_DIGITS {
                return err(format!("high precision needs at least {} digits", Precision::MIN_HIGH_DIGITS));
            }
        }
        if let Some(res) = self.grid {
            if res == 0 {
                return err("grid resolution must be >= 1");
            }
        }
        Ok(())
    }
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v.dedup();
    v
}

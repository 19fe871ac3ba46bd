//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(
    name = "evt-entropy",
    version,
    about = "Entropy of normalized maxima: curves, density panels, limit entropies, domain diagnostics",
    after_help = "EVT_ENTROPY_THREADS caps the number of worker threads.\n\
                  Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 numerical failure."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// H, Δ and relative entropy of the normalized k-th extreme over a grid of n.
    EntropyCurve(CurveArgs),
    /// Densities of the normalized k-th extreme for each n, next to the limit density.
    DensityPanel(PanelArgs),
    /// Closed-form entropy of the k-th extreme limit law.
    LimitEntropy(LimitArgs),
    /// Von Mises diagnosis of the max domain of attraction.
    Classify(ClassifyArgs),
    /// Runs the built-in verification suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    /// pareto, uniform, exponential or normal.
    #[arg(long)]
    pub family: String,
    /// Pareto shape.
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ToleranceArgs {
    #[arg(long, default_value_t = 1e-11)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 1e-11)]
    pub rel_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output directory, created if missing.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// `2..100` (inclusive) or a list such as `2,4,8` or `1e2,1e3`. Default 2..100.
    #[arg(long, value_parser = parse_n_grid)]
    pub n_grid: Option<NGrid>,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PanelArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Default 2..4, or 3..9 for the normal family.
    #[arg(long, value_parser = parse_n_grid)]
    pub n_grid: Option<NGrid>,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub x_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LimitArgs {
    /// gumbel, frechet or weibull, or a parent family (its limit is used).
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub k: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Location of a location-scale wrap of the parent.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub loc: f64,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracles,
    Montecarlo,
    Figures,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
}

/// A parsed `--n-grid`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGrid(pub Vec<u64>);

fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    // allow 1e4 style
    match s.parse::<f64>() {
        Ok(v) if v.fract() == 0.0 && v >= 0.0 && v < 2f64.powi(63) => Ok(v as u64),
        _ => Err(format!("'{s}' is not a non-negative integer")),
    }
}

/// Parses `a..b` (inclusive) or a comma-separated list; the result is
/// nonempty, positive and strictly increasing.
pub fn parse_n_grid(s: &str) -> Result<NGrid, String> {
    let grid = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_count(a)?, parse_count(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        if b - a > 10_000_000 {
            return Err(format!("range {s} has more than 10^7 points"));
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(parse_count)
            .collect::<Result<Vec<_>, _>>()?
    };
    if grid.is_empty() {
        return Err("n grid is empty".into());
    }
    if grid[0] == 0 {
        return Err("n must be positive".into());
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("n grid {s} is not strictly increasing"));
    }
    Ok(NGrid(grid))
}

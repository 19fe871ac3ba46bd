//! Library half of the `evt-entropy` command-line tool.
//!
//! Every subcommand is a plain function over a typed configuration so the
//! commands can be driven from tests as well as from `main`.

use std::fmt;
use std::path::PathBuf;

use evt_entropy::families::WorkedFamily;
use evt_entropy::quadrature::QuadratureSpec;

pub mod args;
pub mod commands;
pub mod svg;
pub mod verify;

pub use args::Format;

/// Seed of the Monte Carlo checks when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_250_321;

/// Environment variable capping the rayon thread pool.
pub const THREADS_ENV: &str = "EVT_ENTROPY_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an unusable configuration; exit code 2.
    Usage(String),
    /// One or more verification checks failed; exit code 1.
    Verification(String),
    /// A numerical routine failed; exit code 3.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    pub(crate) fn usage(e: impl fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }

    pub(crate) fn numerical(e: impl fmt::Display) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Verification(m) => write!(f, "verification failed: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Settings shared by the figure commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub family: WorkedFamily,
    pub n_grid: Vec<u64>,
    pub k: u64,
    pub spec: QuadratureSpec,
    pub out: PathBuf,
    pub format: Format,
    pub seed: Option<u64>,
}

impl RunConfig {
    /// CSV into the current directory with default tolerances.
    pub fn new(family: WorkedFamily, n_grid: Vec<u64>, k: u64) -> Self {
        RunConfig {
            family,
            n_grid,
            k,
            spec: QuadratureSpec::default(),
            out: PathBuf::from("."),
            format: Format::Csv,
            seed: None,
        }
    }

    pub fn with_out(mut self, out: impl Into<PathBuf>) -> Self {
        self.out = out.into();
        self
    }

    pub fn with_format(mut self, format: Format) -> Self {
        self.format = format;
        self
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.n_grid.is_empty() {
            return Err(CliError::usage("n grid is empty"));
        }
        if self.n_grid[0] == 0 || self.n_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::usage(
                "n grid must be positive and strictly increasing",
            ));
        }
        if self.k == 0 || self.k > self.n_grid[0] {
            return Err(CliError::Usage(format!(
                "k must lie in 1..={} (the smallest n), got {}",
                self.n_grid[0], self.k
            )));
        }
        self.spec.validate().map_err(CliError::usage)?;
        if self.family == WorkedFamily::StdNormal && self.n_grid[0] < 2 {
            return Err(CliError::usage("the normal norming constants need n >= 2"));
        }
        std::fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", self.out.display())))
    }
}

/// Applies [`THREADS_ENV`] to the global rayon pool. Call once, before any
/// parallel work.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        CliError::Usage(format!(
            "{THREADS_ENV} must be a positive integer, got '{raw}'"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(CliError::usage)
}

pub(crate) fn family_of(args: &args::FamilyArgs) -> Result<WorkedFamily, CliError> {
    WorkedFamily::parse(&args.family, args.alpha).map_err(CliError::usage)
}

pub(crate) fn spec_of(t: args::ToleranceArgs) -> QuadratureSpec {
    QuadratureSpec {
        abs_tol: t.abs_tol,
        rel_tol: t.rel_tol,
        ..QuadratureSpec::default()
    }
}

/// Runs a parsed command line, writing reports to `stdout`.
pub fn run(cli: args::Cli, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    use args::Command;
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write output: {e}"));
    match cli.command {
        Command::EntropyCurve(a) => {
            let family = family_of(&a.family)?;
            let cfg = RunConfig {
                family,
                n_grid: a
                    .n_grid
                    .map(|g| g.0)
                    .unwrap_or_else(commands::default_curve_grid),
                k: a.k,
                spec: spec_of(a.tolerances),
                out: a.output.out,
                format: a.output.format,
                seed: None,
            };
            let outcome = commands::cmd_entropy_curve(&cfg)?;
            for f in &outcome.files {
                writeln!(stdout, "wrote {}", f.display()).map_err(io)?;
            }
        }
        Command::DensityPanel(a) => {
            let family = family_of(&a.family)?;
            let cfg = RunConfig {
                family,
                n_grid: a
                    .n_grid
                    .map(|g| g.0)
                    .unwrap_or_else(|| commands::default_panel_grid(family)),
                k: a.k,
                spec: spec_of(a.tolerances),
                out: a.output.out,
                format: a.output.format,
                seed: None,
            };
            let range = commands::XRange {
                min: a.x_min,
                max: a.x_max,
                points: a.points,
            };
            let outcome = commands::cmd_density_panel(&cfg, &range)?;
            for (n, mass) in &outcome.panel.masses {
                writeln!(stdout, "n = {n}: total mass {mass:.12}").map_err(io)?;
            }
            for f in &outcome.files {
                writeln!(stdout, "wrote {}", f.display()).map_err(io)?;
            }
        }
        Command::LimitEntropy(a) => {
            let h = commands::cmd_limit_entropy(&a.family, a.alpha, a.k)?;
            writeln!(stdout, "{h:.12}").map_err(io)?;
        }
        Command::Classify(a) => {
            let family = family_of(&a.family)?;
            let report = commands::cmd_classify(family, a.loc, a.scale)?;
            stdout.write_all(report.as_bytes()).map_err(io)?;
        }
        Command::Verify(a) => {
            let checks = verify::run_suite(a.suite, a.seed, &spec_of(a.tolerances));
            verify::write_table(&checks, stdout).map_err(io)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            writeln!(stdout, "passed {}/{}", checks.len() - failed, checks.len()).map_err(io)?;
            if failed > 0 {
                return Err(CliError::Verification(format!(
                    "{failed} of {} checks failed",
                    checks.len()
                )));
            }
        }
    }
    Ok(())
}

//! The figure, limit-entropy and classification commands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use evt_entropy::classify::try_classify;
use evt_entropy::entropy::{sweep_row, total_mass, SweepRow};
use evt_entropy::prelude::*;
use rayon::prelude::*;
use std::result::Result;

use crate::svg::{Plot, Series};
use crate::{CliError, RunConfig};

pub const ENTROPY_CURVE_CSV: &str = "entropy_curve.csv";
/// Written instead of [`ENTROPY_CURVE_CSV`] when a grid point fails.
pub const ENTROPY_CURVE_PARTIAL_CSV: &str = "entropy_curve.partial.csv";
pub const ENTROPY_CURVE_SVG: &str = "entropy_curve.svg";
pub const DENSITY_PANEL_CSV: &str = "density_panel.csv";
pub const DENSITY_PANEL_SVG: &str = "density_panel.svg";

pub const CURVE_HEADER: [&str; 6] = ["n", "H", "Delta", "KL", "limit_H", "gap"];

pub fn default_curve_grid() -> Vec<u64> {
    (2..=100).collect()
}

pub fn default_panel_grid(family: WorkedFamily) -> Vec<u64> {
    match family {
        WorkedFamily::StdNormal => (3..=9).collect(),
        _ => (2..=4).collect(),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn csv_bytes(
    header: &[String],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Usage(format!("csv: {e}"));
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(&r).map_err(fail)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Usage(format!("csv: {e}")))
}

fn describe(family: WorkedFamily, k: u64) -> String {
    if k == 1 {
        family.to_string()
    } else {
        format!("{family}, k = {k}")
    }
}

/// Completed rows in grid order, and the first failing `n` with its error.
pub type CurveRows = (Vec<SweepRow>, Option<(u64, EvtError)>);

/// Rows of the entropy curve in grid order, up to the first failing point.
pub fn compute_curve(cfg: &RunConfig) -> Result<CurveRows, CliError> {
    cfg.validate()?;
    let limit = KthExtremeLimit::new(cfg.family.limit(), cfg.k).map_err(CliError::usage)?;
    let parent = cfg.family.parent();
    let norming = cfg.family.closed_form_norming();
    let results: Vec<evt_entropy::Result<SweepRow>> = cfg
        .n_grid
        .par_iter()
        .map(|&n| sweep_row(&parent, &norming, &limit, n, &cfg.spec))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for (r, &n) in results.into_iter().zip(&cfg.n_grid) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => return Ok((rows, Some((n, e)))),
        }
    }
    Ok((rows, None))
}

pub fn curve_csv(rows: &[SweepRow]) -> Result<Vec<u8>, CliError> {
    let header: Vec<String> = CURVE_HEADER.iter().map(|s| s.to_string()).collect();
    csv_bytes(
        &header,
        rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.entropy.to_string(),
                r.delta.to_string(),
                r.kl.to_string(),
                r.limit_entropy.to_string(),
                r.gap.to_string(),
            ]
        }),
    )
}

pub fn curve_plot(family: WorkedFamily, k: u64, rows: &[SweepRow]) -> Plot {
    let pts = |f: fn(&SweepRow) -> f64| rows.iter().map(|r| (r.n as f64, f(r))).collect();
    Plot {
        title: format!(
            "Entropy and Δ of the normalized extreme ({})",
            describe(family, k)
        ),
        x_label: "n".into(),
        y_label: "nats".into(),
        series: vec![
            Series::new("H(g_n)", pts(|r| r.entropy)).dashed(),
            Series::new("Δ(g_n)", pts(|r| r.delta)),
        ],
        rules: rows
            .first()
            .map(|r| vec![("limit H".to_string(), r.limit_entropy)])
            .unwrap_or_default(),
    }
}

#[derive(Debug, Clone)]
pub struct CurveOutcome {
    pub rows: Vec<SweepRow>,
    pub files: Vec<PathBuf>,
}

/// Writes the entropy curve. A failing grid point stops the output there;
/// the completed rows go to [`ENTROPY_CURVE_PARTIAL_CSV`] and the result is
/// a numerical failure.
pub fn cmd_entropy_curve(cfg: &RunConfig) -> Result<CurveOutcome, CliError> {
    let (rows, failure) = compute_curve(cfg)?;
    if let Some((n, e)) = failure {
        let path = cfg.out.join(ENTROPY_CURVE_PARTIAL_CSV);
        write_file(&path, &curve_csv(&rows)?)?;
        return Err(CliError::Numerical(format!(
            "n = {n}: {e}; {} completed rows in {}",
            rows.len(),
            path.display()
        )));
    }
    let mut files = Vec::new();
    if cfg.format.csv() {
        let path = cfg.out.join(ENTROPY_CURVE_CSV);
        write_file(&path, &curve_csv(&rows)?)?;
        files.push(path);
    }
    if cfg.format.svg() {
        let path = cfg.out.join(ENTROPY_CURVE_SVG);
        write_file(
            &path,
            curve_plot(cfg.family, cfg.k, &rows).render().as_bytes(),
        )?;
        files.push(path);
    }
    Ok(CurveOutcome { rows, files })
}

/// Abscissae of a density panel; open ends are chosen from the laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XRange {
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub points: usize,
}

impl Default for XRange {
    fn default() -> Self {
        XRange {
            min: None,
            max: None,
            points: 401,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityPanel {
    pub x: Vec<f64>,
    /// `(n, g_{k:n}(x))` per grid point.
    pub curves: Vec<(u64, Vec<f64>)>,
    pub limit: Vec<f64>,
    /// Quadrature total mass of each `g_{k:n}` over its whole support.
    pub masses: Vec<(u64, f64)>,
}

const LOWER_TAIL: f64 = 1e-3;
const UPPER_TAIL: f64 = 1e-2;

fn default_ends(
    laws: &[FiniteSampleLaw],
    limit: &KthExtremeLimit,
) -> evt_entropy::Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut widen = |(l, h): (f64, f64), ql: f64, qh: f64| {
        lo = lo.min(if l.is_finite() { l } else { ql });
        hi = hi.max(if h.is_finite() { h } else { qh });
    };
    for law in laws {
        widen(
            law.support(),
            law.quantile_lower(LOWER_TAIL)?,
            law.quantile_upper(UPPER_TAIL)?,
        );
    }
    widen(
        limit.support(),
        limit.quantile_lower(LOWER_TAIL)?,
        limit.quantile_upper(UPPER_TAIL)?,
    );
    Ok((lo, hi))
}

pub fn density_panel(cfg: &RunConfig, range: &XRange) -> Result<DensityPanel, CliError> {
    cfg.validate()?;
    if range.points < 2 {
        return Err(CliError::usage("need at least 2 points"));
    }
    let limit = KthExtremeLimit::new(cfg.family.limit(), cfg.k).map_err(CliError::usage)?;
    let laws: Vec<FiniteSampleLaw> = cfg
        .n_grid
        .iter()
        .map(|&n| {
            FiniteSampleLaw::new(
                cfg.family.parent(),
                cfg.family.closed_form_norming(),
                n,
                cfg.k,
            )
        })
        .collect::<evt_entropy::Result<_>>()
        .map_err(CliError::usage)?;
    let (lo, hi) = match (range.min, range.max) {
        (Some(a), Some(b)) => (a, b),
        (a, b) => {
            let (l, h) = default_ends(&laws, &limit).map_err(CliError::numerical)?;
            (a.unwrap_or(l), b.unwrap_or(h))
        }
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::Usage(format!("bad x range [{lo}, {hi}]")));
    }
    let m = range.points - 1;
    let x: Vec<f64> = (0..=m)
        .map(|i| lo + (hi - lo) * i as f64 / m as f64)
        .collect();
    let curves = laws
        .iter()
        .map(|law| (law.n(), x.iter().map(|&t| law.density(t)).collect()))
        .collect();
    let masses = laws
        .par_iter()
        .map(|law| total_mass(law, &cfg.spec).map(|m| (law.n(), m)))
        .collect::<evt_entropy::Result<_>>()
        .map_err(CliError::numerical)?;
    Ok(DensityPanel {
        limit: x.iter().map(|&t| limit.pdf(t)).collect(),
        x,
        curves,
        masses,
    })
}

pub fn panel_csv(panel: &DensityPanel) -> Result<Vec<u8>, CliError> {
    let mut header = vec!["x".to_string()];
    header.extend(panel.curves.iter().map(|(n, _)| format!("g_{n}")));
    header.push("limit".into());
    csv_bytes(
        &header,
        (0..panel.x.len()).map(|i| {
            let mut row = vec![panel.x[i].to_string()];
            row.extend(panel.curves.iter().map(|(_, c)| c[i].to_string()));
            row.push(panel.limit[i].to_string());
            row
        }),
    )
}

pub fn panel_plot(family: WorkedFamily, k: u64, panel: &DensityPanel) -> Plot {
    let line = |ys: &[f64]| panel.x.iter().copied().zip(ys.iter().copied()).collect();
    let mut series: Vec<Series> = panel
        .curves
        .iter()
        .map(|(n, c)| Series::new(format!("n = {n}"), line(c)))
        .collect();
    series.push(Series::new("limit", line(&panel.limit)).dashed());
    Plot {
        title: format!(
            "Density of the normalized extreme ({})",
            describe(family, k)
        ),
        x_label: "x".into(),
        y_label: "density".into(),
        series,
        rules: Vec::new(),
    }
}

#[derive(Debug, Clone)]
pub struct PanelOutcome {
    pub panel: DensityPanel,
    pub files: Vec<PathBuf>,
}

pub fn cmd_density_panel(cfg: &RunConfig, range: &XRange) -> Result<PanelOutcome, CliError> {
    let panel = density_panel(cfg, range)?;
    let mut files = Vec::new();
    if cfg.format.csv() {
        let path = cfg.out.join(DENSITY_PANEL_CSV);
        write_file(&path, &panel_csv(&panel)?)?;
        files.push(path);
    }
    if cfg.format.svg() {
        let path = cfg.out.join(DENSITY_PANEL_SVG);
        write_file(
            &path,
            panel_plot(cfg.family, cfg.k, &panel).render().as_bytes(),
        )?;
        files.push(path);
    }
    Ok(PanelOutcome { panel, files })
}

/// Parses a limit-law label, or a parent family whose limit is meant.
pub fn parse_law(label: &str, alpha: Option<f64>) -> Result<MaxStableLaw, CliError> {
    let need = |name: &str| alpha.ok_or_else(|| CliError::Usage(format!("{name} needs --alpha")));
    match label.trim().to_ascii_lowercase().as_str() {
        "gumbel" | "lambda" => Ok(MaxStableLaw::Gumbel),
        "frechet" | "fréchet" => MaxStableLaw::frechet(need("frechet")?).map_err(CliError::usage),
        "weibull" => MaxStableLaw::weibull(need("weibull")?).map_err(CliError::usage),
        other => WorkedFamily::parse(other, alpha)
            .map(|f| f.limit())
            .map_err(|_| CliError::Usage(format!("unknown law or family '{label}'"))),
    }
}

pub fn cmd_limit_entropy(label: &str, alpha: Option<f64>, k: u64) -> Result<f64, CliError> {
    let law = parse_law(label, alpha)?;
    let kth = KthExtremeLimit::new(law, k).map_err(CliError::usage)?;
    Ok(kth.entropy())
}

/// Verdict line followed by the ratio trace as `x,ratio` rows.
pub fn cmd_classify(family: WorkedFamily, loc: f64, scale: f64) -> Result<String, CliError> {
    let wrapped = LocationScale::new(family.parent(), loc, scale).map_err(CliError::usage)?;
    let verdict = try_classify(&wrapped).map_err(CliError::numerical)?;
    let mut out = format!("{verdict}\nx,ratio\n");
    for (x, r) in &verdict.ratio_trace {
        let _ = writeln!(out, "{x},{r}");
    }
    Ok(out)
}

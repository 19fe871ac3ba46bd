//! Shannon entropy, the cross term `Δ_g`, relative entropy and convergence sweeps.
//!
//! For the density `g_n` of a normalized extreme and a limit density `g`,
//!
//! * `H(g_n) = -∫ g_n ln g_n`
//! * `Δ_g(g_n) = -∫ g_n ln g`
//! * `D(g_n ‖ g) = ∫ g_n ln(g_n / g) = Δ_g(g_n) - H(g_n)`
//!
//! and for maxima `H(g_n) = -(I₁(n) + I₂(n))` with `I₁(n) = -(n-1)/n` and
//! `I₂(n) = ∫ g_n(x) ln(n a_n f(a_n x + b_n)) dx`.
//!
//! Every integral runs over a window clipped to the law's `tail_cut/2`
//! quantiles on each side, pre-split at interior quantiles so the adaptive
//! rule sees the bulk of the mass whatever the support's length.

use rayon::prelude::*;

use crate::distributions::Distribution;
use crate::finite_sample::FiniteSampleLaw;
use crate::max_stable::{KthExtremeLimit, MaxStableLaw};
use crate::norming::NormingSequence;
use crate::quadrature::{integrate_pieces, Estimate, QuadratureSpec};
use crate::{EvtError, Result};

/// `p ln p` is taken to vanish below this density.
const DENSITY_FLOOR_LN: f64 = -690.775_527_898_213_7; // ln 1e-300

/// A univariate law with a log density and accurate two-sided quantiles.
pub trait ContinuousLaw: Sync {
    fn ln_pdf(&self, x: f64) -> f64;
    /// Open interval outside which the density vanishes.
    fn support(&self) -> (f64, f64);
    /// `x` with `P(X <= x) = p`.
    fn quantile_lower(&self, p: f64) -> Result<f64>;
    /// `x` with `P(X > x) = q`.
    fn quantile_upper(&self, q: f64) -> Result<f64>;
}

impl ContinuousLaw for FiniteSampleLaw {
    fn ln_pdf(&self, x: f64) -> f64 {
        self.ln_density(x)
    }
    fn support(&self) -> (f64, f64) {
        FiniteSampleLaw::support(self)
    }
    fn quantile_lower(&self, p: f64) -> Result<f64> {
        FiniteSampleLaw::quantile_lower(self, p)
    }
    fn quantile_upper(&self, q: f64) -> Result<f64> {
        FiniteSampleLaw::quantile_upper(self, q)
    }
}

impl ContinuousLaw for KthExtremeLimit {
    fn ln_pdf(&self, x: f64) -> f64 {
        KthExtremeLimit::ln_pdf(self, x)
    }
    fn support(&self) -> (f64, f64) {
        KthExtremeLimit::support(self)
    }
    fn quantile_lower(&self, p: f64) -> Result<f64> {
        KthExtremeLimit::quantile_lower(self, p)
    }
    fn quantile_upper(&self, q: f64) -> Result<f64> {
        KthExtremeLimit::quantile_upper(self, q)
    }
}

impl ContinuousLaw for MaxStableLaw {
    fn ln_pdf(&self, x: f64) -> f64 {
        MaxStableLaw::ln_pdf(self, x)
    }
    fn support(&self) -> (f64, f64) {
        MaxStableLaw::support(self)
    }
    fn quantile_lower(&self, p: f64) -> Result<f64> {
        KthExtremeLimit::from(*self).quantile_lower(p)
    }
    fn quantile_upper(&self, q: f64) -> Result<f64> {
        KthExtremeLimit::from(*self).quantile_upper(q)
    }
}

const INTERIOR_LOWER: [f64; 5] = [1e-8, 1e-4, 0.05, 0.25, 0.5];
const INTERIOR_UPPER: [f64; 4] = [0.25, 0.05, 1e-4, 1e-8];

/// Break points of the truncated integration window of `law`.
pub fn integration_window<L: ContinuousLaw + ?Sized>(
    law: &L,
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    spec.validate()?;
    let (s_lo, s_hi) = law.support();
    let half = 0.5 * spec.tail_cut;
    let lo = law.quantile_lower(half)?.max(s_lo);
    let hi = law.quantile_upper(half)?.min(s_hi);
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(EvtError::domain(format!(
            "degenerate integration window [{lo}, {hi}]"
        )));
    }
    let mut breaks = vec![lo, hi];
    for &p in &INTERIOR_LOWER {
        breaks.push(law.quantile_lower(p)?);
    }
    for &q in &INTERIOR_UPPER {
        breaks.push(law.quantile_upper(q)?);
    }
    breaks.retain(|x| x.is_finite() && *x >= lo && *x <= hi);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    Ok(breaks)
}

fn weight(lp: f64) -> Option<f64> {
    if lp > DENSITY_FLOOR_LN {
        Some(lp.exp())
    } else {
        None
    }
}

/// `-∫ p ln p` for any [`ContinuousLaw`].
pub fn differential_entropy<L: ContinuousLaw + ?Sized>(
    law: &L,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let breaks = integration_window(law, spec)?;
    integrate_pieces(
        |x| {
            let lp = law.ln_pdf(x);
            weight(lp).map_or(0.0, |p| -p * lp)
        },
        &breaks,
        spec,
    )
}

/// `∫ p` over the truncated window; within `tail_cut` of one for a proper density.
pub fn total_mass<L: ContinuousLaw + ?Sized>(law: &L, spec: &QuadratureSpec) -> Result<f64> {
    let breaks = integration_window(law, spec)?;
    Ok(integrate_pieces(|x| weight(law.ln_pdf(x)).unwrap_or(0.0), &breaks, spec)?.value)
}

/// `H(g_{k:n})` by adaptive quadrature.
pub fn entropy_of(law: &FiniteSampleLaw, spec: &QuadratureSpec) -> Result<f64> {
    Ok(differential_entropy(law, spec)?.value)
}

/// `I₁(n) = -(n-1)/n`.
pub fn i1_exact(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(EvtError::domain("I1(n) needs n >= 1"));
    }
    Ok(-((n - 1) as f64) / n as f64)
}

/// `I₂(n) = ∫ g_n(x) ln(n a_n f(a_n x + b_n)) dx`, maxima only.
pub fn i2_of(law: &FiniteSampleLaw, spec: &QuadratureSpec) -> Result<f64> {
    if law.k() != 1 {
        return Err(EvtError::domain(format!(
            "the I1/I2 decomposition is for maxima, got k = {}",
            law.k()
        )));
    }
    let ln_scale = (law.n() as f64).ln() + law.constants().scale.ln();
    let parent = law.parent();
    let breaks = integration_window(law, spec)?;
    Ok(integrate_pieces(
        |x| match weight(law.ln_density(x)) {
            Some(p) => p * (ln_scale + parent.ln_pdf(law.to_parent(x))),
            None => 0.0,
        },
        &breaks,
        spec,
    )?
    .value)
}

fn check_support(law: &FiniteSampleLaw, limit: &KthExtremeLimit) -> Result<()> {
    let (a, b) = law.support();
    let (c, d) = limit.support();
    let slack = |v: f64| 1e-12 * (1.0 + v.abs());
    if a < c - slack(c) || b > d + slack(d) {
        return Err(EvtError::domain(format!(
            "support ({a}, {b}) of g_n is not contained in the limit support ({c}, {d}); \
             relative entropy is undefined"
        )));
    }
    Ok(())
}

fn support_violation(err: EvtError, law: &FiniteSampleLaw) -> EvtError {
    match err {
        EvtError::Domain(msg) if msg.contains("not finite") => EvtError::domain(format!(
            "limit density vanishes where g_n (n = {}) is positive: {msg}",
            law.n()
        )),
        other => other,
    }
}

/// `Δ_g(g_{k:n}) = -∫ g_{k:n} ln g` against the limit density `g = K_k'`.
pub fn delta_of(
    law: &FiniteSampleLaw,
    limit: &KthExtremeLimit,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_support(law, limit)?;
    let breaks = integration_window(law, spec)?;
    integrate_pieces(
        |x| match weight(law.ln_density(x)) {
            Some(p) => -p * limit.ln_pdf(x),
            None => 0.0,
        },
        &breaks,
        spec,
    )
    .map(|e| e.value)
    .map_err(|e| support_violation(e, law))
}

/// `D(g_{k:n} ‖ g)`.
///
/// Integrated in one pass as `∫ g_{k:n} (ln g_{k:n} - ln g)`, which equals
/// `Δ - H` but avoids subtracting two nearly equal quadratures. A result
/// below zero by no more than the quadrature tolerance is returned as zero.
pub fn kl_of(law: &FiniteSampleLaw, limit: &KthExtremeLimit, spec: &QuadratureSpec) -> Result<f64> {
    check_support(law, limit)?;
    let breaks = integration_window(law, spec)?;
    let est = integrate_pieces(
        |x| {
            let lg = law.ln_density(x);
            match weight(lg) {
                Some(p) => p * (lg - limit.ln_pdf(x)),
                None => 0.0,
            }
        },
        &breaks,
        spec,
    )
    .map_err(|e| support_violation(e, law))?;
    let tol = 2.0 * spec.abs_tol.max(est.abs_error);
    if est.value < 0.0 && est.value >= -tol {
        Ok(0.0)
    } else {
        Ok(est.value)
    }
}

/// One grid point of a [`ConvergenceReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n: u64,
    pub entropy: f64,
    pub delta: f64,
    pub kl: f64,
    pub limit_entropy: f64,
    pub gap: f64,
}

/// Evaluates entropy, `Δ` and relative entropy of `g_{k:n}` at a single `n`.
pub fn sweep_row(
    parent: &Distribution,
    norming: &NormingSequence,
    limit: &KthExtremeLimit,
    n: u64,
    spec: &QuadratureSpec,
) -> Result<SweepRow> {
    let law = FiniteSampleLaw::new(parent.clone(), norming.clone(), n, limit.k())?;
    let entropy = entropy_of(&law, spec)?;
    let delta = delta_of(&law, limit, spec)?;
    let kl = kl_of(&law, limit, spec)?;
    let limit_entropy = limit.entropy();
    Ok(SweepRow {
        n,
        entropy,
        delta,
        kl,
        limit_entropy,
        gap: (entropy - limit_entropy).abs(),
    })
}

/// Entropy, `Δ` and relative entropy of `g_{k:n}` over a grid of `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub k: u64,
    pub grid: Vec<u64>,
    pub entropy_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub kl_values: Vec<f64>,
    /// Closed-form `H(K_k')`.
    pub limit_entropy: f64,
    pub gaps: Vec<f64>,
    /// `H` increases along the grid, up to a slack of `2·abs_tol` per step.
    pub monotone_increasing: bool,
}

impl ConvergenceReport {
    pub fn rows(&self) -> impl Iterator<Item = SweepRow> + '_ {
        (0..self.grid.len()).map(move |i| SweepRow {
            n: self.grid[i],
            entropy: self.entropy_values[i],
            delta: self.delta_values[i],
            kl: self.kl_values[i],
            limit_entropy: self.limit_entropy,
            gap: self.gaps[i],
        })
    }

    pub fn gaps_nonincreasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] <= w[0])
    }
}

/// `true` when each step of `values` rises by more than `-slack`.
pub fn increasing_with_slack(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] - w[0] > -slack)
}

/// Sweeps `n_grid` for the k-th extreme against `K_k` of `limit`.
///
/// Grid points are evaluated in parallel; the report does not depend on the
/// evaluation order.
pub fn convergence_sweep(
    parent: &Distribution,
    norming: &NormingSequence,
    limit: MaxStableLaw,
    n_grid: &[u64],
    k: u64,
    spec: &QuadratureSpec,
) -> Result<ConvergenceReport> {
    if n_grid.is_empty() {
        return Err(EvtError::domain("n grid is empty"));
    }
    if n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EvtError::domain("n grid must be strictly increasing"));
    }
    if k == 0 || k > n_grid[0] {
        return Err(EvtError::domain(format!(
            "need 1 <= k <= min(n grid), got k = {k}, min = {}",
            n_grid[0]
        )));
    }
    let kth = KthExtremeLimit::new(limit, k)?;
    let rows: Vec<SweepRow> = n_grid
        .par_iter()
        .map(|&n| sweep_row(parent, norming, &kth, n, spec))
        .collect::<Result<_>>()?;
    let entropy_values: Vec<f64> = rows.iter().map(|r| r.entropy).collect();
    Ok(ConvergenceReport {
        k,
        grid: n_grid.to_vec(),
        monotone_increasing: increasing_with_slack(&entropy_values, 2.0 * spec.abs_tol),
        delta_values: rows.iter().map(|r| r.delta).collect(),
        kl_values: rows.iter().map(|r| r.kl).collect(),
        limit_entropy: kth.entropy(),
        gaps: rows.iter().map(|r| r.gap).collect(),
        entropy_values,
    })
}

//! Max-domain-of-attraction diagnostics from the von Mises ratios.
//!
//! * Fréchet: `x f(x) / F̄(x) -> α` as `x -> ∞`.
//! * Weibull: `(r - x) f(x) / F̄(x) -> α` as `x -> r(F) < ∞`.
//! * Gumbel:  `f(x) u(x) / F̄(x) -> 1`, `u` the mean excess function.
//!
//! The ratios are probed at upper quantiles `x = F̄^{-1}(10^{-j})`, `j = 1..8`.
//! The ladder stops at `10^{-8}` because survival evaluation in double
//! precision limits how far into the tail the ratios stay faithful.

use std::fmt;

use crate::distributions::UnivariateDistribution;
use crate::max_stable::MaxStableLaw;
use crate::norming::{auxiliary_u, NormingSequence};
use crate::{EvtError, Result};

/// Tail probabilities `10^{-j}`, `j = 1..8`, of the default probe ladder.
pub const DEFAULT_TAIL_LADDER: [f64; 8] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];

/// Relative spread allowed between the two extrapolated limits.
pub const STABILITY_SPREAD: f64 = 0.02;

/// A Gumbel verdict needs the extrapolated ratio this close to one.
pub const GUMBEL_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainFamily {
    Frechet,
    Weibull,
    Gumbel,
    Inconclusive,
}

impl fmt::Display for DomainFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainFamily::Frechet => "Frechet",
            DomainFamily::Weibull => "Weibull",
            DomainFamily::Gumbel => "Gumbel",
            DomainFamily::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainVerdict {
    pub family: DomainFamily,
    /// Present exactly for Fréchet and Weibull verdicts.
    pub alpha_estimate: Option<f64>,
    /// `(probe point x, ratio)` of the ratio the verdict rests on.
    pub ratio_trace: Vec<(f64, f64)>,
    pub confidence_note: String,
}

impl fmt::Display for DomainVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alpha_estimate {
            Some(a) => write!(f, "{} alpha≈{a:.2}", self.family)?,
            None => write!(f, "{}", self.family)?,
        }
        write!(f, " ({})", self.confidence_note)
    }
}

fn probe_points<D>(dist: &D, tails: &[f64]) -> Result<Vec<f64>>
where
    D: UnivariateDistribution + ?Sized,
{
    tails.iter().map(|&q| dist.inverse_sf(q)).collect()
}

fn tails_of(probes: &[f64]) -> Result<Vec<f64>> {
    probes
        .iter()
        .map(|&p| {
            if p > 0.0 && p < 1.0 {
                Ok(1.0 - p)
            } else {
                Err(EvtError::domain(format!("probe {p} outside (0, 1)")))
            }
        })
        .collect()
}

/// `f(x) / F̄(x)` in log space.
fn hazard<D: UnivariateDistribution + ?Sized>(dist: &D, x: f64) -> f64 {
    (dist.ln_pdf(x) - dist.ln_sf(x)).exp()
}

/// `x f(x) / F̄(x)` at the given upper tail probabilities.
pub fn frechet_ratios_at<D>(dist: &D, tails: &[f64]) -> Result<Vec<(f64, f64)>>
where
    D: UnivariateDistribution + ?Sized,
{
    if dist.right_end().is_finite() {
        return Err(EvtError::domain(format!(
            "Fréchet ratio needs r(F) = +inf, {} has r(F) = {}",
            dist.name(),
            dist.right_end()
        )));
    }
    Ok(probe_points(dist, tails)?
        .into_iter()
        .map(|x| (x, x * hazard(dist, x)))
        .collect())
}

/// `(r - x) f(x) / F̄(x)` at the given upper tail probabilities.
pub fn weibull_ratios_at<D>(dist: &D, tails: &[f64]) -> Result<Vec<(f64, f64)>>
where
    D: UnivariateDistribution + ?Sized,
{
    let r = dist.right_end();
    if !r.is_finite() {
        return Err(EvtError::domain(format!(
            "Weibull ratio needs a finite r(F), {} has r(F) = +inf",
            dist.name()
        )));
    }
    Ok(probe_points(dist, tails)?
        .into_iter()
        .map(|x| (x, (r - x) * hazard(dist, x)))
        .collect())
}

/// `f(x) u(x) / F̄(x)` at the given upper tail probabilities.
pub fn gumbel_ratios_at<D>(dist: &D, tails: &[f64]) -> Result<Vec<(f64, f64)>>
where
    D: UnivariateDistribution + ?Sized,
{
    probe_points(dist, tails)?
        .into_iter()
        .map(|x| Ok((x, hazard(dist, x) * auxiliary_u(dist, x)?)))
        .collect()
}

/// `x f(x) / (1 - F(x))` at `x = F^{-1}(p)` for each probe `p`.
pub fn von_mises_frechet<D>(dist: &D, probes: &[f64]) -> Result<Vec<f64>>
where
    D: UnivariateDistribution + ?Sized,
{
    Ok(frechet_ratios_at(dist, &tails_of(probes)?)?
        .into_iter()
        .map(|p| p.1)
        .collect())
}

/// `(r(F) - x) f(x) / (1 - F(x))` at `x = F^{-1}(p)` for each probe `p`.
pub fn von_mises_weibull<D>(dist: &D, probes: &[f64]) -> Result<Vec<f64>>
where
    D: UnivariateDistribution + ?Sized,
{
    Ok(weibull_ratios_at(dist, &tails_of(probes)?)?
        .into_iter()
        .map(|p| p.1)
        .collect())
}

/// `f(x) ∫_x^{r(F)} (1 - F) / (1 - F(x))²` at `x = F^{-1}(p)` for each probe `p`.
pub fn von_mises_gumbel<D>(dist: &D, probes: &[f64]) -> Result<Vec<f64>>
where
    D: UnivariateDistribution + ?Sized,
{
    Ok(gumbel_ratios_at(dist, &tails_of(probes)?)?
        .into_iter()
        .map(|p| p.1)
        .collect())
}

/// Limit estimate of a probe sequence, when it has settled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub limit: f64,
    /// Relative spread of the two extrapolants.
    pub spread: f64,
    /// Largest ratio of consecutive differences over the last four probes.
    pub contraction: f64,
}

/// Aitken Δ² extrapolation on the last four values.
///
/// Two extrapolants are formed from the last two triples. The sequence counts
/// as settled when its differences contract (or vanish) and the extrapolants
/// agree to [`STABILITY_SPREAD`]. Returns `None` otherwise.
pub fn extrapolate(values: &[f64]) -> Option<Extrapolation> {
    if values.len() < 4 || values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let v = &values[values.len() - 4..];
    let d = [v[1] - v[0], v[2] - v[1], v[3] - v[2]];
    let scale = v[3].abs().max(f64::MIN_POSITIVE);
    // Ratios carry relative rounding noise of order ε·x/(r - x) near a finite
    // endpoint; steps below 1e-6 of the value count as no change at all.
    let flat = |x: f64| x.abs() <= 1e-6 * scale;
    if d.iter().all(|&x| flat(x)) {
        return Some(Extrapolation {
            limit: v[3],
            spread: 0.0,
            contraction: 0.0,
        });
    }
    let mut contraction = 0.0_f64;
    for w in d.windows(2) {
        if flat(w[1]) {
            continue;
        }
        if flat(w[0]) || w[0].signum() != w[1].signum() {
            return None;
        }
        contraction = contraction.max(w[1] / w[0]);
    }
    if contraction > 0.95 {
        return None;
    }
    let aitken = |a: f64, b: f64, c: f64| {
        let den = (c - b) - (b - a);
        if flat(c - b) || den == 0.0 {
            c
        } else {
            c - (c - b) * (c - b) / den
        }
    };
    let e1 = aitken(v[0], v[1], v[2]);
    let e2 = aitken(v[1], v[2], v[3]);
    let spread = (e1 - e2).abs() / e1.abs().max(e2.abs()).max(f64::MIN_POSITIVE);
    if spread > STABILITY_SPREAD {
        return None;
    }
    Some(Extrapolation {
        limit: e2,
        spread,
        contraction,
    })
}

fn settled(trace: &[(f64, f64)]) -> Option<Extrapolation> {
    let values: Vec<f64> = trace.iter().map(|p| p.1).collect();
    extrapolate(&values)
}

fn note(kind: &str, e: &Extrapolation) -> String {
    format!(
        "{kind} ratio settled: limit {:.4}, extrapolants agree to {:.2}%, contraction {:.2}",
        e.limit,
        100.0 * e.spread,
        e.contraction
    )
}

/// Classifies `dist` by the von Mises ratios on [`DEFAULT_TAIL_LADDER`].
///
/// An infinite right endpoint is tried as Fréchet first, a finite one as
/// Weibull; Gumbel is tried next in both cases. Evaluation failures surface
/// as errors, an unsettled ratio as [`DomainFamily::Inconclusive`].
pub fn try_classify<D>(dist: &D) -> Result<DomainVerdict>
where
    D: UnivariateDistribution + ?Sized,
{
    let ladder = &DEFAULT_TAIL_LADDER;
    let mut notes = Vec::new();
    let first = if dist.right_end().is_finite() {
        let trace = weibull_ratios_at(dist, ladder)?;
        ("Weibull", DomainFamily::Weibull, trace)
    } else {
        let trace = frechet_ratios_at(dist, ladder)?;
        ("Fréchet", DomainFamily::Frechet, trace)
    };
    let (kind, family, trace) = first;
    match settled(&trace) {
        Some(e) if e.limit > 0.0 && e.limit.is_finite() => {
            return Ok(DomainVerdict {
                family,
                alpha_estimate: Some(e.limit),
                ratio_trace: trace,
                confidence_note: note(kind, &e),
            });
        }
        _ => notes.push(format!("{kind} ratio did not settle")),
    }

    let gumbel = match gumbel_ratios_at(dist, ladder) {
        Ok(t) => t,
        Err(EvtError::Domain(msg)) => {
            notes.push(format!("Gumbel ratio unavailable: {msg}"));
            return Ok(DomainVerdict {
                family: DomainFamily::Inconclusive,
                alpha_estimate: None,
                ratio_trace: trace,
                confidence_note: notes.join("; "),
            });
        }
        Err(e) => return Err(e),
    };
    match settled(&gumbel) {
        Some(e) if (e.limit - 1.0).abs() <= GUMBEL_TOLERANCE => Ok(DomainVerdict {
            family: DomainFamily::Gumbel,
            alpha_estimate: None,
            ratio_trace: gumbel,
            confidence_note: note("Gumbel", &e),
        }),
        Some(e) => {
            notes.push(format!("Gumbel ratio settled at {:.4}, not 1", e.limit));
            Ok(DomainVerdict {
                family: DomainFamily::Inconclusive,
                alpha_estimate: None,
                ratio_trace: gumbel,
                confidence_note: notes.join("; "),
            })
        }
        None => {
            notes.push("Gumbel ratio did not settle".into());
            Ok(DomainVerdict {
                family: DomainFamily::Inconclusive,
                alpha_estimate: None,
                ratio_trace: gumbel,
                confidence_note: notes.join("; "),
            })
        }
    }
}

/// [`try_classify`], with evaluation failures reported as inconclusive.
pub fn classify<D>(dist: &D) -> DomainVerdict
where
    D: UnivariateDistribution + ?Sized,
{
    try_classify(dist).unwrap_or_else(|e| DomainVerdict {
        family: DomainFamily::Inconclusive,
        alpha_estimate: None,
        ratio_trace: Vec::new(),
        confidence_note: format!("evaluation failed: {e}"),
    })
}

/// `(x, n F̄(a_n x + b_n), -ln G(x))` on a grid of `x`.
///
/// The second column tends to the third when `(a_n, b_n)` norm `F` towards `G`.
pub fn tail_equivalence<D>(
    dist: &D,
    norming: &NormingSequence,
    n: u64,
    xs: &[f64],
) -> Result<Vec<(f64, f64, f64)>>
where
    D: UnivariateDistribution + ?Sized,
{
    let c = norming.constants(n)?;
    let target: MaxStableLaw = norming.target();
    Ok(xs
        .iter()
        .map(|&x| {
            let y = c.scale * x + c.center;
            (x, n as f64 * dist.sf(y), target.neg_ln_cdf(x))
        })
        .collect())
}

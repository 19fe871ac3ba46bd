//! Norming sequences `(a_n, b_n)` with `P(M_n <= a_n x + b_n) -> G(x)`.
//!
//! Two recipes are provided. The closed forms are those of the worked
//! families. The quantile recipe works for any parent with a survival
//! inverse:
//!
//! | target  | `a_n`                   | `b_n`               |
//! |---------|-------------------------|---------------------|
//! | Fréchet | `F^{-1}(1 - 1/n)`       | `0`                 |
//! | Weibull | `r(F) - F^{-1}(1 - 1/n)`| `r(F)`              |
//! | Gumbel  | `u(b_n)`                | `F^{-1}(1 - 1/n)`   |
//!
//! where `u(t) = ∫_t^{r(F)} (1 - F(s)) ds / (1 - F(t))` is the auxiliary
//! (mean excess) function.
//!
//! The other usual Gumbel scale is the reciprocal hazard
//! `a_n = (1 - F(b_n)) / f(b_n) = 1 / (n f(b_n))`. Under a von Mises condition
//! it is asymptotically equivalent to `u(b_n)` but differs at finite `n`; pass
//! it through [`NormingSequence::custom`] when wanted:
//!
//! ```
//! use evt_entropy::distributions::UnivariateDistribution;
//! use evt_entropy::norming::{NormingConstants, NormingSequence};
//! use evt_entropy::prelude::*;
//!
//! let parent = make_std_normal();
//! let p = parent.clone();
//! let hazard = NormingSequence::custom(MaxStableLaw::Gumbel, move |n| {
//!     let center = p.inverse_sf(1.0 / n as f64)?;
//!     Ok(NormingConstants { scale: 1.0 / (n as f64 * p.pdf(center)), center })
//! });
//! let mean_excess = quantile_norming(parent, MaxStableLaw::Gumbel)?;
//! let (a, b) = (hazard.scale(1_000)?, mean_excess.scale(1_000)?);
//! assert!(a != b && (a / b - 1.0).abs() < 0.1);
//! # Ok::<(), evt_entropy::EvtError>(())
//! ```

use std::fmt;
use std::sync::Arc;

use crate::distributions::{Distribution, UnivariateDistribution};
use crate::families::WorkedFamily;
use crate::max_stable::MaxStableLaw;
use crate::quadrature::{integrate_pieces, QuadratureSpec};
use crate::{EvtError, Result};

/// One term `(a_n, b_n)` of a norming sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingConstants {
    /// `a_n > 0`.
    pub scale: f64,
    /// `b_n`.
    pub center: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormingProvenance {
    ClosedForm,
    QuantileRecipe,
    Custom,
}

type CustomRule = Arc<dyn Fn(u64) -> Result<NormingConstants> + Send + Sync>;

#[derive(Clone)]
enum Rule {
    Pareto { alpha: f64 },
    Uniform,
    Exponential,
    Normal,
    Frechet(Distribution),
    Weibull(Distribution),
    Gumbel(Distribution),
    Custom(CustomRule),
}

/// `n ↦ (a_n, b_n)` together with the law it norms towards.
#[derive(Clone)]
pub struct NormingSequence {
    rule: Rule,
    target: MaxStableLaw,
    provenance: NormingProvenance,
}

impl fmt::Debug for NormingSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match &self.rule {
            Rule::Pareto { alpha } => format!("pareto(alpha={alpha})"),
            Rule::Uniform => "uniform".into(),
            Rule::Exponential => "exponential".into(),
            Rule::Normal => "normal".into(),
            Rule::Frechet(d) | Rule::Weibull(d) | Rule::Gumbel(d) => d.name(),
            Rule::Custom(_) => "custom".into(),
        };
        f.debug_struct("NormingSequence")
            .field("rule", &rule)
            .field("target", &self.target)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl NormingSequence {
    /// A user-supplied rule. `scale` must be positive for every `n` it is asked about.
    pub fn custom<R>(target: MaxStableLaw, rule: R) -> Self
    where
        R: Fn(u64) -> Result<NormingConstants> + Send + Sync + 'static,
    {
        NormingSequence {
            rule: Rule::Custom(Arc::new(rule)),
            target,
            provenance: NormingProvenance::Custom,
        }
    }

    /// The constant sequence `(a, b)`, handy for location-scale experiments.
    pub fn fixed(target: MaxStableLaw, scale: f64, center: f64) -> Result<Self> {
        check_constants(NormingConstants { scale, center }, 1)?;
        Ok(Self::custom(target, move |_| {
            Ok(NormingConstants { scale, center })
        }))
    }

    pub fn target(&self) -> MaxStableLaw {
        self.target
    }

    pub fn provenance(&self) -> NormingProvenance {
        self.provenance
    }

    pub fn constants(&self, n: u64) -> Result<NormingConstants> {
        if n == 0 {
            return Err(EvtError::domain("norming constants need n >= 1"));
        }
        let nf = n as f64;
        let c = match &self.rule {
            Rule::Pareto { alpha } => NormingConstants {
                scale: nf.powf(1.0 / alpha),
                center: 0.0,
            },
            Rule::Uniform => NormingConstants {
                scale: 1.0 / nf,
                center: 1.0,
            },
            Rule::Exponential => NormingConstants {
                scale: 1.0,
                center: nf.ln(),
            },
            Rule::Normal => {
                if n == 1 {
                    return Err(EvtError::domain(
                        "normal closed-form norming needs n >= 2 (ln ln n)",
                    ));
                }
                let s = (2.0 * nf.ln()).sqrt();
                let four_pi = 4.0 * std::f64::consts::PI;
                NormingConstants {
                    scale: 1.0 / s,
                    center: s - (nf.ln().ln() + four_pi.ln()) / (2.0 * s),
                }
            }
            Rule::Frechet(parent) => NormingConstants {
                scale: parent.inverse_sf(1.0 / nf)?,
                center: 0.0,
            },
            Rule::Weibull(parent) => {
                let r = parent.right_end();
                NormingConstants {
                    scale: r - parent.inverse_sf(1.0 / nf)?,
                    center: r,
                }
            }
            Rule::Gumbel(parent) => {
                let b = parent.inverse_sf(1.0 / nf)?;
                NormingConstants {
                    scale: auxiliary_u(parent.as_ref(), b)?,
                    center: b,
                }
            }
            Rule::Custom(rule) => rule(n)?,
        };
        check_constants(c, n)
    }

    pub fn scale(&self, n: u64) -> Result<f64> {
        Ok(self.constants(n)?.scale)
    }

    pub fn center(&self, n: u64) -> Result<f64> {
        Ok(self.constants(n)?.center)
    }
}

fn check_constants(c: NormingConstants, n: u64) -> Result<NormingConstants> {
    if c.scale > 0.0 && c.scale.is_finite() && c.center.is_finite() {
        Ok(c)
    } else {
        Err(EvtError::Inconsistent(format!(
            "norming constants at n = {n} are not usable: a = {}, b = {}",
            c.scale, c.center
        )))
    }
}

/// The exact sequences of the worked families:
/// Pareto `(n^{1/α}, 0)`, uniform `(1/n, 1)`, exponential `(1, ln n)`, normal
/// `(1/√(2 ln n), √(2 ln n) - (ln ln n + ln 4π)/(2√(2 ln n)))`.
pub fn closed_form_norming(family: &WorkedFamily) -> NormingSequence {
    let rule = match *family {
        WorkedFamily::Pareto { alpha } => Rule::Pareto { alpha },
        WorkedFamily::Uniform01 => Rule::Uniform,
        WorkedFamily::Exponential => Rule::Exponential,
        WorkedFamily::StdNormal => Rule::Normal,
    };
    NormingSequence {
        rule,
        target: family.limit(),
        provenance: NormingProvenance::ClosedForm,
    }
}

/// Quantile-based norming towards `target` (see the module table).
///
/// Fails when a Weibull target is requested for a parent with an infinite
/// right endpoint, or a Fréchet target for one with a finite endpoint.
pub fn quantile_norming(parent: Distribution, target: MaxStableLaw) -> Result<NormingSequence> {
    let r = parent.right_end();
    let rule = match target {
        MaxStableLaw::Frechet { .. } => {
            if r.is_finite() {
                return Err(EvtError::Inconsistent(format!(
                    "Fréchet target needs an infinite right endpoint, {} has r(F) = {r}",
                    parent.name()
                )));
            }
            Rule::Frechet(parent)
        }
        MaxStableLaw::Weibull { .. } => {
            if !r.is_finite() {
                return Err(EvtError::Inconsistent(format!(
                    "Weibull target needs a finite right endpoint, {} has r(F) = +inf",
                    parent.name()
                )));
            }
            Rule::Weibull(parent)
        }
        MaxStableLaw::Gumbel => Rule::Gumbel(parent),
    };
    Ok(NormingSequence {
        rule,
        target,
        provenance: NormingProvenance::QuantileRecipe,
    })
}

/// The auxiliary function `u(t) = ∫_t^{r(F)} (1 - F(s)) ds / (1 - F(t))`.
///
/// Integrated as `∫_0^{r-t} exp(ln F̄(t+s) - ln F̄(t)) ds`. An infinite upper
/// limit is mapped onto a finite interval on the scale of the reciprocal
/// hazard `F̄(t)/f(t)`, so no truncation point is needed.
pub fn auxiliary_u<D>(parent: &D, t: f64) -> Result<f64>
where
    D: UnivariateDistribution + ?Sized,
{
    let ln_sf_t = parent.ln_sf(t);
    if !(ln_sf_t > f64::NEG_INFINITY) {
        return Err(EvtError::domain(format!(
            "u(t) needs 1 - F(t) > 0, got t = {t} at or beyond r(F) = {}",
            parent.right_end()
        )));
    }
    let width = parent.right_end() - t;
    let hazard_scale = (ln_sf_t - parent.ln_pdf(t)).exp();
    let c = if hazard_scale.is_finite() && hazard_scale > 0.0 {
        hazard_scale.min(width)
    } else {
        1.0_f64.min(width)
    };
    if width.is_infinite() {
        // s F̄(t+s)/F̄(t) must vanish for the integral to converge.
        let far = c * 1e9;
        if far * (parent.ln_sf(t + far) - ln_sf_t).exp() > 0.5 {
            return Err(EvtError::domain(format!(
                "mean excess integral diverges for {} (tail too heavy)",
                parent.name()
            )));
        }
    }
    let integrand = |s: f64| (parent.ln_sf(t + s) - ln_sf_t).exp();
    let spec = QuadratureSpec {
        abs_tol: 1e-300,
        rel_tol: 1e-12,
        ..QuadratureSpec::default()
    };
    let breaks: Vec<f64> = if width.is_infinite() {
        vec![0.0, c, f64::INFINITY]
    } else if c < width {
        vec![0.0, c, width]
    } else {
        vec![0.0, width]
    };
    match integrate_pieces(integrand, &breaks, &spec) {
        Ok(est) => Ok(est.value),
        Err(EvtError::Quadrature { .. }) => Err(EvtError::domain(format!(
            "mean excess integral for {} at t = {t} did not converge",
            parent.name()
        ))),
        Err(e) => Err(e),
    }
}

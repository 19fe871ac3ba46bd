//! The four parent families with known norming constants and limits.

use std::fmt;

use crate::distributions::{
    make_exponential, make_pareto, make_std_normal, make_uniform01, Distribution,
};
use crate::max_stable::MaxStableLaw;
use crate::norming::{closed_form_norming, NormingSequence};
use crate::{EvtError, Result};

/// A worked example: a parent family together with its limit law and
/// closed-form norming sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WorkedFamily {
    /// `F(x) = 1 - x^{-α}` on `x > 1`; Fréchet domain.
    Pareto { alpha: f64 },
    /// Uniform on `(0, 1)`; Weibull domain with `α = 1`.
    Uniform01,
    /// Standard exponential; Gumbel domain.
    Exponential,
    /// Standard normal; Gumbel domain.
    StdNormal,
}

impl WorkedFamily {
    pub fn pareto(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(WorkedFamily::Pareto { alpha })
        } else {
            Err(EvtError::domain(format!(
                "Pareto shape must be > 0, got {alpha}"
            )))
        }
    }

    /// Parses a family label. `alpha` is required for `pareto` and ignored otherwise.
    ///
    /// Accepted labels: `pareto`, `uniform`/`uniform01`, `exponential`/`exp`,
    /// `normal`/`std_normal`/`gaussian`.
    pub fn parse(label: &str, alpha: Option<f64>) -> Result<Self> {
        match label.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "pareto" => match alpha {
                Some(a) => Self::pareto(a),
                None => Err(EvtError::domain("pareto needs a shape parameter alpha")),
            },
            "uniform" | "uniform01" => Ok(WorkedFamily::Uniform01),
            "exponential" | "exp" => Ok(WorkedFamily::Exponential),
            "normal" | "std_normal" | "gaussian" => Ok(WorkedFamily::StdNormal),
            other => Err(EvtError::domain(format!("unknown family '{other}'"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            WorkedFamily::Pareto { .. } => "pareto",
            WorkedFamily::Uniform01 => "uniform",
            WorkedFamily::Exponential => "exponential",
            WorkedFamily::StdNormal => "normal",
        }
    }

    pub fn parent(&self) -> Distribution {
        match *self {
            WorkedFamily::Pareto { alpha } => make_pareto(alpha).expect("alpha validated"),
            WorkedFamily::Uniform01 => make_uniform01(),
            WorkedFamily::Exponential => make_exponential(),
            WorkedFamily::StdNormal => make_std_normal(),
        }
    }

    /// The max-stable law attracting this family's maxima.
    pub fn limit(&self) -> MaxStableLaw {
        match *self {
            WorkedFamily::Pareto { alpha } => MaxStableLaw::Frechet { alpha },
            WorkedFamily::Uniform01 => MaxStableLaw::Weibull { alpha: 1.0 },
            WorkedFamily::Exponential | WorkedFamily::StdNormal => MaxStableLaw::Gumbel,
        }
    }

    pub fn closed_form_norming(&self) -> NormingSequence {
        closed_form_norming(self)
    }

    /// Exact `H(g_n)` of the normalized maximum, where one is known.
    ///
    /// Uniform `(n-1)/n`; exponential `(n-1)/n + H_n - ln n`; Pareto
    /// `(n-1)/n - ln α + ((α+1)/α)(H_n - ln n)`. `None` for the normal.
    pub fn exact_maximum_entropy(&self, n: u64) -> Option<f64> {
        if n == 0 {
            return None;
        }
        let base = (n - 1) as f64 / n as f64;
        let excess = crate::special::harmonic_unchecked(n) - (n as f64).ln();
        match *self {
            WorkedFamily::Uniform01 => Some(base),
            WorkedFamily::Exponential => Some(base + excess),
            WorkedFamily::Pareto { alpha } => {
                Some(base - alpha.ln() + (alpha + 1.0) / alpha * excess)
            }
            WorkedFamily::StdNormal => None,
        }
    }

    /// Exact relative entropy `D(g_n ‖ g) = 1/(n(n+1))`, where known.
    pub fn exact_maximum_kl(&self, n: u64) -> Option<f64> {
        match self {
            WorkedFamily::StdNormal => None,
            _ if n == 0 => None,
            _ => {
                let n = n as f64;
                Some(1.0 / (n * (n + 1.0)))
            }
        }
    }
}

impl fmt::Display for WorkedFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkedFamily::Pareto { alpha } => write!(f, "pareto(alpha={alpha})"),
            other => f.write_str(other.label()),
        }
    }
}

//! Parent distributions `F` with density `f`.
//!
//! A parent is anything implementing [`UnivariateDistribution`]: a cdf, a pdf,
//! the support endpoints `l(F)` and `r(F)`, and (optionally overridden) tail
//! evaluators and inverses. Downstream code only ever talks to this trait, so
//! user-defined parents plug in through [`CustomDistribution`].
//!
//! Survival functions are first-class: `n·(1 - F(a_n x + b_n))` with `n` in the
//! millions is hopeless when `1 - F` is formed by subtraction, so every
//! built-in evaluates its upper tail directly.

use std::fmt;
use std::sync::Arc;

use crate::roots::{bracket_increasing, solve_increasing};
use crate::{EvtError, Result};

/// A continuous univariate law on `(left_end, right_end)`.
pub trait UnivariateDistribution: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    /// `l(F) = inf{x : F(x) > 0}`; may be `-∞`.
    fn left_end(&self) -> f64;

    /// `r(F) = sup{x : F(x) < 1}`; may be `+∞`.
    fn right_end(&self) -> f64;

    fn cdf(&self, x: f64) -> f64;

    fn pdf(&self, x: f64) -> f64;

    /// `1 - F(x)`. Override when the tail can be evaluated without cancellation.
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    fn ln_pdf(&self, x: f64) -> f64 {
        self.pdf(x).ln()
    }

    fn ln_cdf(&self, x: f64) -> f64 {
        let c = self.cdf(x);
        if c <= 0.5 {
            c.ln()
        } else {
            (-self.sf(x)).ln_1p()
        }
    }

    fn ln_sf(&self, x: f64) -> f64 {
        let s = self.sf(x);
        if s <= 0.5 {
            s.ln()
        } else {
            (-self.cdf(x)).ln_1p()
        }
    }

    /// `F^{-1}(p)`. The default solves `ln F(x) = ln p` by safeguarded Newton.
    fn quantile(&self, p: f64) -> Result<f64> {
        generic_quantile(self, p)
    }

    /// The `x` with `1 - F(x) = q`, accurate for tiny `q`.
    fn inverse_sf(&self, q: f64) -> Result<f64> {
        generic_inverse_sf(self, q, None)
    }
}

/// Shared handle to a parent distribution.
pub type Distribution = Arc<dyn UnivariateDistribution>;

fn start_point(left: f64, right: f64) -> f64 {
    match (left.is_finite(), right.is_finite()) {
        (true, true) => 0.5 * (left + right),
        (true, false) => left + 1.0,
        (false, true) => right - 1.0,
        (false, false) => 0.0,
    }
}

fn endpoint(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(EvtError::domain(format!(
            "{what} is an infinite endpoint of the support"
        )))
    }
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(EvtError::domain(format!("probability {p} outside [0, 1]")))
    }
}

pub(crate) fn generic_quantile<D>(dist: &D, p: f64) -> Result<f64>
where
    D: UnivariateDistribution + ?Sized,
{
    check_probability(p)?;
    if p == 0.0 {
        return endpoint(dist.left_end(), "quantile(0)");
    }
    if p == 1.0 {
        return endpoint(dist.right_end(), "quantile(1)");
    }
    if p > 0.5 {
        return dist.inverse_sf(1.0 - p);
    }
    let target = p.ln();
    let g = |x: f64| dist.ln_cdf(x) - target;
    let (lo, hi) = bracket_increasing(
        g,
        dist.left_end(),
        dist.right_end(),
        start_point(dist.left_end(), dist.right_end()),
    )?;
    solve_increasing(
        |x| {
            let lc = dist.ln_cdf(x);
            (lc - target, (dist.ln_pdf(x) - lc).exp())
        },
        lo,
        hi,
        None,
    )
}

pub(crate) fn generic_inverse_sf<D>(dist: &D, q: f64, guess: Option<f64>) -> Result<f64>
where
    D: UnivariateDistribution + ?Sized,
{
    check_probability(q)?;
    if q == 0.0 {
        return endpoint(dist.right_end(), "inverse_sf(0)");
    }
    if q == 1.0 {
        return endpoint(dist.left_end(), "inverse_sf(1)");
    }
    if q > 0.5 {
        return dist.quantile(1.0 - q);
    }
    let target = q.ln();
    let g = |x: f64| target - dist.ln_sf(x);
    let (lo, hi) = match guess {
        Some(x0) => {
            let width = 1e-3 * (1.0 + x0.abs());
            if g(x0 - width) <= 0.0 && g(x0 + width) >= 0.0 {
                (x0 - width, x0 + width)
            } else {
                bracket_increasing(g, dist.left_end(), dist.right_end(), x0)?
            }
        }
        None => bracket_increasing(
            g,
            dist.left_end(),
            dist.right_end(),
            start_point(dist.left_end(), dist.right_end()),
        )?,
    };
    solve_increasing(
        |x| {
            let ls = dist.ln_sf(x);
            (target - ls, (dist.ln_pdf(x) - ls).exp())
        },
        lo,
        hi,
        guess,
    )
}

/// Pareto(α): `F(x) = 1 - x^{-α}` on `x > 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pareto {
    alpha: f64,
}

impl Pareto {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha.is_finite() {
            Ok(Pareto { alpha })
        } else {
            Err(EvtError::domain(format!(
                "Pareto needs alpha > 0, got {alpha}"
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl UnivariateDistribution for Pareto {
    fn name(&self) -> String {
        format!("pareto(alpha={})", self.alpha)
    }
    fn left_end(&self) -> f64 {
        1.0
    }
    fn right_end(&self) -> f64 {
        f64::INFINITY
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            0.0
        } else {
            -(-self.alpha * x.ln()).exp_m1()
        }
    }
    fn sf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            1.0
        } else {
            (-self.alpha * x.ln()).exp()
        }
    }
    fn pdf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            0.0
        } else {
            self.ln_pdf(x).exp()
        }
    }
    fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            f64::NEG_INFINITY
        } else {
            self.alpha.ln() - (self.alpha + 1.0) * x.ln()
        }
    }
    fn ln_cdf(&self, x: f64) -> f64 {
        let s = self.sf(x);
        if s <= 0.5 {
            (-s).ln_1p()
        } else {
            self.cdf(x).ln()
        }
    }
    fn ln_sf(&self, x: f64) -> f64 {
        if x <= 1.0 {
            0.0
        } else {
            -self.alpha * x.ln()
        }
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        if p == 1.0 {
            return endpoint(f64::INFINITY, "quantile(1)");
        }
        Ok((-(-p).ln_1p() / self.alpha).exp())
    }
    fn inverse_sf(&self, q: f64) -> Result<f64> {
        check_probability(q)?;
        if q == 0.0 {
            return endpoint(f64::INFINITY, "inverse_sf(0)");
        }
        Ok((-q.ln() / self.alpha).exp())
    }
}

/// Uniform law on `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Uniform01;

impl UnivariateDistribution for Uniform01 {
    fn name(&self) -> String {
        "uniform(0,1)".into()
    }
    fn left_end(&self) -> f64 {
        0.0
    }
    fn right_end(&self) -> f64 {
        1.0
    }
    fn cdf(&self, x: f64) -> f64 {
        x.clamp(0.0, 1.0)
    }
    fn sf(&self, x: f64) -> f64 {
        (1.0 - x).clamp(0.0, 1.0)
    }
    fn pdf(&self, x: f64) -> f64 {
        if x > 0.0 && x < 1.0 {
            1.0
        } else {
            0.0
        }
    }
    fn ln_cdf(&self, x: f64) -> f64 {
        self.cdf(x).ln()
    }
    fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            self.sf(x).ln()
        }
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        Ok(p)
    }
    fn inverse_sf(&self, q: f64) -> Result<f64> {
        check_probability(q)?;
        Ok(1.0 - q)
    }
}

/// Standard exponential law.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Exponential;

impl UnivariateDistribution for Exponential {
    fn name(&self) -> String {
        "exponential".into()
    }
    fn left_end(&self) -> f64 {
        0.0
    }
    fn right_end(&self) -> f64 {
        f64::INFINITY
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x).exp_m1()
        }
    }
    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-x).exp()
        }
    }
    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            (-x).exp()
        }
    }
    fn ln_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            f64::NEG_INFINITY
        } else {
            -x
        }
    }
    fn ln_cdf(&self, x: f64) -> f64 {
        if x > std::f64::consts::LN_2 {
            (-(-x).exp()).ln_1p()
        } else {
            self.cdf(x).ln()
        }
    }
    fn ln_sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -x
        }
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        if p == 1.0 {
            return endpoint(f64::INFINITY, "quantile(1)");
        }
        Ok(-(-p).ln_1p())
    }
    fn inverse_sf(&self, q: f64) -> Result<f64> {
        check_probability(q)?;
        if q == 0.0 {
            return endpoint(f64::INFINITY, "inverse_sf(0)");
        }
        Ok(-q.ln())
    }
}

/// Standard normal law. Tails come from `erfc`, never from `1 - cdf`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StdNormal;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

impl StdNormal {
    /// `ln(1 - Φ(x))`, switching to the asymptotic Mills-ratio series where
    /// `erfc` underflows.
    fn ln_upper(x: f64) -> f64 {
        let s = 0.5 * libm::erfc(x / std::f64::consts::SQRT_2);
        if s > 1e-300 {
            return s.ln();
        }
        let z = 1.0 / (x * x);
        let series = 1.0 - z * (1.0 - z * (3.0 - z * (15.0 - 105.0 * z)));
        -0.5 * x * x - LN_SQRT_2PI - x.ln() + series.ln()
    }

    /// Abramowitz–Stegun 26.2.23 starting point for the upper-tail inverse.
    fn tail_guess(q: f64) -> f64 {
        let t = (-2.0 * q.ln()).sqrt();
        t - (2.515_517 + t * (0.802_853 + t * 0.010_328))
            / (1.0 + t * (1.432_788 + t * (0.189_269 + t * 0.001_308)))
    }
}

impl UnivariateDistribution for StdNormal {
    fn name(&self) -> String {
        "normal(0,1)".into()
    }
    fn left_end(&self) -> f64 {
        f64::NEG_INFINITY
    }
    fn right_end(&self) -> f64 {
        f64::INFINITY
    }
    fn cdf(&self, x: f64) -> f64 {
        0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
    }
    fn sf(&self, x: f64) -> f64 {
        0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
    }
    fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }
    fn ln_pdf(&self, x: f64) -> f64 {
        -0.5 * x * x - LN_SQRT_2PI
    }
    fn ln_cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            Self::ln_upper(-x)
        } else {
            (-self.sf(x)).ln_1p()
        }
    }
    fn ln_sf(&self, x: f64) -> f64 {
        if x > 0.0 {
            Self::ln_upper(x)
        } else {
            (-self.cdf(x)).ln_1p()
        }
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        check_probability(p)?;
        if p == 0.0 || p == 1.0 {
            return Err(EvtError::domain(
                "normal quantile at 0 or 1 is an infinite endpoint",
            ));
        }
        if p < 0.5 {
            Ok(-self.inverse_sf(p)?)
        } else {
            self.inverse_sf(1.0 - p)
        }
    }
    fn inverse_sf(&self, q: f64) -> Result<f64> {
        check_probability(q)?;
        if q == 0.0 || q == 1.0 {
            return Err(EvtError::domain(
                "normal inverse survival at 0 or 1 is an infinite endpoint",
            ));
        }
        if q == 0.5 {
            return Ok(0.0);
        }
        if q > 0.5 {
            return Ok(-self.inverse_sf(1.0 - q)?);
        }
        generic_inverse_sf(self, q, Some(Self::tail_guess(q)))
    }
}

/// Pareto(α) parent.
pub fn make_pareto(alpha: f64) -> Result<Distribution> {
    Ok(Arc::new(Pareto::new(alpha)?))
}

/// Uniform(0, 1) parent.
pub fn make_uniform01() -> Distribution {
    Arc::new(Uniform01)
}

/// Standard exponential parent.
pub fn make_exponential() -> Distribution {
    Arc::new(Exponential)
}

/// Standard normal parent.
pub fn make_std_normal() -> Distribution {
    Arc::new(StdNormal)
}

/// The law of `location + scale · X` for `X ~ base`.
#[derive(Debug, Clone)]
pub struct LocationScale {
    base: Distribution,
    location: f64,
    scale: f64,
}

impl LocationScale {
    pub fn new(base: Distribution, location: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) || !location.is_finite() {
            return Err(EvtError::domain(format!(
                "location-scale needs finite location and scale > 0, got ({location}, {scale})"
            )));
        }
        Ok(LocationScale {
            base,
            location,
            scale,
        })
    }

    pub fn base(&self) -> &Distribution {
        &self.base
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    #[inline]
    fn standardize(&self, x: f64) -> f64 {
        (x - self.location) / self.scale
    }
}

impl UnivariateDistribution for LocationScale {
    fn name(&self) -> String {
        format!(
            "{}[loc={}, scale={}]",
            self.base.name(),
            self.location,
            self.scale
        )
    }
    fn left_end(&self) -> f64 {
        self.location + self.scale * self.base.left_end()
    }
    fn right_end(&self) -> f64 {
        self.location + self.scale * self.base.right_end()
    }
    fn cdf(&self, x: f64) -> f64 {
        self.base.cdf(self.standardize(x))
    }
    fn sf(&self, x: f64) -> f64 {
        self.base.sf(self.standardize(x))
    }
    fn pdf(&self, x: f64) -> f64 {
        self.base.pdf(self.standardize(x)) / self.scale
    }
    fn ln_pdf(&self, x: f64) -> f64 {
        self.base.ln_pdf(self.standardize(x)) - self.scale.ln()
    }
    fn ln_cdf(&self, x: f64) -> f64 {
        self.base.ln_cdf(self.standardize(x))
    }
    fn ln_sf(&self, x: f64) -> f64 {
        self.base.ln_sf(self.standardize(x))
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.location + self.scale * self.base.quantile(p)?)
    }
    fn inverse_sf(&self, q: f64) -> Result<f64> {
        Ok(self.location + self.scale * self.base.inverse_sf(q)?)
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A parent given by user-supplied evaluators.
///
/// Only `cdf` and `pdf` are required; survival and quantile evaluators fall
/// back to `1 - cdf` and root finding unless provided.
#[derive(Clone)]
pub struct CustomDistribution {
    name: String,
    left: f64,
    right: f64,
    cdf: Evaluator,
    pdf: Evaluator,
    sf: Option<Evaluator>,
    quantile: Option<Evaluator>,
}

impl fmt::Debug for CustomDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDistribution")
            .field("name", &self.name)
            .field("left", &self.left)
            .field("right", &self.right)
            .finish_non_exhaustive()
    }
}

impl CustomDistribution {
    pub fn new<C, P>(name: impl Into<String>, left: f64, right: f64, cdf: C, pdf: P) -> Result<Self>
    where
        C: Fn(f64) -> f64 + Send + Sync + 'static,
        P: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(left < right) {
            return Err(EvtError::domain(format!(
                "support endpoints must satisfy left < right, got ({left}, {right})"
            )));
        }
        Ok(CustomDistribution {
            name: name.into(),
            left,
            right,
            cdf: Arc::new(cdf),
            pdf: Arc::new(pdf),
            sf: None,
            quantile: None,
        })
    }

    pub fn with_sf<S>(mut self, sf: S) -> Self
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.sf = Some(Arc::new(sf));
        self
    }

    pub fn with_quantile<Q>(mut self, quantile: Q) -> Self
    where
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.quantile = Some(Arc::new(quantile));
        self
    }

    fn inside(&self, x: f64) -> bool {
        x > self.left && x < self.right
    }
}

impl UnivariateDistribution for CustomDistribution {
    fn name(&self) -> String {
        self.name.clone()
    }
    fn left_end(&self) -> f64 {
        self.left
    }
    fn right_end(&self) -> f64 {
        self.right
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= self.left {
            0.0
        } else if x >= self.right {
            1.0
        } else {
            (self.cdf)(x)
        }
    }
    fn sf(&self, x: f64) -> f64 {
        match &self.sf {
            Some(sf) if self.inside(x) => sf(x),
            _ => 1.0 - self.cdf(x),
        }
    }
    fn pdf(&self, x: f64) -> f64 {
        if self.inside(x) {
            (self.pdf)(x)
        } else {
            0.0
        }
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        match &self.quantile {
            Some(q) => {
                check_probability(p)?;
                Ok(q(p))
            }
            None => generic_quantile(self, p),
        }
    }
}

/// Grid checks of the structural invariants of a parent: monotone cdf with
/// the right limits, zero density off the support, and `quantile(cdf(x)) = x`.
///
/// Returns the list of violations; empty means the parent passed.
pub fn check_invariants(dist: &dyn UnivariateDistribution, points: usize) -> Vec<String> {
    let mut issues = Vec::new();
    let (l, r) = (dist.left_end(), dist.right_end());
    let grid: Vec<f64> = match (dist.quantile(1e-6), dist.inverse_sf(1e-6)) {
        (Ok(a), Ok(b)) if a < b => (0..points)
            .map(|i| a + (b - a) * i as f64 / (points.max(2) - 1) as f64)
            .collect(),
        _ => {
            issues.push("could not place a grid between the 1e-6 quantiles".into());
            return issues;
        }
    };
    for w in grid.windows(2) {
        if dist.cdf(w[1]) < dist.cdf(w[0]) {
            issues.push(format!("cdf decreases between {} and {}", w[0], w[1]));
        }
    }
    for &x in &grid {
        let p = dist.pdf(x);
        if p > 0.0 && x > l && x < r {
            let c = dist.cdf(x);
            if c > 1e-6 && c < 1.0 - 1e-6 {
                if let Ok(back) = dist.quantile(c) {
                    if (back - x).abs() > 1e-9 * (1.0 + x.abs()) {
                        issues.push(format!("quantile(cdf({x})) = {back}"));
                    }
                }
            }
        }
    }
    if l.is_finite() {
        if dist.pdf(l - 1.0) != 0.0 || dist.cdf(l - 1.0) != 0.0 {
            issues.push("nonzero mass below the left endpoint".into());
        }
        if dist.cdf(l + 1e-12 * (1.0 + l.abs())) > 1e-6 {
            issues.push("cdf does not vanish at the left endpoint".into());
        }
    } else if dist.cdf(-1e300) > 1e-12 {
        issues.push("cdf does not vanish at -inf".into());
    }
    if r.is_finite() {
        if dist.pdf(r + 1.0) != 0.0 || dist.cdf(r + 1.0) != 1.0 {
            issues.push("mass above the right endpoint".into());
        }
    } else if dist.cdf(1e300) < 1.0 - 1e-12 {
        issues.push("cdf does not reach 1 at +inf".into());
    }
    issues
}

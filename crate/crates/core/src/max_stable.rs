//! The max-stable laws and the limit laws of the k-th upper extremes.
//!
//! With `t(x) = -ln G(x)`, the limit law of the normalized k-th largest
//! observation is `K_k(x) = G(x) Σ_{i<k} t(x)^i / i!`, with density
//! `g(x) t(x)^{k-1} / (k-1)!`. For `k = 1` this is `G` itself.
//!
//! Everything is evaluated in log space: near the lower support edge `t(x)`
//! is astronomically large and the powers `t^{k-1}` overflow long before the
//! product with `G(x)` underflows to a meaningful zero.

use crate::special::{digamma_int, ln_factorial_of_pred};
use crate::{EvtError, Result};

/// Which of the three extreme value types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Frechet,
    Weibull,
    Gumbel,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Frechet => "Frechet",
            Family::Weibull => "Weibull",
            Family::Gumbel => "Gumbel",
        })
    }
}

/// Φ_α, Ψ_α or Λ in standard form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaxStableLaw {
    /// `exp(-x^{-α})` for `x > 0`.
    Frechet { alpha: f64 },
    /// `exp(-(-x)^α)` for `x < 0`, one for `x >= 0`.
    Weibull { alpha: f64 },
    /// `exp(-e^{-x})`.
    Gumbel,
}

fn check_alpha(alpha: f64) -> Result<f64> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(alpha)
    } else {
        Err(EvtError::domain(format!(
            "shape alpha must be > 0, got {alpha}"
        )))
    }
}

impl MaxStableLaw {
    pub fn frechet(alpha: f64) -> Result<Self> {
        Ok(MaxStableLaw::Frechet {
            alpha: check_alpha(alpha)?,
        })
    }

    pub fn weibull(alpha: f64) -> Result<Self> {
        Ok(MaxStableLaw::Weibull {
            alpha: check_alpha(alpha)?,
        })
    }

    pub fn gumbel() -> Self {
        MaxStableLaw::Gumbel
    }

    pub fn family(&self) -> Family {
        match self {
            MaxStableLaw::Frechet { .. } => Family::Frechet,
            MaxStableLaw::Weibull { .. } => Family::Weibull,
            MaxStableLaw::Gumbel => Family::Gumbel,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            MaxStableLaw::Frechet { alpha } | MaxStableLaw::Weibull { alpha } => Some(alpha),
            MaxStableLaw::Gumbel => None,
        }
    }

    /// Open interval on which the density is positive.
    pub fn support(&self) -> (f64, f64) {
        match self {
            MaxStableLaw::Frechet { .. } => (0.0, f64::INFINITY),
            MaxStableLaw::Weibull { .. } => (f64::NEG_INFINITY, 0.0),
            MaxStableLaw::Gumbel => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// `ln t(x) = ln(-ln G(x))` on the open support.
    fn ln_neg_ln_cdf(&self, x: f64) -> f64 {
        match *self {
            MaxStableLaw::Frechet { alpha } => -alpha * x.ln(),
            MaxStableLaw::Weibull { alpha } => alpha * (-x).ln(),
            MaxStableLaw::Gumbel => -x,
        }
    }

    /// `t(x) = -ln G(x)`; `+∞` below the support, `0` above it.
    pub fn neg_ln_cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            f64::INFINITY
        } else if x >= hi {
            0.0
        } else {
            self.ln_neg_ln_cdf(x).exp()
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (-self.neg_ln_cdf(x)).exp()
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        KthExtremeLimit { law: *self, k: 1 }.ln_pdf(x)
    }

    /// Closed-form Shannon entropy.
    pub fn entropy(&self) -> f64 {
        KthExtremeLimit { law: *self, k: 1 }.entropy()
    }

    /// The `x` with `G(x) = p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        KthExtremeLimit { law: *self, k: 1 }.quantile_lower(p)
    }

    /// Inverse of `t`: the point where `-ln G(x) = t`, from `ln t`.
    fn x_of_ln_t(&self, ln_t: f64) -> f64 {
        match *self {
            MaxStableLaw::Frechet { alpha } => (-ln_t / alpha).exp(),
            MaxStableLaw::Weibull { alpha } => -(ln_t / alpha).exp(),
            MaxStableLaw::Gumbel => -ln_t,
        }
    }
}

/// The limit law `K_k` of the normalized k-th upper extreme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KthExtremeLimit {
    law: MaxStableLaw,
    k: u64,
}

impl KthExtremeLimit {
    pub fn new(law: MaxStableLaw, k: u64) -> Result<Self> {
        if k == 0 {
            return Err(EvtError::domain("extreme rank k must be >= 1"));
        }
        Ok(KthExtremeLimit { law, k })
    }

    pub fn law(&self) -> MaxStableLaw {
        self.law
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn support(&self) -> (f64, f64) {
        self.law.support()
    }

    /// `K_k(x) = e^{-t} Σ_{i<k} t^i / i!`, zero where `G(x) = 0`.
    pub fn cdf(&self, x: f64) -> f64 {
        let t = self.law.neg_ln_cdf(x);
        if t == f64::INFINITY {
            return 0.0;
        }
        if t == 0.0 {
            return 1.0;
        }
        let ln_t = t.ln();
        (0..self.k)
            .map(|i| (-t + i as f64 * ln_t - ln_factorial_of_pred(i + 1)).exp())
            .sum::<f64>()
            .min(1.0)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Log density; `-∞` off the open support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(x > lo && x < hi) {
            return f64::NEG_INFINITY;
        }
        let k = self.k as f64;
        let ln_t = self.law.ln_neg_ln_cdf(x);
        let t = ln_t.exp();
        let norm = ln_factorial_of_pred(self.k);
        match self.law {
            MaxStableLaw::Frechet { alpha } => alpha.ln() - norm - (alpha * k + 1.0) * x.ln() - t,
            MaxStableLaw::Weibull { alpha } => {
                alpha.ln() - norm + (alpha * k - 1.0) * (-x).ln() - t
            }
            MaxStableLaw::Gumbel => -norm - k * x - t,
        }
    }

    /// Closed-form entropy of `K_k`, with `ψ(k) = -γ + H_{k-1}`:
    ///
    /// * Fréchet: `-ln(α/(k-1)!) - ((αk+1)/α) ψ(k) + k`
    /// * Weibull: `-ln(α/(k-1)!) - ((αk-1)/α) ψ(k) + k`
    /// * Gumbel:  `ln (k-1)! - k ψ(k) + k`
    ///
    /// The trailing `k` is `Γ(k+1)/(k-1)!`.
    pub fn entropy(&self) -> f64 {
        let k = self.k as f64;
        let psi = digamma_int(self.k).expect("k >= 1 by construction");
        let ln_fact = ln_factorial_of_pred(self.k);
        match self.law {
            MaxStableLaw::Frechet { alpha } => {
                -alpha.ln() + ln_fact - (alpha * k + 1.0) / alpha * psi + k
            }
            MaxStableLaw::Weibull { alpha } => {
                -alpha.ln() + ln_fact - (alpha * k - 1.0) / alpha * psi + k
            }
            MaxStableLaw::Gumbel => ln_fact - k * psi + k,
        }
    }
}

impl KthExtremeLimit {
    /// The `x` with `K_k(x) = p`, accurate for small `p`.
    pub fn quantile_lower(&self, p: f64) -> Result<f64> {
        check_open_probability(p)?;
        // K_k(x) = Q(k, t(x)), decreasing in t.
        let target = p.ln();
        let ln_t = if self.k == 1 {
            (-target).ln()
        } else {
            bisect_ln_t(|u| target - ln_gamma_q(self.k, u.exp()))
        };
        Ok(self.law.x_of_ln_t(ln_t))
    }

    /// The `x` with `1 - K_k(x) = q`, accurate for small `q`.
    pub fn quantile_upper(&self, q: f64) -> Result<f64> {
        check_open_probability(q)?;
        // 1 - K_k(x) = P(k, t(x)), increasing in t.
        let target = q.ln();
        let ln_t = if self.k == 1 {
            (-(-q).ln_1p()).ln()
        } else {
            bisect_ln_t(|u| ln_gamma_p(self.k, u.exp()) - target)
        };
        Ok(self.law.x_of_ln_t(ln_t))
    }
}

fn check_open_probability(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(EvtError::domain(format!(
            "probability must lie in (0, 1), got {p}"
        )))
    }
}

/// Root in `u = ln t` of an increasing function, by bisection on a range
/// wide enough for every representable tail probability.
fn bisect_ln_t<F: Fn(f64) -> f64>(h: F) -> f64 {
    let (mut lo, mut hi) = (-800.0_f64, 10.0_f64);
    while h(hi) < 0.0 {
        hi *= 1.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * mid.abs().max(1e-300) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `ln Q(k, t)`, `Q(k, t) = e^{-t} Σ_{i<k} t^i / i!`.
fn ln_gamma_q(k: u64, t: f64) -> f64 {
    let ln_t = t.ln();
    let terms: Vec<f64> = (0..k)
        .map(|i| i as f64 * ln_t - ln_factorial_of_pred(i + 1))
        .collect();
    let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    -t + m + terms.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

/// `ln P(k, t) = ln(1 - Q(k, t))`, by its power series below `t = k + 1`.
fn ln_gamma_p(k: u64, t: f64) -> f64 {
    let kf = k as f64;
    if t > kf + 1.0 {
        return (-ln_gamma_q(k, t).exp()).ln_1p();
    }
    // P(k, t) = e^{-t} t^k / k! · Σ_j t^j / ((k+1)...(k+j))
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut j = 1.0;
    while term > 1e-17 * sum {
        term *= t / (kf + j);
        sum += term;
        j += 1.0;
    }
    -t + kf * t.ln() - ln_factorial_of_pred(k + 1) + sum.ln()
}

impl From<MaxStableLaw> for KthExtremeLimit {
    fn from(law: MaxStableLaw) -> Self {
        KthExtremeLimit { law, k: 1 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const E_INV: f64 = 0.367_879_441_171_442_33;

    #[test]
    fn cdf_values() {
        assert!((MaxStableLaw::frechet(1.0).unwrap().cdf(1.0) - E_INV).abs() < 1e-16);
        assert_eq!(MaxStableLaw::weibull(2.0).unwrap().cdf(0.0), 1.0);
        assert!((MaxStableLaw::gumbel().cdf(0.0) - E_INV).abs() < 1e-16);
        assert_eq!(MaxStableLaw::frechet(1.0).unwrap().cdf(0.0), 0.0);
        assert_eq!(MaxStableLaw::frechet(1.0).unwrap().cdf(-3.0), 0.0);
    }

    #[test]
    fn pdf_values() {
        assert!((MaxStableLaw::frechet(1.0).unwrap().pdf(1.0) - E_INV).abs() < 1e-16);
        assert!((MaxStableLaw::weibull(1.0).unwrap().pdf(-1.0) - E_INV).abs() < 1e-16);
        assert!((MaxStableLaw::gumbel().pdf(0.0) - E_INV).abs() < 1e-16);
        // boundary points carry zero density
        assert_eq!(MaxStableLaw::frechet(2.0).unwrap().pdf(0.0), 0.0);
        assert_eq!(MaxStableLaw::weibull(2.0).unwrap().pdf(0.0), 0.0);
    }

    #[test]
    fn entropy_values() {
        assert!((MaxStableLaw::gumbel().entropy() - 1.577_215_664_901_532_8).abs() < 1e-15);
        assert!((MaxStableLaw::weibull(1.0).unwrap().entropy() - 1.0).abs() < 1e-15);
        assert!(
            (MaxStableLaw::frechet(2.0).unwrap().entropy() - 1.172_676_316_792_354).abs() < 1e-15
        );
    }

    #[test]
    fn kth_values() {
        let g1 = KthExtremeLimit::new(MaxStableLaw::gumbel(), 1).unwrap();
        let g2 = KthExtremeLimit::new(MaxStableLaw::gumbel(), 2).unwrap();
        let f2 = KthExtremeLimit::new(MaxStableLaw::frechet(1.0).unwrap(), 2).unwrap();
        let f1 = KthExtremeLimit::new(MaxStableLaw::frechet(1.0).unwrap(), 1).unwrap();
        let w3 = KthExtremeLimit::new(MaxStableLaw::weibull(1.0).unwrap(), 3).unwrap();
        assert!((g1.cdf(0.0) - E_INV).abs() < 1e-16);
        assert!((g2.cdf(0.0) - 0.735_758_882_342_884_7).abs() < 1e-15);
        assert_eq!(f2.cdf(0.0), 0.0);
        assert!((g2.pdf(0.0) - E_INV).abs() < 1e-16);
        assert!((f1.pdf(1.0) - E_INV).abs() < 1e-16);
        assert!((w3.pdf(-1.0) - 0.183_939_720_585_721_17).abs() < 1e-16);
        assert!(KthExtremeLimit::new(MaxStableLaw::gumbel(), 0).is_err());
    }

    #[test]
    fn kth_entropy_values() {
        let g1 = KthExtremeLimit::new(MaxStableLaw::gumbel(), 1).unwrap();
        let g2 = KthExtremeLimit::new(MaxStableLaw::gumbel(), 2).unwrap();
        assert!((g1.entropy() - 1.577_215_664_901_532_8).abs() < 1e-15);
        assert!((g2.entropy() - 1.154_431_329_803_065_8).abs() < 1e-14);
        // -ln 2 - (5/2)(1 - γ) + 2; 30-digit quadrature of -K'_2 ln K'_2 gives 0.24989198169388684
        let f22 = KthExtremeLimit::new(MaxStableLaw::frechet(2.0).unwrap(), 2).unwrap();
        assert!((f22.entropy() - 0.249_891_981_693_886_84).abs() < 1e-14);
    }

    #[test]
    fn k_one_shares_the_max_stable_path() {
        for law in [
            MaxStableLaw::frechet(0.5).unwrap(),
            MaxStableLaw::weibull(5.0).unwrap(),
            MaxStableLaw::gumbel(),
        ] {
            let k1 = KthExtremeLimit::from(law);
            assert_eq!(k1.entropy(), law.entropy());
            for &x in &[-2.0, -0.3, 0.4, 1.7] {
                assert_eq!(k1.pdf(x), law.pdf(x));
                assert!((k1.cdf(x) - law.cdf(x)).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn deep_lower_tail_does_not_overflow() {
        let f = KthExtremeLimit::new(MaxStableLaw::frechet(3.0).unwrap(), 5).unwrap();
        assert_eq!(f.pdf(1e-6), 0.0);
        assert!(f.ln_pdf(1e-6).is_finite());
        let g = KthExtremeLimit::new(MaxStableLaw::gumbel(), 5).unwrap();
        assert_eq!(g.cdf(-800.0), 0.0);
        assert!(g.ln_pdf(-700.0).is_finite());
    }

    #[test]
    fn quantiles_invert_the_cdf() {
        for law in [
            MaxStableLaw::frechet(0.5).unwrap(),
            MaxStableLaw::weibull(2.0).unwrap(),
            MaxStableLaw::gumbel(),
        ] {
            for k in [1u64, 2, 5] {
                let kth = KthExtremeLimit::new(law, k).unwrap();
                for p in [1e-10, 0.01, 0.5, 0.97] {
                    let x = kth.quantile_lower(p).unwrap();
                    assert!(((kth.cdf(x) - p) / p).abs() < 1e-9, "{law:?} k={k} p={p}");
                    let x = kth.quantile_upper(p).unwrap();
                    assert!(
                        ((1.0 - kth.cdf(x)) - p).abs() < 1e-9 * p.max(1e-6),
                        "{law:?} k={k} q={p}"
                    );
                }
            }
        }
        // Gumbel median -ln ln 2
        let m = MaxStableLaw::gumbel().quantile(0.5).unwrap();
        assert!((m + 2f64.ln().ln()).abs() < 1e-15);
        assert!(MaxStableLaw::gumbel().quantile(1.0).is_err());
    }
}

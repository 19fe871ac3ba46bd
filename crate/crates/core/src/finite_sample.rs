//! Exact law of the normalized k-th upper extreme `(X_{n-k+1:n} - b_n) / a_n`.
//!
//! With `y = a_n x + b_n` the density is
//!
//! ```text
//! g_{k:n}(x) = n! / ((k-1)! (n-k)!) · a_n f(y) F(y)^{n-k} F̄(y)^{k-1}
//! ```
//!
//! which is `n a_n F^{n-1}(y) f(y)` for the maximum. All of it is assembled
//! from logarithms, so `n` in the millions is fine.

use crate::distributions::Distribution;
use crate::norming::{NormingConstants, NormingSequence};
use crate::roots::{bracket_increasing, solve_increasing};
use crate::special::{ln_factorial_of_pred, ln_gamma_positive};
use crate::{EvtError, Result};

#[derive(Debug, Clone)]
pub struct FiniteSampleLaw {
    parent: Distribution,
    norming: NormingSequence,
    n: u64,
    k: u64,
    constants: NormingConstants,
    /// `ln(n! / ((k-1)! (n-k)!))`
    ln_coef: f64,
}

impl FiniteSampleLaw {
    pub fn new(parent: Distribution, norming: NormingSequence, n: u64, k: u64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(EvtError::domain(format!(
                "need 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        let constants = norming.constants(n)?;
        let ln_falling = if k <= 64 {
            (0..k).map(|i| ((n - i) as f64).ln()).sum::<f64>()
        } else {
            ln_gamma_positive(n as f64 + 1.0) - ln_gamma_positive((n - k) as f64 + 1.0)
        };
        Ok(FiniteSampleLaw {
            parent,
            norming,
            n,
            k,
            constants,
            ln_coef: ln_falling - ln_factorial_of_pred(k),
        })
    }

    pub fn parent(&self) -> &Distribution {
        &self.parent
    }

    pub fn norming(&self) -> &NormingSequence {
        &self.norming
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn constants(&self) -> NormingConstants {
        self.constants
    }

    /// Maps a normalized point back to the parent scale.
    pub fn to_parent(&self, x: f64) -> f64 {
        self.constants.scale * x + self.constants.center
    }

    fn normalize(&self, y: f64) -> f64 {
        (y - self.constants.center) / self.constants.scale
    }

    /// Open interval on which the density can be positive.
    pub fn support(&self) -> (f64, f64) {
        (
            self.normalize(self.parent.left_end()),
            self.normalize(self.parent.right_end()),
        )
    }

    pub fn ln_density(&self, x: f64) -> f64 {
        let y = self.to_parent(x);
        if !(y > self.parent.left_end() && y < self.parent.right_end()) {
            return f64::NEG_INFINITY;
        }
        let lf = self.parent.ln_pdf(y);
        if lf == f64::NEG_INFINITY {
            return lf;
        }
        let mut acc = self.ln_coef + self.constants.scale.ln() + lf;
        if self.n > self.k {
            acc += (self.n - self.k) as f64 * self.parent.ln_cdf(y);
        }
        if self.k > 1 {
            acc += (self.k - 1) as f64 * self.parent.ln_sf(y);
        }
        if acc.is_nan() {
            f64::NEG_INFINITY
        } else {
            acc
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.ln_density(x).exp()
    }

    /// `ln C(n, i) + i ln F̄ + (n-i) ln F`.
    fn ln_binomial_term(&self, i: u64, ln_f: f64, ln_s: f64) -> f64 {
        let n = self.n as f64;
        let i_f = i as f64;
        let ln_choose = ln_gamma_positive(n + 1.0)
            - ln_gamma_positive(i_f + 1.0)
            - ln_gamma_positive(n - i_f + 1.0);
        let mut t = ln_choose;
        if i > 0 {
            t += i_f * ln_s;
        }
        if self.n > i {
            t += (n - i_f) * ln_f;
        }
        t
    }

    /// `P(at most k-1 of n exceed y)`.
    pub fn cdf(&self, x: f64) -> f64 {
        let y = self.to_parent(x);
        let ln_f = self.parent.ln_cdf(y);
        if self.k == 1 {
            return (self.n as f64 * ln_f).exp();
        }
        let ln_s = self.parent.ln_sf(y);
        if ln_s == f64::NEG_INFINITY {
            return 1.0;
        }
        if ln_f == f64::NEG_INFINITY {
            return 0.0;
        }
        let c: f64 = (0..self.k)
            .map(|i| self.ln_binomial_term(i, ln_f, ln_s).exp())
            .sum();
        c.min(1.0)
    }

    /// `1 - cdf`, summed directly in the upper tail.
    pub fn sf(&self, x: f64) -> f64 {
        let y = self.to_parent(x);
        let ln_f = self.parent.ln_cdf(y);
        if self.k == 1 {
            return -(self.n as f64 * ln_f).exp_m1();
        }
        let c = self.cdf(x);
        if c < 0.5 {
            return 1.0 - c;
        }
        let ln_s = self.parent.ln_sf(y);
        if ln_s == f64::NEG_INFINITY {
            return 0.0;
        }
        // Terms i >= k; they decay geometrically once i exceeds n F̄.
        let mean = self.n as f64 * ln_s.exp();
        let mut total = 0.0;
        for i in self.k..=self.n {
            let term = self.ln_binomial_term(i, ln_f, ln_s).exp();
            total += term;
            if (i as f64) > mean && term <= 1e-17 * total {
                break;
            }
        }
        total.min(1.0)
    }

    /// The `x` with `cdf(x) = p`, accurate for small `p`.
    pub fn quantile_lower(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(EvtError::domain(format!(
                "lower quantile needs p in (0, 1), got {p}"
            )));
        }
        if self.k == 1 {
            // F(y) = p^{1/n}
            let ln_fy = p.ln() / self.n as f64;
            let fy = ln_fy.exp();
            let y = if fy > 0.5 {
                self.parent.inverse_sf(-ln_fy.exp_m1())?
            } else {
                self.parent.quantile(fy)?
            };
            return Ok(self.normalize(y));
        }
        let target = p.ln();
        self.solve(
            |x| self.cdf(x).ln() - target,
            |x| (self.ln_density(x) - self.cdf(x).ln()).exp(),
        )
    }

    /// The `x` with `sf(x) = q`, accurate for small `q`.
    pub fn quantile_upper(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(EvtError::domain(format!(
                "upper quantile needs q in (0, 1), got {q}"
            )));
        }
        if self.k == 1 {
            // F(y)^n = 1 - q
            let ln_fy = (-q).ln_1p() / self.n as f64;
            let y = self.parent.inverse_sf(-ln_fy.exp_m1())?;
            return Ok(self.normalize(y));
        }
        let target = q.ln();
        self.solve(
            |x| target - self.sf(x).ln(),
            |x| (self.ln_density(x) - self.sf(x).ln()).exp(),
        )
    }

    fn solve<G, D>(&self, g: G, dg: D) -> Result<f64>
    where
        G: Fn(f64) -> f64,
        D: Fn(f64) -> f64,
    {
        let (lo, hi) = self.support();
        // Start from the parent's (k/n) upper quantile mapped to the normalized scale.
        let start = self
            .parent
            .inverse_sf(self.k as f64 / (self.n as f64 + 1.0))
            .map(|y| self.normalize(y))
            .ok()
            .filter(|x| x.is_finite() && *x > lo && *x < hi)
            .unwrap_or_else(|| match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 1.0,
                (false, true) => hi - 1.0,
                (false, false) => 0.0,
            });
        let g_clamped = |x: f64| {
            let v = g(x);
            if v.is_nan() {
                if x <= start {
                    -1.0
                } else {
                    1.0
                }
            } else {
                v
            }
        };
        let (a, b) = bracket_increasing(g_clamped, lo, hi, start)?;
        solve_increasing(|x| (g_clamped(x), dg(x)), a, b, Some(start))
    }
}

/// Whether `g_n(x)` is nonincreasing in `n` for every `x` on a grid over the
/// upper half of the limit law (its median to its 0.999 quantile), across
/// consecutive entries of `n_grid`.
///
/// This is the numerical surface of the monotonicity hypothesis under which
/// `H(g_n)` increases to its limit. It holds for the Pareto, uniform and
/// exponential parents and fails for the normal.
pub fn upper_density_nonincreasing_in_n(
    parent: &Distribution,
    norming: &NormingSequence,
    n_grid: &[u64],
) -> Result<bool> {
    let target = norming.target();
    let lo = target.quantile(0.5)?;
    let hi = target.quantile(0.999)?;
    let xs: Vec<f64> = (0..=200)
        .map(|i| lo + (hi - lo) * i as f64 / 200.0)
        .collect();
    let mut previous: Option<Vec<f64>> = None;
    for &n in n_grid {
        let law = FiniteSampleLaw::new(parent.clone(), norming.clone(), n, 1)?;
        let current: Vec<f64> = xs.iter().map(|&x| law.density(x)).collect();
        if let Some(prev) = &previous {
            let grew = prev
                .iter()
                .zip(&current)
                .any(|(p, c)| *c > *p * (1.0 + 1e-12) + 1e-300);
            if grew {
                return Ok(false);
            }
        }
        previous = Some(current);
    }
    Ok(true)
}

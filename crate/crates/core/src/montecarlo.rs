//! Simulation oracles for the normalized extremes.
//!
//! Replications never materialize `n` variates. The upper tail probability
//! `V = F̄(X_{n-k+1:n})` of the k-th largest observation is Beta(k, n-k+1):
//! for `k = 1` it is drawn as `1 - U^{1/n}`, otherwise as `G₁/(G₁+G₂)` with
//! independent `G₁ ~ Gamma(k)` and `G₂ ~ Gamma(n-k+1)`. The extreme itself is
//! then `F̄^{-1}(V)`.
//!
//! # Streams
//!
//! Replications are grouped in blocks of [`BLOCK_SIZE`]. Block `b` draws from
//! `ChaCha8Rng::seed_from_u64(seed)` switched to stream `b`, so the output
//! depends only on the plan and never on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Gamma, Open01};
use rayon::prelude::*;

use crate::distributions::{make_exponential, Distribution};
use crate::families::WorkedFamily;
use crate::finite_sample::FiniteSampleLaw;
use crate::max_stable::MaxStableLaw;
use crate::norming::NormingSequence;
use crate::quadrature::compensated_sum;
use crate::special::{gamma_positive, gumbel_moment, harmonic, EULER_GAMMA};
use crate::{EvtError, Result};

/// Replications per random stream.
pub const BLOCK_SIZE: usize = 4096;

#[derive(Debug, Clone)]
pub struct SimulationPlan {
    pub parent: Distribution,
    pub norming: NormingSequence,
    /// Block size `n`.
    pub n: u64,
    /// Extreme rank `k`, 1 for the maximum.
    pub k: u64,
    pub replications: usize,
    pub seed: u64,
}

impl SimulationPlan {
    pub fn new(
        parent: Distribution,
        norming: NormingSequence,
        n: u64,
        k: u64,
        replications: usize,
        seed: u64,
    ) -> Result<Self> {
        if k == 0 || k > n {
            return Err(EvtError::domain(format!(
                "need 1 <= k <= n, got k = {k}, n = {n}"
            )));
        }
        if replications == 0 {
            return Err(EvtError::domain("replications must be >= 1"));
        }
        Ok(SimulationPlan {
            parent,
            norming,
            n,
            k,
            replications,
            seed,
        })
    }

    /// A plan for one of the worked families with its closed-form norming.
    pub fn worked(
        family: WorkedFamily,
        n: u64,
        k: u64,
        replications: usize,
        seed: u64,
    ) -> Result<Self> {
        Self::new(
            family.parent(),
            family.closed_form_norming(),
            n,
            k,
            replications,
            seed,
        )
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleSummary {
    pub count: usize,
    pub mean: f64,
    /// `s / √count`, `s` the sample standard deviation.
    pub std_error: f64,
}

impl SampleSummary {
    /// Whether `value` lies within `bands` standard errors of the mean.
    pub fn covers(&self, value: f64, bands: f64) -> bool {
        (self.mean - value).abs() <= bands * self.std_error
    }
}

/// Mean and standard error with compensated sums.
pub fn summarize(values: &[f64]) -> Result<SampleSummary> {
    let count = values.len();
    if count < 2 {
        return Err(EvtError::domain(
            "need at least two values for a standard error",
        ));
    }
    let mean = compensated_sum(values.iter().copied()) / count as f64;
    let ss = compensated_sum(values.iter().map(|v| (v - mean) * (v - mean)));
    let var = ss / (count - 1) as f64;
    Ok(SampleSummary {
        count,
        mean,
        std_error: (var / count as f64).sqrt(),
    })
}

fn upper_tail_sampler(n: u64, k: u64) -> Result<impl Fn(&mut ChaCha8Rng) -> f64> {
    let g1 = Gamma::new(k as f64, 1.0).map_err(|e| EvtError::domain(e.to_string()))?;
    let g2 = Gamma::new((n - k + 1) as f64, 1.0).map_err(|e| EvtError::domain(e.to_string()))?;
    Ok(move |rng: &mut ChaCha8Rng| {
        if k == 1 {
            let u: f64 = rng.sample(Open01);
            -(u.ln() / n as f64).exp_m1()
        } else {
            let a = rng.sample(g1);
            let b = rng.sample(g2);
            a / (a + b)
        }
    })
}

/// `replications` draws of `(X_{n-k+1:n} - b_n) / a_n`.
pub fn sample_normalized_extreme(plan: &SimulationPlan) -> Result<Vec<f64>> {
    if plan.k == 0 || plan.k > plan.n || plan.replications == 0 {
        return Err(EvtError::domain("invalid simulation plan"));
    }
    let c = plan.norming.constants(plan.n)?;
    let draw = upper_tail_sampler(plan.n, plan.k)?;
    let blocks = plan.replications.div_ceil(BLOCK_SIZE);
    let chunks: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
            rng.set_stream(b as u64);
            let len = BLOCK_SIZE.min(plan.replications - b * BLOCK_SIZE);
            (0..len)
                .map(|_| {
                    let v = draw(&mut rng);
                    let y = plan.parent.inverse_sf(v)?;
                    Ok((y - c.center) / c.scale)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.concat())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxMeanRow {
    pub n: u64,
    pub empirical: SampleSummary,
    /// `H_n - ln n`.
    pub exact_mean: f64,
    /// Euler's constant.
    pub limit: f64,
}

/// Means of `Z_n - ln n`, `Z_n` the maximum of `n` standard exponentials,
/// simulated and exact.
pub fn check_exponential_max_means(
    n_grid: &[u64],
    replications: usize,
    seed: u64,
) -> Result<Vec<MaxMeanRow>> {
    let family = WorkedFamily::Exponential;
    n_grid
        .iter()
        .map(|&n| {
            let plan = SimulationPlan::new(
                make_exponential(),
                family.closed_form_norming(),
                n,
                1,
                replications,
                seed,
            )?;
            let draws = sample_normalized_extreme(&plan)?;
            Ok(MaxMeanRow {
                n,
                empirical: summarize(&draws)?,
                exact_mean: harmonic(n)? - (n as f64).ln(),
                limit: EULER_GAMMA,
            })
        })
        .collect()
}

/// Resubstitution entropy estimate `-mean ln g_{k:n}(X_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResubEstimate {
    pub summary: SampleSummary,
    /// Draws at which the density evaluated to zero and which were dropped.
    pub excluded: usize,
}

impl ResubEstimate {
    pub fn estimate(&self) -> f64 {
        self.summary.mean
    }
}

pub fn resub_entropy(plan: &SimulationPlan) -> Result<ResubEstimate> {
    let law = FiniteSampleLaw::new(plan.parent.clone(), plan.norming.clone(), plan.n, plan.k)?;
    let draws = sample_normalized_extreme(plan)?;
    let scores: Vec<f64> = draws.par_iter().map(|&x| -law.ln_density(x)).collect();
    let kept: Vec<f64> = scores.iter().copied().filter(|v| v.is_finite()).collect();
    Ok(ResubEstimate {
        excluded: scores.len() - kept.len(),
        summary: summarize(&kept)?,
    })
}

/// The limit of `E[((M_n - b_n)/a_n)^k]` under `target`:
/// `Γ(1 - k/α)` (Fréchet, `k < α`), `(-1)^k Γ(1 + k/α)` (Weibull),
/// `(-1)^k Γ^{(k)}(1)` (Gumbel, `k <= 2`).
pub fn moment_limit(target: MaxStableLaw, k_power: u32) -> Result<f64> {
    if k_power == 0 {
        return Err(EvtError::domain("moment order must be >= 1"));
    }
    let k = k_power as f64;
    match target {
        MaxStableLaw::Frechet { alpha } => {
            if k >= alpha {
                return Err(EvtError::domain(format!(
                    "Fréchet moment of order {k_power} needs alpha > {k_power}, got {alpha}"
                )));
            }
            Ok(gamma_positive(1.0 - k / alpha))
        }
        MaxStableLaw::Weibull { alpha } => {
            let sign = if k_power % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign * gamma_positive(1.0 + k / alpha))
        }
        MaxStableLaw::Gumbel => gumbel_moment(k_power),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow {
    pub n: u64,
    pub empirical: SampleSummary,
    pub limit: f64,
}

/// Simulated `k_power`-th moments of the normalized maximum against their limit.
pub fn check_moment_convergence(
    parent: &Distribution,
    norming: &NormingSequence,
    target: MaxStableLaw,
    k_power: u32,
    n_grid: &[u64],
    replications: usize,
    seed: u64,
) -> Result<Vec<MomentRow>> {
    let limit = moment_limit(target, k_power)?;
    n_grid
        .iter()
        .map(|&n| {
            let plan =
                SimulationPlan::new(parent.clone(), norming.clone(), n, 1, replications, seed)?;
            let powered: Vec<f64> = sample_normalized_extreme(&plan)?
                .into_iter()
                .map(|x| x.powi(k_power as i32))
                .collect();
            Ok(MomentRow {
                n,
                empirical: summarize(&powered)?,
                limit,
            })
        })
        .collect()
}

/// Kolmogorov distance between the empirical law of `sample` and `cdf`.
pub fn kolmogorov_distance<C: Fn(f64) -> f64>(sample: &[f64], cdf: C) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let m = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / m).abs().max(((i + 1) as f64 / m - f).abs())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::entropy_of;
    use crate::quadrature::QuadratureSpec;

    #[test]
    fn deterministic_for_fixed_seed() {
        let plan = SimulationPlan::worked(WorkedFamily::StdNormal, 50, 2, 1, 7).unwrap();
        assert_eq!(
            sample_normalized_extreme(&plan).unwrap(),
            sample_normalized_extreme(&plan).unwrap()
        );
        let plan = SimulationPlan::worked(WorkedFamily::Exponential, 50, 1, 10_000, 7).unwrap();
        let a = sample_normalized_extreme(&plan).unwrap();
        let b = sample_normalized_extreme(&plan).unwrap();
        assert_eq!(a, b);
        let other = SimulationPlan { seed: 8, ..plan };
        assert_ne!(a, sample_normalized_extreme(&other).unwrap());
    }

    #[test]
    fn thread_count_does_not_matter() {
        let plan = SimulationPlan::worked(WorkedFamily::Uniform01, 100, 1, 3 * BLOCK_SIZE + 5, 11)
            .unwrap();
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| sample_normalized_extreme(&plan).unwrap());
        assert_eq!(single, sample_normalized_extreme(&plan).unwrap());
        assert_eq!(single.len(), 3 * BLOCK_SIZE + 5);
    }

    #[test]
    fn plan_validation() {
        assert!(SimulationPlan::worked(WorkedFamily::Uniform01, 3, 4, 10, 0).is_err());
        assert!(SimulationPlan::worked(WorkedFamily::Uniform01, 3, 1, 0, 0).is_err());
    }

    #[test]
    fn uniform_maxima_follow_weibull() {
        let plan =
            SimulationPlan::worked(WorkedFamily::Uniform01, 1_000_000, 1, 10_000, 1).unwrap();
        let xs = sample_normalized_extreme(&plan).unwrap();
        let w = MaxStableLaw::Weibull { alpha: 1.0 };
        assert!(kolmogorov_distance(&xs, |x| w.cdf(x)) < 0.02);
    }

    #[test]
    fn exponential_mean_matches_harmonic() {
        let plan = SimulationPlan::worked(WorkedFamily::Exponential, 1000, 1, 100_000, 3).unwrap();
        let s = summarize(&sample_normalized_extreme(&plan).unwrap()).unwrap();
        let exact = harmonic(1000).unwrap() - 1000f64.ln();
        let band = 3.0 * (std::f64::consts::PI / 6f64.sqrt()) / (100_000f64).sqrt();
        assert!((s.mean - exact).abs() < band);
    }

    #[test]
    fn exponential_max_means_table() {
        let rows = check_exponential_max_means(&[1, 100, 10_000], 2_000, 5).unwrap();
        assert!((rows[0].exact_mean - 1.0).abs() < 1e-15);
        assert!((rows[2].exact_mean - 0.577_265_664_0).abs() < 1e-9);
        for r in &rows {
            assert!((r.exact_mean - (harmonic(r.n).unwrap() - (r.n as f64).ln())).abs() < 1e-12);
            assert_eq!(r.limit, EULER_GAMMA);
        }
    }

    #[test]
    fn resubstitution_examples() {
        let plan = SimulationPlan::worked(WorkedFamily::Uniform01, 2, 1, 200_000, 9).unwrap();
        let r = resub_entropy(&plan).unwrap();
        assert!((r.estimate() - 0.5).abs() < 0.005);
        assert_eq!(r.excluded, 0);

        let plan = SimulationPlan::worked(WorkedFamily::Pareto { alpha: 2.0 }, 100, 2, 100_000, 2)
            .unwrap();
        let r = resub_entropy(&plan).unwrap();
        let law = FiniteSampleLaw::new(plan.parent.clone(), plan.norming.clone(), 100, 2).unwrap();
        let h = entropy_of(&law, &QuadratureSpec::default()).unwrap();
        assert!(r.summary.covers(h, 3.0), "{} vs {h}", r.estimate());
    }

    #[test]
    fn moment_limits() {
        assert!(
            (moment_limit(MaxStableLaw::Frechet { alpha: 3.0 }, 1).unwrap()
                - 1.354_117_939_426_400_4)
                .abs()
                < 1e-12
        );
        assert!(
            (moment_limit(MaxStableLaw::Weibull { alpha: 1.0 }, 1).unwrap() + 1.0).abs() < 1e-15
        );
        assert!(
            (moment_limit(MaxStableLaw::Weibull { alpha: 1.0 }, 2).unwrap() - 2.0).abs() < 1e-14
        );
        assert_eq!(moment_limit(MaxStableLaw::Gumbel, 1).unwrap(), EULER_GAMMA);
        assert!(moment_limit(MaxStableLaw::Frechet { alpha: 1.0 }, 1).is_err());
        assert!(moment_limit(MaxStableLaw::Gumbel, 3).is_err());
    }

    #[test]
    fn summary_statistics() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.mean, 2.5);
        assert!((s.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(summarize(&[1.0]).is_err());
    }
}

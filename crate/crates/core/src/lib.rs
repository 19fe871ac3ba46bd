//! Entropy limit theorems for normalized maxima, made computable.
//!
//! `evt-entropy` evaluates the exact finite-sample laws of linearly
//! normalized maxima `(M_n - b_n) / a_n` and of the k-th upper extremes of iid
//! samples, computes their Shannon entropies and relative entropies against the
//! max-stable limit laws by adaptive quadrature, and compares them with the
//! closed-form limit entropies of the Fréchet, Weibull and Gumbel laws.
//!
//! The crate is organised bottom-up:
//!
//! * [`special`]: Euler's constant, harmonic numbers, the Gamma function and
//!   the log-moment integrals `A(k)`.
//! * [`distributions`]: parent distributions `F` as evaluator bundles, the
//!   worked families and location-scale wrapping.
//! * [`max_stable`]: the three max-stable laws and their k-th extreme limits.
//! * [`norming`]: norming sequences `(a_n, b_n)`.
//! * [`finite_sample`]: exact laws of the normalized k-th extreme at finite `n`.
//! * [`quadrature`]: adaptive Gauss–Kronrod integration.
//! * [`entropy`]: entropy, the cross term `Δ_g`, relative entropy and sweeps.
//! * [`classify`]: von Mises diagnostics for the max domain of attraction.
//! * [`montecarlo`]: simulation oracles.
//!
//! ```
//! use evt_entropy::prelude::*;
//!
//! let family = WorkedFamily::Exponential;
//! let law = FiniteSampleLaw::new(family.parent(), family.closed_form_norming(), 2, 1).unwrap();
//! let h = entropy_of(&law, &QuadratureSpec::default()).unwrap();
//! // (n - 1)/n + H_n - log n at n = 2
//! assert!((h - (0.5 + 1.5 - 2f64.ln())).abs() < 1e-9);
//! ```

// `!(a < b)` guards also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod distributions;
pub mod entropy;
mod error;
pub mod families;
pub mod finite_sample;
pub mod max_stable;
pub mod montecarlo;
pub mod norming;
pub mod quadrature;
mod roots;
pub mod special;

pub use error::{EvtError, Result};

/// Glob-importable collection of the commonly used items.
pub mod prelude {
    pub use crate::classify::{classify, DomainFamily, DomainVerdict};
    pub use crate::distributions::{
        make_exponential, make_pareto, make_std_normal, make_uniform01, Distribution,
        LocationScale, UnivariateDistribution,
    };
    pub use crate::entropy::{
        convergence_sweep, delta_of, entropy_of, i1_exact, i2_of, kl_of, ConvergenceReport,
    };
    pub use crate::families::WorkedFamily;
    pub use crate::finite_sample::FiniteSampleLaw;
    pub use crate::max_stable::{KthExtremeLimit, MaxStableLaw};
    pub use crate::norming::{closed_form_norming, quantile_norming, NormingSequence};
    pub use crate::quadrature::QuadratureSpec;
    pub use crate::{EvtError, Result};
}

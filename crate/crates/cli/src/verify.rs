//! Built-in verification suites behind `evt-entropy verify`.

use std::io;

use evt_entropy::entropy::{differential_entropy, increasing_with_slack, sweep_row, total_mass};
use evt_entropy::montecarlo::{check_exponential_max_means, check_moment_convergence};
use evt_entropy::prelude::*;
use evt_entropy::quadrature::integrate_pieces;
use evt_entropy::special::{a_of_k, harmonic, EULER_GAMMA};
use rayon::prelude::*;

use crate::args::Suite;

/// Monte Carlo sample size of each simulated check.
pub const REPLICATIONS: usize = 100_000;

/// Standard errors allowed between a simulated mean and its target.
pub const SE_BANDS: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(
    suite: &'static str,
    name: impl Into<String>,
    passed: bool,
    detail: impl Into<String>,
) -> Check {
    Check {
        suite,
        name: name.into(),
        passed,
        detail: detail.into(),
    }
}

fn failed(suite: &'static str, name: impl Into<String>, e: impl std::fmt::Display) -> Check {
    check(suite, name, false, format!("error: {e}"))
}

fn close(suite: &'static str, name: String, got: Result<f64>, want: f64, tol: f64) -> Check {
    match got {
        Ok(v) => check(
            suite,
            name,
            (v - want).abs() < tol,
            format!("{v} vs {want} (tol {tol:e})"),
        ),
        Err(e) => failed(suite, name, e),
    }
}

const ALPHAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

fn limit_laws() -> Vec<MaxStableLaw> {
    let mut laws = vec![MaxStableLaw::Gumbel];
    for a in ALPHAS {
        laws.push(MaxStableLaw::Frechet { alpha: a });
        laws.push(MaxStableLaw::Weibull { alpha: a });
    }
    laws
}

const ORACLE_FAMILIES: [WorkedFamily; 4] = [
    WorkedFamily::Uniform01,
    WorkedFamily::Exponential,
    WorkedFamily::Pareto { alpha: 1.0 },
    WorkedFamily::Pareto { alpha: 2.0 },
];

/// Closed forms against quadrature.
pub fn oracles(spec: &QuadratureSpec) -> Vec<Check> {
    const S: &str = "oracles";
    let mut out = vec![
        close(
            S,
            "H(gumbel) = 1 + euler gamma".into(),
            Ok(MaxStableLaw::Gumbel.entropy()),
            1.577_215_664_9,
            1e-10,
        ),
        close(
            S,
            "H(weibull 1) = 1".into(),
            Ok(MaxStableLaw::Weibull { alpha: 1.0 }.entropy()),
            1.0,
            1e-12,
        ),
    ];
    for law in limit_laws() {
        for k in 1..=5u64 {
            let tol = if k == 1 { 1e-7 } else { 1e-6 };
            let kth = match KthExtremeLimit::new(law, k) {
                Ok(kth) => kth,
                Err(e) => {
                    out.push(failed(S, format!("{law:?} k={k}"), e));
                    continue;
                }
            };
            let q = differential_entropy(&kth, spec).map(|e| e.value);
            out.push(close(
                S,
                format!("limit entropy {law:?} k={k}"),
                q,
                kth.entropy(),
                tol,
            ));
        }
    }
    for k in 1..=12u64 {
        let km1 = (k - 1) as i32;
        let q = integrate_pieces(
            |u: f64| u.powi(km1) * (-u).exp() * u.ln(),
            &[0.0, 1.0, k as f64, f64::INFINITY],
            spec,
        )
        .map(|e| e.value);
        match a_of_k(k) {
            Ok(exact) => out.push(close(
                S,
                format!("A({k})"),
                q,
                exact,
                1e-8 * exact.abs().max(1.0),
            )),
            Err(e) => out.push(failed(S, format!("A({k})"), e)),
        }
    }
    let cases: Vec<(WorkedFamily, u64)> = ORACLE_FAMILIES
        .iter()
        .flat_map(|&f| [1u64, 2, 10, 100, 10_000].map(|n| (f, n)))
        .collect();
    let finite: Vec<Vec<Check>> = cases
        .par_iter()
        .map(|&(fam, n)| {
            let law = match FiniteSampleLaw::new(fam.parent(), fam.closed_form_norming(), n, 1) {
                Ok(l) => l,
                Err(e) => return vec![failed(S, format!("{fam} n={n}"), e)],
            };
            let limit = KthExtremeLimit::from(fam.limit());
            let h_exact = fam.exact_maximum_entropy(n).unwrap_or(f64::NAN);
            let d_exact = fam.exact_maximum_kl(n).unwrap_or(f64::NAN);
            vec![
                close(
                    S,
                    format!("H {fam} n={n}"),
                    entropy_of(&law, spec),
                    h_exact,
                    1e-6,
                ),
                close(
                    S,
                    format!("KL {fam} n={n}"),
                    kl_of(&law, &limit, spec),
                    d_exact,
                    1e-6,
                ),
            ]
        })
        .collect();
    out.extend(finite.into_iter().flatten());
    let n = 1_000_000u64;
    out.push(close(
        S,
        "H_n - ln n at n = 10^6".into(),
        harmonic(n).map(|h| h - (n as f64).ln()),
        EULER_GAMMA,
        1e-6,
    ));
    out
}

/// Simulated means against exact and limiting values, `SE_BANDS` standard errors.
pub fn montecarlo(seed: u64) -> Vec<Check> {
    const S: &str = "montecarlo";
    let mut out = Vec::new();
    match check_exponential_max_means(&[100, 1_000], REPLICATIONS, seed) {
        Ok(rows) => {
            for r in rows {
                out.push(check(
                    S,
                    format!("mean of Z_n - ln n at n = {}", r.n),
                    r.empirical.covers(r.exact_mean, SE_BANDS),
                    format!(
                        "{} ± {} vs {}",
                        r.empirical.mean, r.empirical.std_error, r.exact_mean
                    ),
                ));
            }
        }
        Err(e) => out.push(failed(S, "exponential maxima means", e)),
    }
    for fam in [
        WorkedFamily::Pareto { alpha: 3.0 },
        WorkedFamily::Uniform01,
        WorkedFamily::Exponential,
    ] {
        let name = format!("first moment {fam} n = 10^4");
        match check_moment_convergence(
            &fam.parent(),
            &fam.closed_form_norming(),
            fam.limit(),
            1,
            &[10_000],
            REPLICATIONS,
            seed,
        ) {
            Ok(rows) => {
                let r = rows[0];
                out.push(check(
                    S,
                    name,
                    r.empirical.covers(r.limit, SE_BANDS),
                    format!(
                        "{} ± {} vs {}",
                        r.empirical.mean, r.empirical.std_error, r.limit
                    ),
                ));
            }
            Err(e) => out.push(failed(S, name, e)),
        }
    }
    out
}

/// Qualitative shapes of the figure commands and the classifier verdicts.
pub fn figures(spec: &QuadratureSpec) -> Vec<Check> {
    const S: &str = "figures";
    let mut out = Vec::new();
    let grid: Vec<u64> = (2..=100).collect();
    for fam in [
        WorkedFamily::Pareto { alpha: 2.0 },
        WorkedFamily::Uniform01,
        WorkedFamily::Exponential,
        WorkedFamily::StdNormal,
    ] {
        let report = convergence_sweep(
            &fam.parent(),
            &fam.closed_form_norming(),
            fam.limit(),
            &grid,
            1,
            spec,
        );
        match report {
            Ok(r) => {
                let slack = 2.0 * spec.abs_tol;
                let increasing = increasing_with_slack(&r.entropy_values, slack);
                let (passed, want) = if fam == WorkedFamily::StdNormal {
                    (!increasing, "non-monotone")
                } else {
                    (increasing, "increasing")
                };
                out.push(check(
                    S,
                    format!("H over n = 2..100 {fam} {want}"),
                    passed,
                    format!("last gap {}", r.gaps[r.gaps.len() - 1]),
                ));
                let min_kl = r.kl_values.iter().copied().fold(f64::INFINITY, f64::min);
                out.push(check(
                    S,
                    format!("KL >= 0 {fam}"),
                    min_kl >= 0.0,
                    format!("min {min_kl}"),
                ));
            }
            Err(e) => out.push(failed(S, format!("entropy curve {fam}"), e)),
        }
    }

    let fam = WorkedFamily::StdNormal;
    let limit = KthExtremeLimit::from(MaxStableLaw::Gumbel);
    let gaps: Result<Vec<f64>> = [100u64, 1_000, 10_000, 100_000]
        .par_iter()
        .map(|&n| {
            sweep_row(&fam.parent(), &fam.closed_form_norming(), &limit, n, spec).map(|r| r.gap)
        })
        .collect();
    out.push(match gaps {
        Ok(g) => check(
            S,
            "normal gap decreasing over 10^2..10^5",
            g.windows(2).all(|w| w[1] < w[0]),
            format!("{g:?}"),
        ),
        Err(e) => failed(S, "normal gap", e),
    });

    for fam in [
        WorkedFamily::Pareto { alpha: 2.0 },
        WorkedFamily::Exponential,
        WorkedFamily::Uniform01,
    ] {
        for n in 2..=5u64 {
            let mass = FiniteSampleLaw::new(fam.parent(), fam.closed_form_norming(), n, 1)
                .and_then(|law| total_mass(&law, spec));
            out.push(close(
                S,
                format!("density mass {fam} n={n}"),
                mass,
                1.0,
                1e-6,
            ));
        }
    }
    let at_two: Result<Vec<f64>> = (3..=9u64)
        .map(|n| {
            FiniteSampleLaw::new(fam.parent(), fam.closed_form_norming(), n, 1)
                .map(|l| l.density(2.0))
        })
        .collect();
    out.push(match at_two {
        Ok(v) => check(
            S,
            "normal g_n(2) increasing over n = 3..9",
            v.windows(2).all(|w| w[1] > w[0]),
            format!("{v:?}"),
        ),
        Err(e) => failed(S, "normal g_n(2)", e),
    });

    let expectations = [
        (
            WorkedFamily::Pareto { alpha: 1.0 },
            DomainFamily::Frechet,
            Some(1.0),
        ),
        (
            WorkedFamily::Pareto { alpha: 3.0 },
            DomainFamily::Frechet,
            Some(3.0),
        ),
        (WorkedFamily::Uniform01, DomainFamily::Weibull, Some(1.0)),
        (WorkedFamily::Exponential, DomainFamily::Gumbel, None),
        (WorkedFamily::StdNormal, DomainFamily::Gumbel, None),
    ];
    for (fam, want, alpha) in expectations {
        for (loc, scale) in [(0.0, 1.0), (-3.0, 2.0), (10.0, 0.5)] {
            let v = match LocationScale::new(fam.parent(), loc, scale) {
                Ok(d) => classify(&d),
                Err(e) => {
                    out.push(failed(S, format!("classify {fam}"), e));
                    continue;
                }
            };
            let alpha_ok = match (alpha, v.alpha_estimate) {
                (None, _) => true,
                (Some(a), Some(est)) => (est - a).abs() <= 0.02 * a,
                (Some(_), None) => false,
            };
            out.push(check(
                S,
                format!("classify {fam} loc={loc} scale={scale}"),
                v.family == want && alpha_ok,
                v.to_string(),
            ));
        }
    }
    out
}

pub fn run_suite(suite: Suite, seed: u64, spec: &QuadratureSpec) -> Vec<Check> {
    match suite {
        Suite::Oracles => oracles(spec),
        Suite::Montecarlo => montecarlo(seed),
        Suite::Figures => figures(spec),
        Suite::All => {
            let mut all = oracles(spec);
            all.extend(montecarlo(seed));
            all.extend(figures(spec));
            all
        }
    }
}

/// Writes `suite,check,status,detail` rows.
pub fn write_table(checks: &[Check], w: &mut dyn io::Write) -> io::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["suite", "check", "status", "detail"])?;
    for c in checks {
        csv.write_record([
            c.suite,
            &c.name,
            if c.passed { "PASS" } else { "FAIL" },
            &c.detail,
        ])?;
    }
    csv.flush()
}

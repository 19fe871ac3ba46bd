//! Acceptance criteria. Runs without the libtest harness so the
//! `PASS`/`FAIL` line of every criterion is always printed; exits nonzero
//! when any criterion fails.

use std::time::{Duration, Instant};

use evt_entropy::entropy::{differential_entropy, increasing_with_slack, sweep_row};
use evt_entropy::montecarlo::{check_exponential_max_means, check_moment_convergence};
use evt_entropy::prelude::*;
use evt_entropy::quadrature::integrate_pieces;
use evt_entropy::special::{a_of_k, harmonic, EULER_GAMMA};
use evt_entropy_cli::commands::{
    cmd_density_panel, cmd_entropy_curve, default_curve_grid, default_panel_grid, XRange,
    DENSITY_PANEL_CSV, ENTROPY_CURVE_CSV,
};
use evt_entropy_cli::{RunConfig, DEFAULT_SEED};

const FAMILIES: [WorkedFamily; 4] = [
    WorkedFamily::Pareto { alpha: 2.0 },
    WorkedFamily::Uniform01,
    WorkedFamily::Exponential,
    WorkedFamily::StdNormal,
];

const ALPHAS: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

/// Collects failures so the single verdict line can list them all.
struct Criterion {
    id: u32,
    title: &'static str,
    budget: Duration,
    started: Instant,
    failures: Vec<String>,
}

impl Criterion {
    fn new(id: u32, title: &'static str, budget_secs: u64) -> Self {
        Criterion {
            id,
            title,
            budget: Duration::from_secs(budget_secs),
            started: Instant::now(),
            failures: Vec::new(),
        }
    }

    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(mut self) -> bool {
        let elapsed = self.started.elapsed();
        if elapsed > self.budget {
            self.failures
                .push(format!("took {elapsed:?}, budget {:?}", self.budget));
        }
        if self.failures.is_empty() {
            println!("PASS criterion {}: {} ({elapsed:.2?})", self.id, self.title);
        } else {
            println!("FAIL criterion {}: {} ({elapsed:.2?})", self.id, self.title);
            for f in &self.failures {
                println!("    {f}");
            }
        }
        self.failures.is_empty()
    }
}

fn criterion_01_closed_form_limit_entropies() -> Criterion {
    let mut c = Criterion::new(1, "closed-form limit entropies", 10);
    let h = MaxStableLaw::Gumbel.entropy();
    c.expect((h - 1.577_215_664_9).abs() < 1e-10, || {
        format!("H(gumbel) = {h}")
    });
    c.expect((h - (1.0 + EULER_GAMMA)).abs() < 1e-15, || {
        format!("H(gumbel) = {h}")
    });
    let h = MaxStableLaw::Weibull { alpha: 1.0 }.entropy();
    c.expect((h - 1.0).abs() < 1e-15, || format!("H(weibull 1) = {h}"));
    for a in ALPHAS {
        let frechet = 1.0 + EULER_GAMMA * (1.0 + 1.0 / a) - a.ln();
        let weibull = 1.0 + EULER_GAMMA * (1.0 - 1.0 / a) - a.ln();
        for (law, formula) in [
            (MaxStableLaw::Frechet { alpha: a }, frechet),
            (MaxStableLaw::Weibull { alpha: a }, weibull),
        ] {
            let closed = law.entropy();
            c.expect((closed - formula).abs() < 1e-13, || {
                format!("{law:?}: {closed} vs formula {formula}")
            });
        }
    }
    let mut laws = vec![MaxStableLaw::Gumbel];
    for a in ALPHAS {
        laws.push(MaxStableLaw::Frechet { alpha: a });
        laws.push(MaxStableLaw::Weibull { alpha: a });
    }
    for law in laws {
        match differential_entropy(&KthExtremeLimit::from(law), &spec()) {
            Ok(q) => c.expect((q.value - law.entropy()).abs() < 1e-7, || {
                format!("{law:?}: quadrature {} vs {}", q.value, law.entropy())
            }),
            Err(e) => c.expect(false, || format!("{law:?}: {e}")),
        }
    }
    c
}

fn criterion_02_finite_n_entropy_oracles() -> Criterion {
    let mut c = Criterion::new(2, "exact finite-n entropies", 60);
    for n in [1u64, 2, 10, 100, 10_000] {
        let nf = n as f64;
        let base = (nf - 1.0) / nf;
        let hn = harmonic(n).unwrap() - nf.ln();
        let cases = [
            (WorkedFamily::Uniform01, base),
            (WorkedFamily::Exponential, base + hn),
            (WorkedFamily::Pareto { alpha: 1.0 }, base + 2.0 * hn),
            (
                WorkedFamily::Pareto { alpha: 2.0 },
                base - 2f64.ln() + 1.5 * hn,
            ),
        ];
        for (fam, want) in cases {
            let law = FiniteSampleLaw::new(fam.parent(), fam.closed_form_norming(), n, 1).unwrap();
            match entropy_of(&law, &spec()) {
                Ok(h) => c.expect((h - want).abs() < 1e-6, || {
                    format!("{fam} n={n}: {h} vs {want}")
                }),
                Err(e) => c.expect(false, || format!("{fam} n={n}: {e}")),
            }
        }
    }
    c
}

fn criterion_03_relative_entropy_oracle() -> Criterion {
    let mut c = Criterion::new(3, "relative entropy 1/(n(n+1))", 60);
    let families = [
        WorkedFamily::Pareto { alpha: 2.0 },
        WorkedFamily::Uniform01,
        WorkedFamily::Exponential,
    ];
    for fam in families {
        let limit = KthExtremeLimit::from(fam.limit());
        let kl = |n: u64| {
            let law = FiniteSampleLaw::new(fam.parent(), fam.closed_form_norming(), n, 1).unwrap();
            kl_of(&law, &limit, &spec())
        };
        for n in [1u64, 10, 100] {
            let want = 1.0 / (n as f64 * (n + 1) as f64);
            match kl(n) {
                Ok(d) => c.expect((d - want).abs() < 1e-6, || {
                    format!("{fam} n={n}: {d} vs {want}")
                }),
                Err(e) => c.expect(false, || format!("{fam} n={n}: {e}")),
            }
        }
        for n in (1..=100).chain([1_000, 10_000, 100_000]) {
            match kl(n) {
                Ok(d) => c.expect(d >= -1e-9, || format!("{fam} n={n}: D = {d} < 0")),
                Err(e) => c.expect(false, || format!("{fam} n={n}: {e}")),
            }
        }
        match kl(10_000) {
            Ok(d) => c.expect(d < 1e-7, || format!("{fam} n=1e4: D = {d}")),
            Err(e) => c.expect(false, || format!("{fam} n=1e4: {e}")),
        }
    }
    c
}

fn criterion_04_monotonicity() -> Criterion {
    let mut c = Criterion::new(4, "H increasing in n, except for the normal", 120);
    let s = spec();
    let grid: Vec<u64> = (2..=100).collect();
    for fam in FAMILIES {
        let report = convergence_sweep(
            &fam.parent(),
            &fam.closed_form_norming(),
            fam.limit(),
            &grid,
            1,
            &s,
        )
        .unwrap();
        let h = &report.entropy_values;
        let increasing = increasing_with_slack(h, 2.0 * s.abs_tol);
        if fam == WorkedFamily::StdNormal {
            let decreases = h.windows(2).filter(|w| w[1] < w[0]).count();
            c.expect(decreases >= 1, || "normal H never decreases".into());
        } else {
            let worst = h
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::INFINITY, f64::min);
            c.expect(increasing, || format!("{fam}: smallest step {worst}"));
        }
    }
    c
}

fn criterion_05_normal_gap_trend() -> Criterion {
    let mut c = Criterion::new(5, "normal entropy gap decreases over 10^2..10^5", 180);
    let fam = WorkedFamily::StdNormal;
    let limit = KthExtremeLimit::from(MaxStableLaw::Gumbel);
    let gaps: Vec<f64> = [100u64, 1_000, 10_000, 100_000]
        .iter()
        .map(|&n| {
            sweep_row(
                &fam.parent(),
                &fam.closed_form_norming(),
                &limit,
                n,
                &spec(),
            )
            .unwrap()
            .gap
        })
        .collect();
    c.expect(gaps.windows(2).all(|w| w[1] < w[0]), || {
        format!("gaps {gaps:?}")
    });
    c
}

fn criterion_06_kth_extremes() -> Criterion {
    let mut c = Criterion::new(6, "k-th extremes", 120);
    let s = spec();
    for k in 1..=12u64 {
        let km1 = (k - 1) as i32;
        let q = integrate_pieces(
            |u: f64| u.powi(km1) * (-u).exp() * u.ln(),
            &[0.0, 1.0, k as f64, f64::INFINITY],
            &s,
        )
        .unwrap()
        .value;
        let a = a_of_k(k).unwrap();
        c.expect((q - a).abs() < 1e-8 * a.abs().max(1.0), || {
            format!("A({k}) = {a}, quadrature {q}")
        });
    }
    let mut laws = vec![MaxStableLaw::Gumbel];
    for a in ALPHAS {
        laws.push(MaxStableLaw::Frechet { alpha: a });
        laws.push(MaxStableLaw::Weibull { alpha: a });
    }
    for law in laws {
        for k in 1..=5 {
            let kth = KthExtremeLimit::new(law, k).unwrap();
            match differential_entropy(&kth, &s) {
                Ok(q) => c.expect((q.value - kth.entropy()).abs() < 1e-6, || {
                    format!("{law:?} k={k}: {} vs {}", kth.entropy(), q.value)
                }),
                Err(e) => c.expect(false, || format!("{law:?} k={k}: {e}")),
            }
        }
    }
    for k in [2u64, 3] {
        let fam = WorkedFamily::Exponential;
        let law = FiniteSampleLaw::new(fam.parent(), fam.closed_form_norming(), 10_000, k).unwrap();
        let h = entropy_of(&law, &s).unwrap();
        let lim = KthExtremeLimit::new(MaxStableLaw::Gumbel, k)
            .unwrap()
            .entropy();
        c.expect((h - lim).abs() < 5e-3, || {
            format!("exponential k={k}: {h} vs {lim}")
        });
    }
    c
}

fn criterion_07_exponential_maxima_means() -> Criterion {
    let mut c = Criterion::new(7, "means of exponential maxima", 60);
    let n = 1_000_000u64;
    let exact = harmonic(n).unwrap() - (n as f64).ln();
    c.expect((exact - EULER_GAMMA).abs() < 1e-6, || {
        format!("H_n - ln n = {exact} at n = 1e6")
    });
    for row in check_exponential_max_means(&[100, 1_000], 100_000, DEFAULT_SEED).unwrap() {
        let e = row.empirical;
        c.expect(e.covers(row.exact_mean, 3.0), || {
            format!(
                "n={}: {} ± {} vs {}",
                row.n, e.mean, e.std_error, row.exact_mean
            )
        });
    }
    c
}

fn criterion_08_moment_convergence() -> Criterion {
    let mut c = Criterion::new(8, "first moments of normalized maxima", 120);
    // Γ(2/3), Γ(2), Euler's constant
    let cases = [
        (WorkedFamily::Pareto { alpha: 3.0 }, 1.354_117_939_426_400_4),
        (WorkedFamily::Uniform01, -1.0),
        (WorkedFamily::Exponential, 0.577_215_664_901_532_9),
    ];
    for (fam, want) in cases {
        let rows = check_moment_convergence(
            &fam.parent(),
            &fam.closed_form_norming(),
            fam.limit(),
            1,
            &[10_000],
            100_000,
            DEFAULT_SEED,
        )
        .unwrap();
        let r = rows[0];
        c.expect((r.limit - want).abs() < 1e-12, || {
            format!("{fam}: limit {} vs {want}", r.limit)
        });
        c.expect(r.empirical.covers(want, 3.0), || {
            format!(
                "{fam}: {} ± {} vs {want}",
                r.empirical.mean, r.empirical.std_error
            )
        });
    }
    c
}

fn criterion_09_classification() -> Criterion {
    let mut c = Criterion::new(9, "domain of attraction verdicts", 30);
    let cases = [
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
    for (fam, want, alpha) in cases {
        for (loc, scale) in [
            (0.0, 1.0),
            (-3.0, 2.0),
            (10.0, 0.5),
            (1e3, 50.0),
            (-0.25, 1e-3),
        ] {
            let v = classify(&LocationScale::new(fam.parent(), loc, scale).unwrap());
            c.expect(v.family == want, || {
                format!("{fam} at ({loc}, {scale}): {v}")
            });
            if let Some(a) = alpha {
                let ok = v
                    .alpha_estimate
                    .is_some_and(|est| (est - a).abs() <= 0.02 * a);
                c.expect(ok, || format!("{fam} at ({loc}, {scale}): {v}"));
            }
        }
    }
    c
}

fn column(csv_path: &std::path::Path, name: &str) -> Vec<f64> {
    let mut rdr = csv::Reader::from_path(csv_path).unwrap();
    let idx = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == name)
        .unwrap();
    rdr.records()
        .map(|r| r.unwrap()[idx].parse().unwrap())
        .collect()
}

fn criterion_10_figure_reproduction() -> Criterion {
    let mut c = Criterion::new(10, "entropy curves and density panels", 300);
    let dir = tempfile::tempdir().unwrap();
    for fam in FAMILIES {
        let out = dir.path().join(fam.label());
        let cfg = RunConfig::new(fam, default_curve_grid(), 1).with_out(&out);
        cmd_entropy_curve(&cfg).unwrap();
        let path = out.join(ENTROPY_CURVE_CSV);
        let n = column(&path, "n");
        c.expect(n.first() == Some(&2.0) && n.last() == Some(&100.0), || {
            format!("{fam}: grid {n:?}")
        });
        let h = column(&path, "H");
        let gap = column(&path, "gap");
        let kl = column(&path, "KL");
        c.expect(kl.iter().all(|&d| d >= 0.0), || {
            format!("{fam}: negative KL")
        });
        if fam == WorkedFamily::StdNormal {
            c.expect(h.windows(2).any(|w| w[1] < w[0]), || {
                "normal H monotone".into()
            });
        } else {
            c.expect(increasing_with_slack(&h, 2.0 * cfg.spec.abs_tol), || {
                format!("{fam}: H not increasing")
            });
            c.expect(gap[gap.len() - 1] < gap[0], || {
                format!("{fam}: gap did not shrink")
            });
        }

        let cfg = RunConfig::new(fam, default_panel_grid(fam), 1).with_out(&out);
        let panel = cmd_density_panel(&cfg, &XRange::default()).unwrap().panel;
        for (n, m) in &panel.masses {
            c.expect((m - 1.0).abs() < 1e-6, || format!("{fam} n={n}: mass {m}"));
        }
        let path = out.join(DENSITY_PANEL_CSV);
        let limit = column(&path, "limit");
        c.expect(limit.iter().all(|v| v.is_finite() && *v >= 0.0), || {
            format!("{fam}: limit column")
        });
        for n in default_panel_grid(fam) {
            let g = column(&path, &format!("g_{n}"));
            c.expect(g.iter().all(|v| v.is_finite() && *v >= 0.0), || {
                format!("{fam}: g_{n} column")
            });
        }
    }
    // normal panel: g_n(2) rises with n across the default grid
    let fam = WorkedFamily::StdNormal;
    let cfg = RunConfig::new(fam, default_panel_grid(fam), 1);
    let at_two = evt_entropy_cli::commands::density_panel(
        &cfg,
        &XRange {
            min: Some(2.0),
            max: Some(3.0),
            points: 2,
        },
    )
    .unwrap()
    .curves
    .iter()
    .map(|(_, g)| g[0])
    .collect::<Vec<_>>();
    c.expect(at_two.windows(2).all(|w| w[1] > w[0]), || {
        format!("normal g_n(2): {at_two:?}")
    });
    c
}

fn main() {
    let criteria: [fn() -> Criterion; 10] = [
        criterion_01_closed_form_limit_entropies,
        criterion_02_finite_n_entropy_oracles,
        criterion_03_relative_entropy_oracle,
        criterion_04_monotonicity,
        criterion_05_normal_gap_trend,
        criterion_06_kth_extremes,
        criterion_07_exponential_maxima_means,
        criterion_08_moment_convergence,
        criterion_09_classification,
        criterion_10_figure_reproduction,
    ];
    let mut failed = 0;
    for (i, run) in criteria.into_iter().enumerate() {
        let passed = match std::panic::catch_unwind(run) {
            Ok(c) => c.finish(),
            Err(_) => {
                println!("FAIL criterion {}: panicked", i + 1);
                false
            }
        };
        failed += usize::from(!passed);
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

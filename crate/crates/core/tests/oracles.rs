use evt_entropy::max_stable::KthExtremeLimit;
use evt_entropy::prelude::*;
use evt_entropy::quadrature::{integrate, integrate_pieces};
use evt_entropy::special::{a_of_k, gumbel_moment};

const ALL: [WorkedFamily; 4] = [
    WorkedFamily::Pareto { alpha: 2.0 },
    WorkedFamily::Uniform01,
    WorkedFamily::Exponential,
    WorkedFamily::StdNormal,
];

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn maxima(family: WorkedFamily, n: u64, k: u64) -> FiniteSampleLaw {
    FiniteSampleLaw::new(family.parent(), family.closed_form_norming(), n, k).unwrap()
}

fn central_grid(target: MaxStableLaw) -> Vec<f64> {
    (0..21)
        .map(|i| target.quantile(0.05 + 0.045 * i as f64).unwrap())
        .collect()
}

#[test]
fn a_of_k_matches_its_integral() {
    for k in 1..=12u64 {
        let km1 = (k - 1) as i32;
        let q = integrate_pieces(
            |u: f64| u.powi(km1) * (-u).exp() * u.ln(),
            &[0.0, 1.0, k as f64, f64::INFINITY],
            &spec(),
        )
        .unwrap()
        .value;
        let exact = a_of_k(k).unwrap();
        assert!(
            (q - exact).abs() < 1e-8 * exact.abs().max(1.0),
            "k = {k}: {q} vs {exact}"
        );
    }
}

#[test]
fn gumbel_second_moment_matches_quadrature() {
    let g = MaxStableLaw::Gumbel;
    let m2 = integrate(|x: f64| x * x * g.pdf(x), -40.0, f64::INFINITY, &spec())
        .unwrap()
        .value;
    assert!((m2 - gumbel_moment(2).unwrap()).abs() < 1e-9);
    let m1 = integrate(|x: f64| x * g.pdf(x), -40.0, f64::INFINITY, &spec())
        .unwrap()
        .value;
    assert!((m1 - gumbel_moment(1).unwrap()).abs() < 1e-10);
}

#[test]
fn finite_n_oracles_for_maxima() {
    let s = spec();
    let families = [
        WorkedFamily::Uniform01,
        WorkedFamily::Exponential,
        WorkedFamily::Pareto { alpha: 1.0 },
        WorkedFamily::Pareto { alpha: 2.0 },
    ];
    for fam in families {
        let limit = KthExtremeLimit::from(fam.limit());
        for n in [1u64, 2, 10, 100, 10_000] {
            let law = maxima(fam, n, 1);
            let h = entropy_of(&law, &s).unwrap();
            let exact = fam.exact_maximum_entropy(n).unwrap();
            assert!((h - exact).abs() < 1e-6, "{fam} n={n}: H {h} vs {exact}");
            let d = kl_of(&law, &limit, &s).unwrap();
            let exact = fam.exact_maximum_kl(n).unwrap();
            assert!((d - exact).abs() < 1e-6, "{fam} n={n}: D {d} vs {exact}");
        }
    }
}

#[test]
fn gaps_at_large_n() {
    let s = spec();
    for fam in [
        WorkedFamily::Pareto { alpha: 2.0 },
        WorkedFamily::Uniform01,
        WorkedFamily::Exponential,
    ] {
        let h = entropy_of(&maxima(fam, 10_000, 1), &s).unwrap();
        assert!((h - fam.limit().entropy()).abs() < 1e-3, "{fam}");
    }
    let gaps: Vec<f64> = [100u64, 1_000, 10_000]
        .iter()
        .map(|&n| {
            let h = entropy_of(&maxima(WorkedFamily::StdNormal, n, 1), &s).unwrap();
            (h - MaxStableLaw::Gumbel.entropy()).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn kth_extremes_of_exponential_converge() {
    let s = spec();
    for k in [2u64, 3] {
        let h = entropy_of(&maxima(WorkedFamily::Exponential, 10_000, k), &s).unwrap();
        let lim = KthExtremeLimit::new(MaxStableLaw::Gumbel, k)
            .unwrap()
            .entropy();
        assert!((h - lim).abs() < 5e-3, "k = {k}: {h} vs {lim}");
    }
}

#[test]
fn densities_converge_on_compact_grids() {
    for fam in ALL {
        for k in [1u64, 2] {
            let limit = KthExtremeLimit::new(fam.limit(), k).unwrap();
            let grid = central_grid(fam.limit());
            let sup: Vec<f64> = [100u64, 1_000, 10_000]
                .iter()
                .map(|&n| {
                    let law = maxima(fam, n, k);
                    grid.iter()
                        .map(|&x| (law.density(x) - limit.pdf(x)).abs())
                        .fold(0.0, f64::max)
                })
                .collect();
            assert!(sup.windows(2).all(|w| w[1] < w[0]), "{fam} k={k}: {sup:?}");
        }
    }
}

#[test]
fn maxima_laws_converge() {
    for fam in ALL {
        let target = fam.limit();
        let grid = central_grid(target);
        let worst = |n: u64| {
            let law = maxima(fam, n, 1);
            grid.iter()
                .map(|&x| (law.cdf(x) - target.cdf(x)).abs())
                .fold(0.0, f64::max)
        };
        let errs = [worst(100), worst(1_000), worst(10_000)];
        if fam == WorkedFamily::StdNormal {
            // log-rate convergence: about 0.04 still at n = 10^4
            assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
            assert!(errs[2] < 0.05);
        } else {
            assert!(errs[2] <= 0.02, "{fam}: {errs:?}");
        }
    }
}

#[test]
fn tail_equivalence_improves_with_n() {
    use evt_entropy::classify::tail_equivalence;
    for fam in ALL {
        let parent = fam.parent();
        let grid = central_grid(fam.limit());
        let worst: Vec<f64> = [100u64, 1_000, 10_000]
            .iter()
            .map(|&n| {
                tail_equivalence(parent.as_ref(), &fam.closed_form_norming(), n, &grid)
                    .unwrap()
                    .into_iter()
                    .map(|(_, l, r)| (l - r).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        if fam == WorkedFamily::StdNormal {
            assert!(worst.windows(2).all(|w| w[1] < w[0]), "{worst:?}");
        } else {
            // exact for every n in these three families
            assert!(worst.iter().all(|&w| w < 1e-9), "{fam}: {worst:?}");
        }
    }
}

#[test]
fn limit_laws_are_normalized() {
    let s = spec();
    for alpha in [0.5, 1.0, 2.0, 5.0] {
        for law in [
            MaxStableLaw::Frechet { alpha },
            MaxStableLaw::Weibull { alpha },
            MaxStableLaw::Gumbel,
        ] {
            for k in 1..=5 {
                let kth = KthExtremeLimit::new(law, k).unwrap();
                let mass = evt_entropy::entropy::total_mass(&kth, &s).unwrap();
                assert!((mass - 1.0).abs() < 1e-8, "{law:?} k={k}");
                let (_, hi) = kth.support();
                let far = if hi.is_finite() { hi } else { 1e300 };
                assert!((kth.cdf(far) - 1.0).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn kth_cdf_derivative_is_the_density() {
    for law in [
        MaxStableLaw::Frechet { alpha: 2.0 },
        MaxStableLaw::Weibull { alpha: 3.0 },
        MaxStableLaw::Gumbel,
    ] {
        for k in 1..=5 {
            let kth = KthExtremeLimit::new(law, k).unwrap();
            for i in 1..20 {
                let x = kth.quantile_lower(i as f64 / 20.0).unwrap();
                let h = 1e-5 * (1.0 + x.abs());
                let num = (kth.cdf(x + h) - kth.cdf(x - h)) / (2.0 * h);
                assert!((num - kth.pdf(x)).abs() < 1e-6, "{law:?} k={k} x={x}");
            }
        }
    }
}

//! Globally adaptive Gauss–Kronrod (10/21-point) quadrature.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs_tol, rel_tol·|I|)`. Error estimates are rescaled the
//! way QUADPACK's `qk21` does, which is far less pessimistic than the raw
//! Gauss/Kronrod difference on smooth integrands.
//!
//! Infinite endpoints are handled by the map `x = a + c·s/(1 - s)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::{EvtError, Result};

/// Tolerances and truncation rule shared by every quadrature in the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Probability mass a law may leave outside a truncated integration window.
    pub tail_cut: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-11,
            rel_tol: 1e-11,
            max_subdivisions: 4000,
            tail_cut: 1e-12,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(EvtError::domain("quadrature tolerances must be positive"));
        }
        if self.max_subdivisions == 0 {
            return Err(EvtError::domain("max_subdivisions must be positive"));
        }
        if !(self.tail_cut > 0.0 && self.tail_cut < 0.5) {
            return Err(EvtError::domain("tail_cut must lie in (0, 0.5)"));
        }
        Ok(())
    }
}

/// Result of a converged quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_error: f64,
    pub subdivisions: usize,
    pub evaluations: usize,
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| -> Result<f64> {
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvtError::domain(format!(
                "integrand is not finite at x = {x}: {v}"
            )))
        }
    };
    let fc = eval(center)?;
    let mut res_g = 0.0;
    let mut res_k = fc * WGK[10];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = eval(center - dx)?;
        let f2 = eval(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut err = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Panel {
        a,
        b,
        value,
        error: err,
    })
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Adaptive integration of a finite-valued `f` over consecutive pieces
/// `[breaks[i], breaks[i+1]]`. The outer breaks may be infinite; inner ones
/// must be finite and nondecreasing.
pub fn integrate_pieces<F>(f: F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if breaks.len() < 2 {
        return Err(EvtError::domain("need at least two break points"));
    }
    if breaks.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(EvtError::domain(format!(
            "break points not sorted: {breaks:?}"
        )));
    }
    if breaks[1..breaks.len() - 1].iter().any(|x| !x.is_finite()) {
        return Err(EvtError::domain("inner break points must be finite"));
    }

    // Each finite piece is integrated directly; infinite outer pieces go
    // through s ∈ [0, 1) with x = edge ± c·s/(1-s).
    let last = breaks.len() - 2;
    let mut queue: BinaryHeap<Keyed> = BinaryHeap::new();
    let mut frozen: Vec<Panel> = Vec::new();
    let mut mapped: Vec<Box<dyn Fn(f64) -> f64 + '_>> = Vec::new();
    let f = &f;
    let mut pieces: Vec<(f64, f64)> = Vec::new();
    for (i, w) in breaks.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let neighbour_width = |j: usize| -> f64 {
            breaks
                .get(j)
                .zip(breaks.get(j + 1))
                .map(|(x, y)| (y - x).abs())
                .filter(|w| w.is_finite() && *w > 0.0)
                .unwrap_or(1.0)
        };
        if a.is_infinite() && b.is_infinite() {
            mapped.push(Box::new(move |s: f64| {
                let t = s / (1.0 - s * s);
                let dt = (1.0 + s * s) / (1.0 - s * s).powi(2);
                let v = f(t);
                if v == 0.0 {
                    0.0
                } else {
                    v * dt
                }
            }));
            pieces.push((-1.0, 1.0));
        } else if a.is_infinite() {
            let c = b.abs().max(if i < last {
                neighbour_width(i + 1)
            } else {
                1.0
            });
            mapped.push(Box::new(move |s: f64| {
                let v = f(b - c * s / (1.0 - s));
                if v == 0.0 {
                    0.0
                } else {
                    v * c / ((1.0 - s) * (1.0 - s))
                }
            }));
            pieces.push((0.0, 1.0));
        } else if b.is_infinite() {
            let c = a
                .abs()
                .max(if i > 0 { neighbour_width(i - 1) } else { 1.0 });
            mapped.push(Box::new(move |s: f64| {
                let v = f(a + c * s / (1.0 - s));
                if v == 0.0 {
                    0.0
                } else {
                    v * c / ((1.0 - s) * (1.0 - s))
                }
            }));
            pieces.push((0.0, 1.0));
        } else {
            mapped.push(Box::new(move |x: f64| f(x)));
            pieces.push((a, b));
        }
    }
    if pieces.is_empty() {
        return Ok(Estimate {
            value: 0.0,
            abs_error: 0.0,
            subdivisions: 0,
            evaluations: 0,
        });
    }

    let mut evaluations = 0usize;
    let mut total = 0.0;
    let mut total_err = 0.0;
    for (idx, &(a, b)) in pieces.iter().enumerate() {
        let p = gk21(&mapped[idx], a, b)?;
        evaluations += 21;
        total += p.value;
        total_err += p.error;
        queue.push(Keyed(p, idx));
    }
    let mut subdivisions = pieces.len();

    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err <= tol {
            break;
        }
        let Some(Keyed(worst, idx)) = queue.pop() else {
            return Err(EvtError::Quadrature {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        let width = worst.b - worst.a;
        if width <= 200.0 * f64::EPSILON * worst.a.abs().max(worst.b.abs()).max(f64::MIN_POSITIVE)
            || mid <= worst.a
            || mid >= worst.b
        {
            frozen.push(worst);
            continue;
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(EvtError::Quadrature {
                estimate: total,
                error: total_err,
                subdivisions,
            });
        }
        let left = gk21(&mapped[idx], worst.a, mid)?;
        let right = gk21(&mapped[idx], mid, worst.b)?;
        evaluations += 42;
        subdivisions += 1;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        queue.push(Keyed(left, idx));
        queue.push(Keyed(right, idx));
    }

    let panels: Vec<Panel> = queue.into_iter().map(|k| k.0).chain(frozen).collect();
    Ok(Estimate {
        value: compensated_sum(panels.iter().map(|p| p.value)),
        abs_error: panels.iter().map(|p| p.error).sum(),
        subdivisions,
        evaluations,
    })
}

#[derive(Debug, PartialEq, Eq)]
struct Keyed(Panel, usize);
impl PartialOrd for Keyed {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Keyed {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

/// Adaptive integration of `f` over `[a, b]`; either end may be infinite.
pub fn integrate<F>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if a > b {
        let r = integrate(f, b, a, spec)?;
        return Ok(Estimate {
            value: -r.value,
            ..r
        });
    }
    integrate_pieces(f, &[a, b], spec)
}

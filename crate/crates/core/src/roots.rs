//! Safeguarded scalar root finding for monotone functions.

use crate::{EvtError, Result};

/// Solves `g(x) = 0` for a nondecreasing `g` on `[lo, hi]`, where `g(lo) <= 0 <= g(hi)`.
///
/// `g` returns the value together with its derivative. Newton steps are taken
/// whenever they land strictly inside the current bracket, bisection otherwise.
pub(crate) fn solve_increasing<G>(g: G, mut lo: f64, mut hi: f64, guess: Option<f64>) -> Result<f64>
where
    G: Fn(f64) -> (f64, f64),
{
    if !(lo <= hi) {
        return Err(EvtError::RootFinding(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut x = match guess {
        Some(x) if x > lo && x < hi => x,
        _ => 0.5 * (lo + hi),
    };
    for _ in 0..400 {
        let (v, d) = g(x);
        if v == 0.0 {
            return Ok(x);
        }
        if v.is_nan() {
            return Err(EvtError::RootFinding(format!("NaN at x = {x}")));
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = if d > 0.0 && d.is_finite() && v.is_finite() {
            x - v / d
        } else {
            f64::NAN
        };
        let next = if newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let tol = 4.0 * f64::EPSILON * next.abs() + f64::MIN_POSITIVE;
        if (next - x).abs() <= tol || hi - lo <= tol {
            return Ok(next);
        }
        x = next;
    }
    Err(EvtError::RootFinding(format!(
        "no convergence within bracket [{lo}, {hi}]"
    )))
}

/// Grows a bracket `[lo, hi]` with `sign(g(lo)) <= 0 <= sign(g(hi))` for a
/// nondecreasing `g`, starting from `start` and doubling the step. Finite
/// `left`/`right` limits are used as-is.
pub(crate) fn bracket_increasing<G>(g: G, left: f64, right: f64, start: f64) -> Result<(f64, f64)>
where
    G: Fn(f64) -> f64,
{
    let lo = if left.is_finite() {
        left
    } else {
        let mut step = 1.0_f64.max(start.abs());
        let mut x = start.min(right - step);
        let mut tries = 0;
        while g(x) > 0.0 {
            x -= step;
            step *= 2.0;
            tries += 1;
            if tries > 2000 || !x.is_finite() {
                return Err(EvtError::RootFinding("could not bracket from below".into()));
            }
        }
        x
    };
    let hi = if right.is_finite() {
        right
    } else {
        let mut step = 1.0_f64.max(start.abs());
        let mut x = start.max(lo + step);
        let mut tries = 0;
        while g(x) < 0.0 {
            x += step;
            step *= 2.0;
            tries += 1;
            if tries > 2000 || !x.is_finite() {
                return Err(EvtError::RootFinding("could not bracket from above".into()));
            }
        }
        x
    };
    Ok((lo, hi))
}

//! Special constants and functions used by the closed-form entropies.
//!
//! Everything here is real-argument, double precision and pure.

use crate::{EvtError, Result};

/// Euler–Mascheroni constant γ = lim (H_n - ln n).
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Largest `n` for which [`harmonic`] sums the series term by term. Beyond it
/// the asymptotic expansion is used, whose truncation error at this crossover
/// is below 1e-30.
pub const HARMONIC_SUMMATION_LIMIT: u64 = 10_000_000;

/// The constants shared by the library together with the working precision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialConstants {
    pub euler_gamma: f64,
    /// Decimal digits carried by `f64` arithmetic throughout the crate.
    pub precision: u32,
}

pub const CONSTANTS: SpecialConstants = SpecialConstants {
    euler_gamma: EULER_GAMMA,
    precision: f64::DIGITS,
};

/// Harmonic number `H_n = 1 + 1/2 + ... + 1/n`.
///
/// Summed smallest term first, with compensation, up to [`HARMONIC_SUMMATION_LIMIT`]; above it
/// `γ + ln n + 1/(2n) - 1/(12n²) + 1/(120n⁴)`.
pub fn harmonic(n: u64) -> Result<f64> {
    if n == 0 {
        return Err(EvtError::domain("harmonic number needs n >= 1"));
    }
    Ok(harmonic_unchecked(n))
}

/// `H_n` with `H_0 = 0`.
pub(crate) fn harmonic_unchecked(n: u64) -> f64 {
    if n <= HARMONIC_SUMMATION_LIMIT {
        crate::quadrature::compensated_sum((1..=n).rev().map(|i| 1.0 / i as f64))
    } else {
        let x = n as f64;
        let inv2 = 1.0 / (x * x);
        EULER_GAMMA + x.ln() + 0.5 / x - inv2 / 12.0 + inv2 * inv2 / 120.0
    }
}

/// Digamma at a positive integer: `ψ(k) = -γ + H_{k-1}`.
pub fn digamma_int(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(EvtError::domain("digamma has a pole at 0"));
    }
    Ok(-EULER_GAMMA + harmonic_unchecked(k - 1))
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    // z = x - 1
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Euler Gamma function for `x > 0` (Lanczos, g = 7, nine terms).
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(EvtError::domain(format!("gamma_fn needs x > 0, got {x}")));
    }
    Ok(gamma_positive(x))
}

pub(crate) fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos argument in its accurate range.
        return gamma_positive(x + 1.0) / x;
    }
    if x == x.floor() && x <= 21.0 {
        return factorial_table(x as usize - 1);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // Split the power so that t^(z+0.5) does not overflow before e^{-t} applies.
    let half = t.powf(0.5 * (z + 0.5));
    (2.0 * std::f64::consts::PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(z)
}

fn factorial_table(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Natural log of Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(EvtError::domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(ln_gamma_positive(x))
}

pub(crate) fn ln_gamma_positive(x: f64) -> f64 {
    if x < 12.0 {
        return gamma_positive(x).ln();
    }
    // Stirling series; the first omitted term is below 1e-17 for x >= 12.
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let series =
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0))));
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series
}

/// `ln((k - 1)!)`.
pub(crate) fn ln_factorial_of_pred(k: u64) -> f64 {
    if k <= 1 {
        0.0
    } else {
        ln_gamma_positive(k as f64)
    }
}

/// `A(k) = ∫_0^∞ u^{k-1} e^{-u} ln u du = (k-1)! (-γ + H_{k-1})`.
///
/// The log-moment of a Gamma(k) variable scaled by `(k-1)!`; `A(1) = -γ`.
pub fn a_of_k(k: u64) -> Result<f64> {
    if k == 0 {
        return Err(EvtError::domain("A(k) needs k >= 1"));
    }
    Ok(gamma_positive(k as f64) * (-EULER_GAMMA + harmonic_unchecked(k - 1)))
}

/// Raw moment `E[X^k] = (-1)^k Γ^{(k)}(1)` of the standard Gumbel law, `k ∈ {1, 2}`.
pub fn gumbel_moment(k: u32) -> Result<f64> {
    match k {
        1 => Ok(EULER_GAMMA),
        2 => Ok(EULER_GAMMA * EULER_GAMMA + std::f64::consts::PI.powi(2) / 6.0),
        _ => Err(EvtError::domain(format!(
            "Gumbel moments are provided for k in {{1, 2}}, got {k}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1).unwrap(), 1.0);
        assert_eq!(harmonic(2).unwrap(), 1.5);
        assert!((harmonic(10).unwrap() - 2.928_968_253_968_253_8).abs() < 1e-15);
        assert!(harmonic(0).is_err());
    }

    #[test]
    fn harmonic_crossover_is_seamless() {
        let n = HARMONIC_SUMMATION_LIMIT;
        let summed = harmonic(n).unwrap();
        let x = n as f64;
        let asym = EULER_GAMMA + x.ln() + 0.5 / x - 1.0 / (12.0 * x * x);
        assert!((summed - asym).abs() < 1e-12);
        let above = harmonic(n + 1).unwrap();
        assert!((above - summed - 1.0 / (x + 1.0)).abs() < 1e-13);
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert!(rel(gamma_fn(0.5).unwrap(), 1.772_453_850_905_516) < 1e-14);
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        // 25-digit reference values
        assert!(rel(gamma_fn(2.0 / 3.0).unwrap(), 1.354_117_939_426_400_4) < 1e-13);
        assert!(rel(gamma_fn(0.1).unwrap(), 9.513_507_698_668_732) < 1e-13);
        assert!(rel(gamma_fn(50.0).unwrap(), 6.082_818_640_342_675e62) < 1e-13);
        assert!(rel(gamma_fn(30.5).unwrap(), 4.822_696_933_490_909e31) < 1e-12);
    }

    #[test]
    fn gamma_recurrence() {
        for n in 1..=20 {
            let x = n as f64 + 0.37;
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.3, 1.0, 2.5, 11.9, 12.0, 12.1, 40.0, 150.0] {
            let direct = gamma_fn(x).unwrap().ln();
            assert!((ln_gamma(x).unwrap() - direct).abs() < 1e-12 * direct.abs().max(1.0));
        }
        // ln(100!), 25-digit reference
        assert!(rel(ln_gamma(101.0).unwrap(), 363.739_375_555_563_5) < 1e-14);
    }

    #[test]
    fn a_of_k_values() {
        assert!((a_of_k(1).unwrap() + 0.577_215_664_901_532_9).abs() < 1e-15);
        assert!((a_of_k(2).unwrap() - 0.422_784_335_098_467_1).abs() < 1e-15);
        assert!((a_of_k(3).unwrap() - 1.845_568_670_196_934_2).abs() < 1e-14);
        assert!(a_of_k(0).is_err());
    }

    #[test]
    fn a_of_k_recurrence() {
        for k in 2..=12u64 {
            let lhs = a_of_k(k).unwrap();
            let rhs = (k - 1) as f64 * a_of_k(k - 1).unwrap() + gamma_fn((k - 1) as f64).unwrap();
            assert!(rel(lhs, rhs) < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn gumbel_moments() {
        assert!((gumbel_moment(1).unwrap() - 0.577_215_664_901_532_9).abs() < 1e-15);
        assert!((gumbel_moment(2).unwrap() - 1.978_111_990_655_943).abs() < 1e-14);
        assert!(gumbel_moment(3).is_err());
        assert!(gumbel_moment(0).is_err());
    }

    #[test]
    fn constants_record_precision() {
        assert_eq!(CONSTANTS.precision, 15);
        assert!((CONSTANTS.euler_gamma - 0.577_215_664_901_532_9).abs() < 1e-16);
    }
}

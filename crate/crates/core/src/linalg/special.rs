//! Log-gamma, digamma and log-beta for positive real arguments.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
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

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError(x));
    }
    Ok(ln_gamma_unchecked(x))
}

fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Digamma `ψ(x) = d/dx ln Γ(x)` for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::DomainError(x));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < 10.0 {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // Bernoulli-number asymptotic series
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    Ok(shift + x.ln() - 0.5 / x - series)
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b)`.
pub fn log_beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn known_values() {
        assert!(ln_gamma(1.0).unwrap().abs() < 1e-15);
        assert!(ln_gamma(2.0).unwrap().abs() < 1e-15);
        assert!((ln_gamma(0.5).unwrap() - PI.sqrt().ln()).abs() < 1e-14);
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() < 1e-13);
        assert!((digamma(0.5).unwrap() + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-13);
    }

    #[test]
    fn factorials() {
        let mut fact = 1.0f64;
        for n in 1..=60u32 {
            fact *= n as f64;
            let lg = ln_gamma(n as f64 + 1.0).unwrap();
            assert!((lg - fact.ln()).abs() <= 1e-12 * fact.ln().max(1.0), "n={n}");
        }
    }

    #[test]
    fn recurrences() {
        for i in 1..200 {
            let x = 0.05 * i as f64;
            let lhs = ln_gamma(x + 1.0).unwrap() - ln_gamma(x).unwrap();
            assert!((lhs - x.ln()).abs() < 1e-12, "x={x}");
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() < 1e-12 * (1.0 / x).max(1.0), "x={x}");
        }
    }

    #[test]
    fn digamma_is_derivative_of_ln_gamma() {
        for &x in &[0.7, 1.3, 2.5, 7.0, 33.0, 90.0] {
            let h = 1e-5;
            let fd = (ln_gamma(x + h).unwrap() - ln_gamma(x - h).unwrap()) / (2.0 * h);
            assert!((fd - digamma(x).unwrap()).abs() < 1e-8, "x={x}");
        }
    }

    #[test]
    fn beta_identity() {
        let lb = log_beta(0.5, 1.5).unwrap();
        let via_gamma = ln_gamma(0.5).unwrap() + ln_gamma(1.5).unwrap() - ln_gamma(2.0).unwrap();
        assert!((lb - via_gamma).abs() < 1e-15);
        assert!((lb - (PI / 2.0).ln()).abs() < 1e-13);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(ln_gamma(0.0), Err(Error::DomainError(_))));
        assert!(matches!(digamma(-1.0), Err(Error::DomainError(_))));
        assert!(log_beta(1.0, -0.5).is_err());
    }
}

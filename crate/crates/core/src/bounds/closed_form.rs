use super::{BoundEstimate, BoundMethod};
use crate::error::{Error, Result};
use crate::linalg::special::{digamma, ln_gamma, log_beta};
use crate::linalg::{quadrature_01_split, SingularEndpoints};

fn check_kd(k: usize, d: usize) -> Result<()> {
    if k == 0 || k >= d {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k < d, got k={k}, d={d}"
        )));
    }
    Ok(())
}

/// Bound of order `s` for the invariant law on `G(k, d)`.
///
/// `s > 0`: `[B(k/2, (d−k)/2 + s) / B(k/2, (d−k)/2)]^{1/s}`;
/// `s = 0`: `exp(ψ((d−k)/2) − ψ(d/2))`.
pub fn invariant_alpha_closed_form(k: usize, d: usize, s: f64) -> Result<BoundEstimate> {
    check_kd(k, d)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("s must be >= 0, got {s}")));
    }
    let a = k as f64 / 2.0;
    let b = (d - k) as f64 / 2.0;
    let log_value = if s == 0.0 {
        digamma(b)? - digamma(a + b)?
    } else {
        (log_beta(a, b + s)? - log_beta(a, b)?) / s
    };
    Ok(BoundEstimate::new(log_value.exp(), s, BoundMethod::ClosedForm))
}

/// Surface measure of the unit sphere `S^m ⊂ ℝ^{m+1}`: `2π^{(m+1)/2} / Γ((m+1)/2)`.
pub fn sphere_measure(m: usize) -> Result<f64> {
    let h = (m + 1) as f64 / 2.0;
    Ok(2.0 * (h * std::f64::consts::PI.ln() - ln_gamma(h)?).exp())
}

/// `E log(1 − ‖P_W x‖²)` for the invariant law, by reducing to
/// `C ∫₀¹ (1−ρ²)^{(k−2)/2} ρ^{d−k−1} log ρ dρ`,
/// `C = 2 |S^{k−1}| |S^{d−k−1}| / |S^{d−1}|`.
pub fn c_log_quadrature(k: usize, d: usize) -> Result<f64> {
    check_kd(k, d)?;
    let c = 2.0 * sphere_measure(k - 1)? * sphere_measure(d - k - 1)? / sphere_measure(d - 1)?;
    let p = (k as f64 - 2.0) / 2.0;
    let q = (d - k - 1) as i32;
    let integrand = |rho: f64, comp: f64| {
        if rho <= 0.0 || comp <= 0.0 {
            return 0.0;
        }
        // 1 − ρ² = (1 − ρ)(1 + ρ), log ρ = log1p(−(1 − ρ))
        (comp * (2.0 - comp)).powf(p) * rho.powi(q) * (-comp).ln_1p()
    };
    let r = quadrature_01_split(integrand, SingularEndpoints::from_flags(true, k == 1))?;
    Ok(c * r.value)
}

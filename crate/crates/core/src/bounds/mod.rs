//! Kaczmarz bounds `α_s` and `α_log` of subspace laws.
//!
//! Order `s = 0` encodes the logarithmic bound throughout.

mod closed_form;
mod coupon;
mod sup;
mod tightness;

use std::fmt;

pub use closed_form::{c_log_quadrature, invariant_alpha_closed_form, sphere_measure};
pub use coupon::{first_term_bound, inclusion_exclusion_bound, unhit_probability_exact};
pub use sup::{alpha_log_sup, alpha_s_sup, SupOptions};
pub use tightness::{tightness_test, TightnessReport, MC_SAMPLES_PER_PROBE};

use crate::distribution::SubspaceDistribution;
use crate::error::{Error, Result};
use crate::linalg::sym_eig;

/// How a bound value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundMethod {
    ExactEigen,
    /// Multistart ascent; the value is a lower bound on the supremum.
    Optimizer,
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl BoundMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::ExactEigen => "exact_eigen",
            Self::Optimizer => "optimizer",
            Self::ClosedForm => "closed_form",
            Self::Quadrature => "quadrature",
            Self::MonteCarlo => "monte_carlo",
        }
    }

    /// Whether the reported value may undershoot the true bound.
    pub fn is_lower_bound(self) -> bool {
        matches!(self, Self::Optimizer)
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEstimate {
    pub value: f64,
    /// Order; `0` means logarithmic.
    pub s: f64,
    pub method: BoundMethod,
    pub attaining_x: Option<Vec<f64>>,
    pub stderr: Option<f64>,
}

impl BoundEstimate {
    fn new(value: f64, s: f64, method: BoundMethod) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            s,
            method,
            attaining_x: None,
            stderr: None,
        }
    }
}

/// `α_1 = 1 − λ_min(E P_W)`, exact.
pub fn alpha_one_exact(dist: &SubspaceDistribution) -> Result<BoundEstimate> {
    let eig = sym_eig(&dist.expected_projection())?;
    let mut est = BoundEstimate::new(1.0 - eig.min(), 1.0, BoundMethod::ExactEigen);
    est.attaining_x = Some(eig.vector(0));
    Ok(est)
}

/// Best available bound of order `s` for any law: closed form for the
/// invariant law, the eigenvalue formula at `s = 1`, the optimizer otherwise.
pub fn alpha_bound(dist: &SubspaceDistribution, s: f64, opts: &SupOptions) -> Result<BoundEstimate> {
    match dist {
        SubspaceDistribution::Invariant { k, d } if k == d => {
            Ok(BoundEstimate::new(0.0, s, BoundMethod::ClosedForm))
        }
        SubspaceDistribution::Invariant { k, d } => invariant_alpha_closed_form(*k, *d, s),
        SubspaceDistribution::Discrete(_) if s == 1.0 => alpha_one_exact(dist),
        SubspaceDistribution::Discrete(_) if s == 0.0 => alpha_log_sup(dist, opts),
        SubspaceDistribution::Discrete(_) => alpha_s_sup(dist, s, opts),
    }
}

#[derive(Debug, Clone)]
pub struct LyapunovReport {
    pub s_list: Vec<f64>,
    pub values: Vec<f64>,
    pub monotone: bool,
}

/// Checks `α_{s₂} ≤ α_{s₁} + tol` for `s₂ ≤ s₁` over an ascending list.
///
/// For discrete laws each order is optimized with the same starts, and then
/// every order is re-evaluated at the union of the maximizers found, so all
/// values are compared on a common probe set.
pub fn lyapunov_check(
    dist: &SubspaceDistribution,
    s_list: &[f64],
    opts: &SupOptions,
    tol: f64,
) -> Result<LyapunovReport> {
    if s_list.windows(2).any(|w| !(w[0] < w[1])) || s_list.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::InvalidParameter(
            "s_list must be positive and strictly ascending".into(),
        ));
    }
    let values = match dist {
        SubspaceDistribution::Invariant { .. } => s_list
            .iter()
            .map(|&s| alpha_bound(dist, s, opts).map(|e| e.value))
            .collect::<Result<Vec<_>>>()?,
        SubspaceDistribution::Discrete(law) => {
            let estimates = s_list
                .iter()
                .map(|&s| alpha_s_sup(dist, s, opts))
                .collect::<Result<Vec<_>>>()?;
            let probes: Vec<Vec<f64>> =
                estimates.iter().filter_map(|e| e.attaining_x.clone()).collect();
            s_list
                .iter()
                .zip(&estimates)
                .map(|(&s, e)| {
                    let best = probes
                        .iter()
                        .map(|x| law.potential_s_unchecked(x, s))
                        .fold(0.0f64, f64::max);
                    e.value.max(best.powf(1.0 / s))
                })
                .collect()
        }
    };
    let monotone = values.windows(2).all(|w| w[0] <= w[1] + tol);
    Ok(LyapunovReport {
        s_list: s_list.to_vec(),
        values,
        monotone,
    })
}

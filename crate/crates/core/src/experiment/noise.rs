//! Monte Carlo check of the error bound under bounded in-subspace noise.

use super::config::ExperimentConfig;
use super::moments::{moment_curves, MomentOrder, TrialSetup};
use crate::bounds::{alpha_bound, SupOptions};
use crate::error::{Error, Result};
use crate::solver::ControlStrategy;

#[derive(Debug, Clone)]
pub struct NoiseReport {
    pub s: f64,
    pub alpha: f64,
    pub epsilon: f64,
    /// `E e_n^s` for `s ≤ 1`, `(E e_n^s)^{1/s}` for `s > 1`.
    pub estimate: Vec<f64>,
    pub stderr: Vec<f64>,
    pub bound: Vec<f64>,
    /// Iterations where `estimate − 4·stderr > bound`.
    pub violations: Vec<usize>,
}

impl NoiseReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Bound on the order-`s` error moment with noise level `ε`:
/// `α^{ns} e_0^s + ε^{2s}/(1 − α^s)` for `s ≤ 1` and
/// `α^n e_0 + ε²/(1 − α)` (on the `1/s` power) for `s > 1`.
pub fn noisy_bound(alpha: f64, s: f64, epsilon: f64, initial: f64, n_max: usize) -> Vec<f64> {
    (0..=n_max)
        .map(|n| {
            let n = n as f64;
            if s <= 1.0 {
                alpha.powf(n * s) * initial.powf(s) + epsilon.powf(2.0 * s) / (1.0 - alpha.powf(s))
            } else {
                alpha.powf(n) * initial + epsilon * epsilon / (1.0 - alpha)
            }
        })
        .collect()
}

/// Simulates `cfg` (with its noise level) and compares the order-`s` moment
/// with [`noisy_bound`] at every iteration.
pub fn noisy_bound_check(cfg: &ExperimentConfig, s: f64) -> Result<NoiseReport> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Config(format!("noise check needs s > 0, got {s}")));
    }
    let opts = SupOptions {
        seed: cfg.seed,
        ..SupOptions::default()
    };
    let alpha = alpha_bound(&cfg.distribution, s, &opts)?.value;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "noise check needs 0 < alpha < 1, got {alpha}"
        )));
    }
    let x_true = cfg.x_true_vector()?;
    let x0 = cfg.x0_vector()?;
    let strategy = ControlStrategy::IidStream(cfg.distribution.clone());
    let setup = TrialSetup {
        strategy: &strategy,
        x_true: &x_true,
        x0: &x0,
        trials: cfg.trials,
        iterations: cfg.iterations,
        seed: cfg.seed,
        epsilon: cfg.epsilon,
    };
    let curve = moment_curves(&setup, &[MomentOrder::Power(s)])?.remove(0);
    let initial = crate::linalg::dist_sq(&x_true, &x0);
    let bound = noisy_bound(alpha, s, cfg.epsilon, initial, cfg.iterations);
    let (estimate, stderr) = if s <= 1.0 {
        (curve.raw_mean, curve.raw_stderr)
    } else {
        (curve.values, curve.stderr)
    };
    let violations = (0..estimate.len())
        .filter(|&n| estimate[n] - 4.0 * stderr[n] > bound[n])
        .collect();
    Ok(NoiseReport {
        s,
        alpha,
        epsilon: cfg.epsilon,
        estimate,
        stderr,
        bound,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_forms() {
        let b = noisy_bound(0.9, 1.0, 0.01, 1.0, 2);
        assert!((b[0] - (1.0 + 1e-4 / 0.1)).abs() < 1e-15);
        assert!((b[2] - (0.81 + 1e-3)).abs() < 1e-15);
        let b = noisy_bound(0.5, 2.0, 0.1, 4.0, 1);
        assert!((b[1] - (2.0 + 0.01 / 0.5)).abs() < 1e-15);
        let b = noisy_bound(0.5, 0.5, 0.0, 4.0, 1);
        assert!((b[1] - 0.5f64.sqrt() * 2.0).abs() < 1e-15);
    }

    #[test]
    fn small_noisy_run_respects_bound() {
        let cfg = ExperimentConfig::parse(
            "distribution = ronb:4\nx_true = ones\ntrials = 200\niterations = 40\ns_list = 1\nseed = 3\nepsilon = 0.05\n",
        )
        .unwrap();
        for s in [0.5, 1.0, 2.0] {
            let r = noisy_bound_check(&cfg, s).unwrap();
            assert!(r.ok(), "s={s}: {:?}", r.violations);
            assert_eq!(r.estimate.len(), 41);
        }
        let exact = ExperimentConfig::parse(
            "distribution = ronb:4\ntrials = 20\niterations = 10\ns_list = 1\n",
        )
        .unwrap();
        assert!(noisy_bound_check(&exact, 1.0).unwrap().ok());
        assert!(noisy_bound_check(&exact, 0.0).is_err());
    }
}

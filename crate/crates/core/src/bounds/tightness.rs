//! Numerical check that the potential is constant over the sphere.

use crate::distribution::{snap_residual, SubspaceDistribution};
use crate::error::{Error, Result};
use crate::linalg::{sym_eig, SeededRng};
use crate::subspace::Subspace;

/// Invariant-law draws used to estimate the potential at each probe.
pub const MC_SAMPLES_PER_PROBE: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct TightnessReport {
    pub tight: bool,
    /// `max − min` of the potential over the probes.
    pub spread: f64,
    pub min: f64,
    pub max: f64,
    /// `sqrt(se_max² + se_min²)` for Monte Carlo potentials.
    pub pooled_stderr: Option<f64>,
}

fn probe_points(dist: &SubspaceDistribution, probes: usize, rng: &mut SeededRng) -> Result<Vec<Vec<f64>>> {
    let d = dist.ambient_dim();
    let mut points: Vec<Vec<f64>> = (0..probes).map(|_| rng.unit_vector(d)).collect();
    if let Some(law) = dist.as_discrete() {
        for atom in law.atoms() {
            points.extend(atom.basis_vectors());
        }
    }
    let eig = sym_eig(&dist.expected_projection())?;
    points.push(eig.vector(0));
    points.push(eig.vector(d - 1));
    Ok(points)
}

fn spread_of(values: &[f64]) -> (f64, f64, f64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // all −∞ is a constant potential; a −∞ minimum next to a finite maximum
    // is an infinite spread
    let spread = if max == min { 0.0 } else { max - min };
    (min, max, spread)
}

/// Evaluates the order-`s` potential (`s = 0`: logarithmic) at `probes`
/// random unit vectors, every atom basis vector and the extreme eigenvectors
/// of `E P_W`, and reports whether it is constant within `tol`.
///
/// The invariant law's potential is estimated by Monte Carlo from
/// [`MC_SAMPLES_PER_PROBE`] draws shared by all probes, and the tolerance is
/// widened by four pooled standard errors.
pub fn tightness_test(
    dist: &SubspaceDistribution,
    s: f64,
    probes: usize,
    rng: &mut SeededRng,
    tol: f64,
) -> Result<TightnessReport> {
    if probes < 2 {
        return Err(Error::InvalidParameter("tightness test needs at least 2 probes".into()));
    }
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("s must be >= 0, got {s}")));
    }
    let points = probe_points(dist, probes, rng)?;
    match dist {
        SubspaceDistribution::Discrete(law) => {
            let values: Vec<f64> = points
                .iter()
                .map(|x| {
                    if s == 0.0 {
                        law.potential_log_unchecked(x)
                    } else {
                        law.potential_s_unchecked(x, s)
                    }
                })
                .collect();
            let (min, max, spread) = spread_of(&values);
            Ok(TightnessReport {
                tight: spread <= tol,
                spread,
                min,
                max,
                pooled_stderr: None,
            })
        }
        SubspaceDistribution::Invariant { k, d } => {
            let m = points.len();
            let mut sum = vec![0.0; m];
            let mut sum_sq = vec![0.0; m];
            for _ in 0..MC_SAMPLES_PER_PROBE {
                let w = Subspace::sample_invariant(rng, *k, *d)?;
                for (i, x) in points.iter().enumerate() {
                    let r = snap_residual(1.0 - w.proj_norm_sq_unchecked(x));
                    let v = if s == 0.0 { r.ln() } else { r.powf(s) };
                    sum[i] += v;
                    sum_sq[i] += v * v;
                }
            }
            let n = MC_SAMPLES_PER_PROBE as f64;
            let means: Vec<f64> = sum.iter().map(|t| t / n).collect();
            let se: Vec<f64> = means
                .iter()
                .zip(&sum_sq)
                .map(|(mean, sq)| ((sq / n - mean * mean).max(0.0) / (n - 1.0)).sqrt())
                .collect();
            let (min, max, spread) = spread_of(&means);
            let at = |target: f64| means.iter().position(|&v| v == target).unwrap_or(0);
            let pooled = (se[at(max)].powi(2) + se[at(min)].powi(2)).sqrt();
            Ok(TightnessReport {
                tight: spread <= tol + 4.0 * pooled,
                spread,
                min,
                max,
                pooled_stderr: Some(pooled),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariant_is_tight() {
        for (k, d) in [(1, 2), (2, 5)] {
            let law = SubspaceDistribution::invariant(k, d).unwrap();
            for s in [0.0, 1.0] {
                let r = tightness_test(&law, s, 4, &mut SeededRng::new(1, 0), 1e-10).unwrap();
                assert!(r.tight, "k={k} d={d} s={s}: {r:?}");
            }
        }
    }

    #[test]
    fn tight_frame_law_at_order_one() {
        for law in [
            SubspaceDistribution::roots_of_unity(5).unwrap(),
            SubspaceDistribution::icosahedral().unwrap(),
        ] {
            let d = law.ambient_dim() as f64;
            let r = tightness_test(&law, 1.0, 20, &mut SeededRng::new(2, 0), 1e-10).unwrap();
            assert!(r.tight);
            assert!((r.max - (1.0 - 1.0 / d)).abs() < 1e-12);
        }
    }

    #[test]
    fn ronb_half_is_not_tight() {
        let law = SubspaceDistribution::ronb(2).unwrap();
        let r = tightness_test(&law, 0.5, 8, &mut SeededRng::new(3, 0), 1e-10).unwrap();
        assert!(!r.tight);
        assert!(r.min <= 0.5 + 1e-12 && r.max >= 0.5f64.sqrt() - 1e-3);
        let r = tightness_test(&law, 0.0, 8, &mut SeededRng::new(3, 0), 1e-10).unwrap();
        assert!(!r.tight && r.spread == f64::INFINITY);
    }

    #[test]
    fn full_space_log_potential_is_constant() {
        let law = SubspaceDistribution::uniform(vec![Subspace::full(2)]).unwrap();
        let r = tightness_test(&law, 0.0, 3, &mut SeededRng::new(4, 0), 0.0).unwrap();
        assert!(r.tight && r.min == f64::NEG_INFINITY);
        assert!(tightness_test(&law, 1.0, 1, &mut SeededRng::new(4, 0), 0.0).is_err());
    }
}

//! Multistart projected gradient ascent of the potential over the unit sphere.

use rayon::prelude::*;

use super::{BoundEstimate, BoundMethod};
use crate::distribution::{snap_residual, DiscreteLaw, SubspaceDistribution};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, normalized, sym_eig, SeededRng};

/// Floor on `1 − ‖P_W x‖²` inside the gradient factor `(1 − t)^{s−1}`, `s < 1`.
const RESIDUAL_FLOOR: f64 = 1e-12;
const INITIAL_STEP: f64 = 0.1;
const MIN_STEP: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct SupOptions {
    /// Number of uniformly random starts, on top of the structured ones.
    pub restarts: usize,
    /// Objective evaluations allowed per start.
    pub max_iter: usize,
    /// Riemannian gradient norm at which a start is considered converged.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SupOptions {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iter: 10_000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

#[derive(Clone, Copy)]
enum Kind {
    Power(f64),
    Log,
}

/// Potential and its Euclidean gradient at `x`.
fn eval(law: &DiscreteLaw, kind: Kind, x: &[f64], grad: &mut [f64]) -> f64 {
    grad.fill(0.0);
    let mut f = 0.0;
    for (atom, &p) in law.atoms().iter().zip(law.probs()) {
        if p == 0.0 {
            continue;
        }
        let c = atom.coords(x);
        let r = snap_residual(1.0 - dot(&c, &c));
        let factor = match kind {
            Kind::Power(s) => {
                f += p * r.powf(s);
                p * s * r.max(RESIDUAL_FLOOR).powf(s - 1.0)
            }
            Kind::Log => {
                if r == 0.0 {
                    return f64::NEG_INFINITY;
                }
                f += p * r.ln();
                p / r
            }
        };
        axpy(-2.0 * factor, &atom.basis().matvec(&c), grad);
    }
    f
}

/// Ascends from `start`; returns the best value and point.
fn ascend(law: &DiscreteLaw, kind: Kind, start: &[f64], opts: &SupOptions) -> (f64, Vec<f64>) {
    let d = start.len();
    let mut x = start.to_vec();
    let mut g = vec![0.0; d];
    let mut g_cand = vec![0.0; d];
    let mut f = eval(law, kind, &x, &mut g);
    if f == f64::NEG_INFINITY {
        return (f, x);
    }
    let mut step = INITIAL_STEP;
    let mut evals = 1;
    while evals < opts.max_iter && step >= MIN_STEP {
        let radial = dot(&g, &x);
        let mut rg = g.clone();
        axpy(-radial, &x, &mut rg);
        let gn = dot(&rg, &rg).sqrt();
        if gn < opts.tol {
            break;
        }
        let mut cand = x.clone();
        axpy(step / gn, &rg, &mut cand);
        let Some(cand) = normalized(&cand) else {
            step *= 0.5;
            continue;
        };
        let f_cand = eval(law, kind, &cand, &mut g_cand);
        evals += 1;
        if f_cand > f {
            x = cand;
            f = f_cand;
            std::mem::swap(&mut g, &mut g_cand);
            step = (step * 2.0).min(1.0);
        } else {
            step *= 0.5;
        }
    }
    (f, x)
}

fn starts(law: &DiscreteLaw, opts: &SupOptions) -> Result<Vec<Vec<f64>>> {
    let d = law.ambient_dim();
    let mut out = Vec::new();
    out.push(sym_eig(&law.expected_projection())?.vector(0));
    out.push(vec![1.0 / (d as f64).sqrt(); d]);
    for atom in law.atoms() {
        out.extend(atom.basis_vectors());
    }
    for i in 0..opts.restarts {
        out.push(SeededRng::new(opts.seed, i as u64).unit_vector(d));
    }
    Ok(out)
}

fn maximize(law: &DiscreteLaw, kind: Kind, opts: &SupOptions) -> Result<(f64, Vec<f64>)> {
    let starts = starts(law, opts)?;
    let results: Vec<(f64, Vec<f64>)> = starts
        .par_iter()
        .map(|x0| ascend(law, kind, x0, opts))
        .collect();
    let mut best = (f64::NEG_INFINITY, starts[0].clone());
    for r in results {
        if r.0 > best.0 {
            best = r;
        }
    }
    Ok(best)
}

fn discrete(dist: &SubspaceDistribution) -> Result<&DiscreteLaw> {
    dist.as_discrete().ok_or(Error::UnsupportedVariant(
        "the invariant law has an x-independent potential; use the closed form",
    ))
}

/// `α_s = sup_x (E(1 − ‖P_W x‖²)^s)^{1/s}` for `s > 0`, estimated from below.
pub fn alpha_s_sup(dist: &SubspaceDistribution, s: f64, opts: &SupOptions) -> Result<BoundEstimate> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
    }
    let law = discrete(dist)?;
    let (f, x) = maximize(law, Kind::Power(s), opts)?;
    let mut est = BoundEstimate::new(f.max(0.0).powf(1.0 / s), s, BoundMethod::Optimizer);
    est.attaining_x = Some(x);
    Ok(est)
}

/// `α_log = sup_x exp(E log(1 − ‖P_W x‖²))`, estimated from below.
pub fn alpha_log_sup(dist: &SubspaceDistribution, opts: &SupOptions) -> Result<BoundEstimate> {
    let law = discrete(dist)?;
    let (f, x) = maximize(law, Kind::Log, opts)?;
    let mut est = BoundEstimate::new(f.exp(), 0.0, BoundMethod::Optimizer);
    est.attaining_x = Some(x);
    Ok(est)
}

//! The subspace-action iteration `x_n = x_{n−1} + y_n − P_{W_n} x_{n−1}`.

use std::borrow::Cow;
use std::fmt;

use crate::distribution::SubspaceDistribution;
use crate::error::{check_dim, Error, Result};
use crate::fusion::FusionFrame;
use crate::linalg::{axpy, dist_sq, dot, norm_sq, SeededRng};
use crate::subspace::Subspace;
use crate::text::{fmt_f64, Lines};

/// Debug-mode tolerance for `y ∈ W` in [`step`].
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Mixed into the seed of the noise stream so it never collides with the
/// subspace stream of any trial.
const NOISE_SEED_TAG: u64 = 0x6e6f_6973_655f_7374;

/// How the subspace of each step is chosen.
#[derive(Debug, Clone)]
pub enum ControlStrategy {
    /// `W_n = W_{(n−1) mod N}` in frame order.
    Cyclic(FusionFrame),
    /// Independent draws from a discrete law.
    RandomDiscrete(SubspaceDistribution),
    /// Independent draws from any law.
    IidStream(SubspaceDistribution),
}

impl ControlStrategy {
    pub fn random_discrete(dist: SubspaceDistribution) -> Result<Self> {
        if dist.as_discrete().is_none() {
            return Err(Error::UnsupportedVariant("random discrete control needs a discrete law"));
        }
        Ok(Self::RandomDiscrete(dist))
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Cyclic(ff) => ff.ambient_dim(),
            Self::RandomDiscrete(d) | Self::IidStream(d) => d.ambient_dim(),
        }
    }

    fn next<'a>(&'a self, n: usize, rng: &mut SeededRng) -> (Chosen, Cow<'a, Subspace>) {
        match self {
            Self::Cyclic(ff) => {
                let i = n % ff.len();
                (Chosen::Atom(i), Cow::Borrowed(&ff.subspaces()[i]))
            }
            Self::RandomDiscrete(dist) | Self::IidStream(dist) => match dist.draw(rng) {
                (Some(i), w) => (Chosen::Atom(i), w),
                (None, w) => (Chosen::Stream, w),
            },
        }
    }
}

/// Measurement noise `ε_n ∈ W_n`, `‖ε_n‖ ≤ ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    None,
    /// Uniform direction in `W_n`, magnitude uniform on `[0, ε]`, drawn from
    /// the stream `stream` of a noise generator keyed by the run's seed.
    InSubspace { epsilon: f64, stream: u64 },
}

impl NoiseModel {
    pub fn epsilon(&self) -> f64 {
        match self {
            Self::None => 0.0,
            Self::InSubspace { epsilon, .. } => *epsilon,
        }
    }

    fn rng(&self, base: &SeededRng) -> Option<SeededRng> {
        match self {
            Self::InSubspace { epsilon, stream } if *epsilon > 0.0 => Some(SeededRng::new(
                base.seed() ^ NOISE_SEED_TAG.wrapping_mul(stream.wrapping_add(1)),
                base.stream_id(),
            )),
            _ => None,
        }
    }
}

/// Which subspace a step used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Chosen {
    /// Index into the frame or the discrete law.
    Atom(usize),
    /// A fresh draw from a continuous law.
    Stream,
}

impl fmt::Display for Chosen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Atom(i) => write!(f, "{i}"),
            Self::Stream => f.write_str("stream"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveTrace {
    /// `‖x − x_n‖²` for `n = 0..=N`.
    pub sq_errors: Vec<f64>,
    /// Subspace used at steps `1..=N`.
    pub chosen: Vec<Chosen>,
    pub estimate: Vec<f64>,
}

impl SolveTrace {
    /// CSV with header `n,sq_error,chosen`; row 0 has an empty `chosen`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,sq_error,chosen\n");
        for (n, e) in self.sq_errors.iter().enumerate() {
            let chosen = if n == 0 { String::new() } else { self.chosen[n - 1].to_string() };
            out.push_str(&format!("{n},{},{chosen}\n", fmt_f64(*e)));
        }
        out
    }
}

/// Everything needed to re-check a run step by step.
#[derive(Debug, Clone)]
pub struct RecordedRun {
    pub trace: SolveTrace,
    pub x_true: Vec<f64>,
    /// `x_0, …, x_N`.
    pub iterates: Vec<Vec<f64>>,
    pub subspaces: Vec<Subspace>,
    /// `ε_n` per step; empty for noiseless runs.
    pub noise: Vec<Vec<f64>>,
}

/// One step `x_prev + P_W y − P_W x_prev`.
///
/// `y` should lie in `W`; this is asserted in debug builds and `y` is
/// projected onto `W` regardless.
pub fn step(x_prev: &[f64], w: &Subspace, y: &[f64]) -> Result<Vec<f64>> {
    check_dim(w.ambient_dim(), x_prev.len())?;
    check_dim(w.ambient_dim(), y.len())?;
    debug_assert!(
        w.contains(y, MEMBERSHIP_TOL),
        "measurement does not lie in the subspace"
    );
    let diff: Vec<f64> = y.iter().zip(x_prev).map(|(a, b)| a - b).collect();
    let mut x = x_prev.to_vec();
    axpy(1.0, &w.project_unchecked(&diff), &mut x);
    Ok(x)
}

/// Uniform unit direction in `W` times a uniform magnitude in `[0, ε]`.
fn noise_vector(w: &Subspace, epsilon: f64, rng: &mut SeededRng) -> Vec<f64> {
    let k = w.dim();
    let g: Vec<f64> = loop {
        let g: Vec<f64> = (0..k).map(|_| rng.normal()).collect();
        if norm_sq(&g) > 0.0 {
            break g;
        }
    };
    let scale = epsilon * rng.uniform() / norm_sq(&g).sqrt();
    let mut v = w.basis().matvec(&g);
    v.iter_mut().for_each(|e| *e *= scale);
    v
}

fn run_impl(
    strategy: &ControlStrategy,
    x_true: &[f64],
    x0: &[f64],
    n_iter: usize,
    noise: NoiseModel,
    rng: &mut SeededRng,
    record: bool,
) -> Result<(SolveTrace, Option<RecordedRun>)> {
    let d = strategy.ambient_dim();
    check_dim(d, x_true.len())?;
    check_dim(d, x0.len())?;
    if !(noise.epsilon() >= 0.0) || !noise.epsilon().is_finite() {
        return Err(Error::InvalidParameter(format!(
            "noise level must be finite and >= 0, got {}",
            noise.epsilon()
        )));
    }
    let mut noise_rng = noise.rng(rng);
    let mut x = x0.to_vec();
    let mut sq_errors = Vec::with_capacity(n_iter + 1);
    let mut chosen = Vec::with_capacity(n_iter);
    sq_errors.push(dist_sq(x_true, &x));

    let mut iterates = Vec::new();
    let mut subspaces = Vec::new();
    let mut noises = Vec::new();
    if record {
        iterates.push(x.clone());
    }

    for n in 0..n_iter {
        let (c, w) = strategy.next(n, rng);
        // y = P_W x_true, so P_W(y − x) = B Bᵀ(x_true − x)
        let diff: Vec<f64> = x_true.iter().zip(&x).map(|(a, b)| a - b).collect();
        let coords = w.coords(&diff);
        axpy(1.0, &w.basis().matvec(&coords), &mut x);
        if let Some(nr) = noise_rng.as_mut() {
            let eps = noise_vector(&w, noise.epsilon(), nr);
            axpy(1.0, &eps, &mut x);
            if record {
                noises.push(eps);
            }
        }
        sq_errors.push(dist_sq(x_true, &x));
        chosen.push(c);
        if record {
            iterates.push(x.clone());
            subspaces.push(w.into_owned());
        }
    }

    let trace = SolveTrace {
        sq_errors,
        chosen,
        estimate: x,
    };
    let recorded = record.then(|| RecordedRun {
        trace: trace.clone(),
        x_true: x_true.to_vec(),
        iterates,
        subspaces,
        noise: noises,
    });
    Ok((trace, recorded))
}

/// Runs `n_iter` steps with measurements `y_n = P_{W_n} x_true (+ ε_n)`.
pub fn run(
    strategy: &ControlStrategy,
    x_true: &[f64],
    x0: &[f64],
    n_iter: usize,
    noise: NoiseModel,
    rng: &mut SeededRng,
) -> Result<SolveTrace> {
    Ok(run_impl(strategy, x_true, x0, n_iter, noise, rng, false)?.0)
}

/// As [`run`], also keeping every iterate, subspace and noise vector.
pub fn run_recorded(
    strategy: &ControlStrategy,
    x_true: &[f64],
    x0: &[f64],
    n_iter: usize,
    noise: NoiseModel,
    rng: &mut SeededRng,
) -> Result<RecordedRun> {
    Ok(run_impl(strategy, x_true, x0, n_iter, noise, rng, true)?
        .1
        .expect("recording requested"))
}

/// Applies the iteration to given `(W_n, y_n)` pairs; no ground truth needed.
pub fn run_from_stream(x0: &[f64], stream: &[(Subspace, Vec<f64>)]) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    for (w, y) in stream {
        check_dim(w.ambient_dim(), y.len())?;
        let projected = w.project_unchecked(y);
        x = step(&x, w, &projected)?;
    }
    Ok(x)
}

/// Parses a measurement stream: repeated subspace serializations (`d k` and
/// `k` basis rows), each followed by a line with the `d` measurement entries.
pub fn parse_measurement_stream(text: &str) -> Result<Vec<(Subspace, Vec<f64>)>> {
    let mut lines = Lines::new(text);
    let mut out = Vec::new();
    let mut d0 = None;
    loop {
        let Some(header) = lines.next_line() else { break };
        let mut toks = header.split_whitespace();
        let d = crate::text::parse_usize(&lines, toks.next(), "d")?;
        let k = crate::text::parse_usize(&lines, toks.next(), "k")?;
        if *d0.get_or_insert(d) != d {
            return Err(lines.error("all subspaces in a stream must share d"));
        }
        let w = Subspace::read_rows(&mut lines, d, k)?;
        let y = lines.floats("measurement", d)?;
        out.push((w, y));
    }
    Ok(out)
}

/// Outcome of [`verify_error_identities`].
#[derive(Debug, Clone, PartialEq)]
pub enum IdentityCheck {
    Holds,
    Violated(String),
    /// The identities only hold without noise.
    Skipped,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        !matches!(self, Self::Violated(_))
    }
}

/// Checks, for a noiseless run, the per-step energy identity
/// `‖x − x_n‖² = ‖x − x_{n−1}‖² − ‖P_{W_n}(x − x_{n−1})‖²`, its product form
/// `‖x − x_n‖² = ‖x − x_0‖² Π (1 − ‖P_{W_j} u_{j−1}‖²)` with unit residuals
/// `u`, and `x − x_n = P_{W_n^⊥} ⋯ P_{W_1^⊥}(x − x_0)`.
pub fn verify_error_identities(run: &RecordedRun) -> IdentityCheck {
    if !run.noise.is_empty() {
        return IdentityCheck::Skipped;
    }
    let x = &run.x_true;
    let e = &run.trace.sq_errors;
    let scale = e[0].max(1.0);
    let mut product = e[0];
    let mut composed: Vec<f64> = x.iter().zip(&run.iterates[0]).map(|(a, b)| a - b).collect();
    for (n, w) in run.subspaces.iter().enumerate() {
        let prev: Vec<f64> = x.iter().zip(&run.iterates[n]).map(|(a, b)| a - b).collect();
        let drop = w.proj_norm_sq_unchecked(&prev);
        if (e[n + 1] - (e[n] - drop)).abs() > 1e-10 * scale {
            return IdentityCheck::Violated(format!(
                "step {}: energy identity off by {:.3e}",
                n + 1,
                e[n + 1] - (e[n] - drop)
            ));
        }
        let nrm = norm_sq(&prev);
        let factor = if nrm > 0.0 { 1.0 - drop / nrm } else { 0.0 };
        product *= factor;
        if (e[n + 1] - product).abs() > 1e-10 * scale {
            return IdentityCheck::Violated(format!(
                "step {}: product form off by {:.3e}",
                n + 1,
                e[n + 1] - product
            ));
        }
        let p = w.project_unchecked(&composed);
        axpy(-1.0, &p, &mut composed);
        let resid: Vec<f64> = x.iter().zip(&run.iterates[n + 1]).map(|(a, b)| a - b).collect();
        let gap = dist_sq(&resid, &composed).sqrt();
        if gap > 1e-8 * scale.sqrt() {
            return IdentityCheck::Violated(format!(
                "step {}: composed projections off by {gap:.3e}",
                n + 1
            ));
        }
        if dot(&resid, &w.project_unchecked(&resid)).abs() > 1e-10 * scale {
            return IdentityCheck::Violated(format!("step {}: residual not orthogonal to W", n + 1));
        }
    }
    IdentityCheck::Holds
}

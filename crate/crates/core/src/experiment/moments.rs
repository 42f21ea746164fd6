//! Monte Carlo error-moment curves.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::SeededRng;
use crate::solver::{run, ControlStrategy, NoiseModel};
use crate::text::fmt_f64;

/// Trials per reduction chunk. Fixed so that sums do not depend on the
/// number of worker threads.
pub const CHUNK_TRIALS: usize = 64;

/// Moment order: `s > 0` or logarithmic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentOrder {
    Power(f64),
    Log,
}

impl MomentOrder {
    /// `0` maps to the logarithmic order.
    pub fn from_s(s: f64) -> Result<Self> {
        if s == 0.0 {
            Ok(Self::Log)
        } else if s > 0.0 && s.is_finite() {
            Ok(Self::Power(s))
        } else {
            Err(Error::InvalidParameter(format!("moment order must be >= 0, got {s}")))
        }
    }

    /// Numeric order, `0` for logarithmic.
    pub fn s(self) -> f64 {
        match self {
            Self::Power(s) => s,
            Self::Log => 0.0,
        }
    }

    /// Accepts a decimal number or `log`.
    pub fn parse(token: &str) -> Result<Self> {
        let t = token.trim();
        if t.eq_ignore_ascii_case("log") {
            return Ok(Self::Log);
        }
        let s: f64 = t
            .parse()
            .map_err(|_| Error::Config(format!("bad moment order '{t}'")))?;
        Self::from_s(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn parse_list(list: &str) -> Result<Vec<Self>> {
        let orders = list
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(Self::parse)
            .collect::<Result<Vec<_>>>()?;
        if orders.is_empty() {
            return Err(Error::Config("empty list of moment orders".into()));
        }
        Ok(orders)
    }
}

impl fmt::Display for MomentOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Power(s) => write!(f, "{s}"),
            Self::Log => f.write_str("log"),
        }
    }
}

/// Monte Carlo estimate of `(E e_n^s)^{1/s}` (or `exp E log e_n`) against
/// `n`, where `e_n = ‖x − x_n‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCurve {
    pub order: MomentOrder,
    pub values: Vec<f64>,
    /// Delta-method standard errors of `values`.
    pub stderr: Vec<f64>,
    /// `α^n ‖x − x_0‖²` when a bound was attached.
    pub bound: Option<Vec<f64>>,
    /// Untransformed sample mean of `e_n^s` (of `log e_n` for the log order).
    pub raw_mean: Vec<f64>,
    pub raw_stderr: Vec<f64>,
}

impl MomentCurve {
    pub fn with_bound(mut self, alpha: f64) -> Self {
        let n_max = self.values.len().saturating_sub(1);
        self.bound = Some(theoretical_curve(alpha, n_max, self.values[0]));
        self
    }
}

/// `[α^n · initial for n = 0..=n_max]`.
pub fn theoretical_curve(alpha: f64, n_max: usize, initial: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut v = initial;
    for _ in 0..=n_max {
        out.push(v);
        v *= alpha;
    }
    out
}

/// What to simulate.
#[derive(Debug, Clone)]
pub struct TrialSetup<'a> {
    pub strategy: &'a ControlStrategy,
    pub x_true: &'a [f64],
    pub x0: &'a [f64],
    pub trials: usize,
    pub iterations: usize,
    pub seed: u64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, v: f64) {
        self.count += 1.0;
        let delta = v - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (v - self.mean);
    }

    fn merge(&mut self, other: &Welford) {
        if other.count == 0.0 {
            return;
        }
        if self.count == 0.0 {
            *self = *other;
            return;
        }
        let n = self.count + other.count;
        let delta = other.mean - self.mean;
        self.mean += delta * other.count / n;
        self.m2 += other.m2 + delta * delta * self.count * other.count / n;
        self.count = n;
    }

    fn stderr(&self) -> f64 {
        if self.count < 2.0 {
            return 0.0;
        }
        (self.m2.max(0.0) / (self.count - 1.0) / self.count).sqrt()
    }
}

/// Per order and iteration statistics; `zero[n]` marks an exact recovery
/// seen at `n` (only relevant to the log order).
#[derive(Clone)]
struct Partial {
    stats: Vec<Vec<Welford>>,
    zero: Vec<bool>,
}

impl Partial {
    fn new(orders: usize, len: usize) -> Self {
        Self {
            stats: vec![vec![Welford::default(); len]; orders],
            zero: vec![false; len],
        }
    }

    fn merge(&mut self, other: &Partial) {
        for (a, b) in self.stats.iter_mut().zip(&other.stats) {
            for (x, y) in a.iter_mut().zip(b) {
                x.merge(y);
            }
        }
        for (a, b) in self.zero.iter_mut().zip(&other.zero) {
            *a |= *b;
        }
    }
}

/// Runs `setup.trials` independent trials (trial `t` uses stream `t` of
/// `setup.seed`) and aggregates every order. Output is identical for any
/// thread count.
pub fn moment_curves(setup: &TrialSetup<'_>, orders: &[MomentOrder]) -> Result<Vec<MomentCurve>> {
    if setup.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let len = setup.iterations + 1;
    let noise = if setup.epsilon > 0.0 {
        NoiseModel::InSubspace {
            epsilon: setup.epsilon,
            stream: 0,
        }
    } else {
        NoiseModel::None
    };
    let chunks: Vec<(usize, usize)> = (0..setup.trials)
        .step_by(CHUNK_TRIALS)
        .map(|start| (start, (start + CHUNK_TRIALS).min(setup.trials)))
        .collect();

    let partials: Vec<Partial> = chunks
        .par_iter()
        .map(|&(start, end)| -> Result<Partial> {
            let mut part = Partial::new(orders.len(), len);
            for t in start..end {
                let mut rng = SeededRng::new(setup.seed, t as u64);
                let trace = run(
                    setup.strategy,
                    setup.x_true,
                    setup.x0,
                    setup.iterations,
                    noise,
                    &mut rng,
                )?;
                for (n, &e) in trace.sq_errors.iter().enumerate() {
                    if e == 0.0 {
                        part.zero[n] = true;
                    }
                    for (o, order) in orders.iter().enumerate() {
                        match order {
                            MomentOrder::Power(s) => part.stats[o][n].push(e.powf(*s)),
                            MomentOrder::Log if e > 0.0 => part.stats[o][n].push(e.ln()),
                            MomentOrder::Log => {}
                        }
                    }
                }
            }
            Ok(part)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut total = Partial::new(orders.len(), len);
    for p in &partials {
        total.merge(p);
    }

    let initial = crate::linalg::dist_sq(setup.x_true, setup.x0);
    Ok(orders
        .iter()
        .zip(&total.stats)
        .map(|(&order, stats)| {
            let mut values = Vec::with_capacity(len);
            let mut stderr = Vec::with_capacity(len);
            let mut raw_mean = Vec::with_capacity(len);
            let mut raw_stderr = Vec::with_capacity(len);
            let mut recovered = false;
            for (n, w) in stats.iter().enumerate() {
                let se = w.stderr();
                raw_mean.push(w.mean);
                raw_stderr.push(se);
                let (v, v_se) = match order {
                    MomentOrder::Power(s) => {
                        let v = w.mean.max(0.0).powf(1.0 / s);
                        let slope = if w.mean > 0.0 { v / (s * w.mean) } else { 0.0 };
                        (v, slope * se)
                    }
                    MomentOrder::Log => {
                        recovered |= total.zero[n];
                        if recovered {
                            (0.0, 0.0)
                        } else {
                            let v = w.mean.exp();
                            (v, v * se)
                        }
                    }
                };
                values.push(v);
                stderr.push(v_se);
            }
            // every trial starts from the same x_0
            values[0] = initial;
            stderr[0] = 0.0;
            MomentCurve {
                order,
                values,
                stderr,
                bound: None,
                raw_mean,
                raw_stderr,
            }
        })
        .collect())
}

/// CSV rows `[law,]n,s,estimate,stderr,bound` with 17 significant digits;
/// `bound` is empty when no bound is attached.
pub fn curve_rows(law: Option<&str>, curve: &MomentCurve, out: &mut String) {
    for n in 0..curve.values.len() {
        if let Some(name) = law {
            out.push_str(name);
            out.push(',');
        }
        let bound = curve
            .bound
            .as_ref()
            .map(|b| fmt_f64(b[n]))
            .unwrap_or_default();
        out.push_str(&format!(
            "{n},{},{},{},{bound}\n",
            curve.order,
            fmt_f64(curve.values[n]),
            fmt_f64(curve.stderr[n])
        ));
    }
}

pub const CSV_HEADER: &str = "n,s,estimate,stderr,bound";

/// Single-law CSV.
pub fn curves_to_csv(curves: &[MomentCurve]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for c in curves {
        curve_rows(None, c, &mut out);
    }
    out
}

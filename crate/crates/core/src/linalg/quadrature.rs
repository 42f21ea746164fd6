//! Adaptive Gauss–Legendre quadrature on `(0, 1)` with endpoint singularities.
//!
//! Near a flagged endpoint the interval is graded geometrically
//! (`[2^{-j-2}, 2^{-j-1}]` measured from the endpoint), so each panel sees the
//! singularity at a distance comparable to its own length and Gauss–Legendre
//! converges quickly on it. Panels are added until the geometric tail is
//! negligible. Integrands receive both `x` and `1 − x` so that factors like
//! `(1 − x²)^p` can be evaluated without cancellation near `x = 1`.

use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Target absolute error for the whole integral.
pub const TARGET_ERROR: f64 = 1e-10;

const PANEL_TOL: f64 = 1e-14;
const MAX_BISECTIONS: u32 = 30;
const MAX_GRADED_PANELS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularEndpoints {
    None,
    Left,
    Right,
    Both,
}

impl SingularEndpoints {
    pub fn from_flags(left: bool, right: bool) -> Self {
        match (left, right) {
            (false, false) => Self::None,
            (true, false) => Self::Left,
            (false, true) => Self::Right,
            (true, true) => Self::Both,
        }
    }

    fn left(self) -> bool {
        matches!(self, Self::Left | Self::Both)
    }

    fn right(self) -> bool {
        matches!(self, Self::Right | Self::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error: f64,
}

/// `∫₀¹ f(x) dx`.
pub fn quadrature_01<F: Fn(f64) -> f64>(
    f: F,
    singular: SingularEndpoints,
) -> Result<QuadratureResult> {
    quadrature_01_split(|x, _| f(x), singular)
}

/// `∫₀¹ f(x, 1 − x) dx`, where the second argument is the accurately
/// computed complement `1 − x`.
pub fn quadrature_01_split<F: Fn(f64, f64) -> f64>(
    f: F,
    singular: SingularEndpoints,
) -> Result<QuadratureResult> {
    let left = integrate_half(&|t| f(t, 1.0 - t), singular.left())?;
    let right = integrate_half(&|t| f(1.0 - t, t), singular.right())?;
    let value = left.value + right.value;
    let error = left.error + right.error;
    if !value.is_finite() || error > TARGET_ERROR {
        return Err(Error::ToleranceNotReached(error));
    }
    Ok(QuadratureResult { value, error })
}

/// Integrates `h` over `(0, 1/2]`, grading towards 0 when `singular`.
fn integrate_half(h: &dyn Fn(f64) -> f64, singular: bool) -> Result<QuadratureResult> {
    if !singular {
        return adaptive(h, 0.0, 0.5, MAX_BISECTIONS);
    }
    let mut value = 0.0;
    let mut error = 0.0;
    let mut prev: Option<f64> = None;
    let mut hi = 0.5;
    for j in 0..MAX_GRADED_PANELS {
        let lo = hi * 0.5;
        let panel = adaptive(h, lo, hi, MAX_BISECTIONS)?;
        value += panel.value;
        error += panel.error;
        hi = lo;

        let c = panel.value.abs();
        if let Some(p) = prev {
            if j >= 4 {
                if c == 0.0 && p == 0.0 {
                    return Ok(QuadratureResult { value, error });
                }
                if c < p {
                    let r = c / p;
                    let tail = c * r / (1.0 - r);
                    if tail < PANEL_TOL {
                        return Ok(QuadratureResult {
                            value,
                            error: error + tail,
                        });
                    }
                }
            }
        }
        prev = Some(c);
    }
    Err(Error::ToleranceNotReached(f64::INFINITY))
}

fn adaptive(h: &dyn Fn(f64) -> f64, a: f64, b: f64, depth: u32) -> Result<QuadratureResult> {
    let coarse = gauss(h, a, b, nodes_10());
    let fine = gauss(h, a, b, nodes_20());
    let err = (fine - coarse).abs();
    if !fine.is_finite() {
        return Err(Error::ToleranceNotReached(f64::INFINITY));
    }
    if err <= PANEL_TOL.max(1e-15 * fine.abs()) {
        return Ok(QuadratureResult {
            value: fine,
            error: err,
        });
    }
    if depth == 0 {
        return Err(Error::ToleranceNotReached(err));
    }
    let mid = 0.5 * (a + b);
    let l = adaptive(h, a, mid, depth - 1)?;
    let r = adaptive(h, mid, b, depth - 1)?;
    Ok(QuadratureResult {
        value: l.value + r.value,
        error: l.error + r.error,
    })
}

fn gauss(h: &dyn Fn(f64) -> f64, a: f64, b: f64, rule: &GaussRule) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| w * h(mid + half * x))
        .sum::<f64>()
        * half
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Computes the `n`-point Gauss–Legendre rule by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    GaussRule { nodes, weights }
}

fn nodes_10() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(10))
}

fn nodes_20() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(20))
}

//! Probability laws on subspaces: finite weighted laws and the
//! rotation-invariant law on `G(k, d)`.

use std::borrow::Cow;
use std::path::Path;

use crate::error::{check_dim, Error, Result};
use crate::fusion::FusionFrame;
use crate::linalg::{norm_sq, Matrix, SeededRng};
use crate::subspace::Subspace;
use crate::text::{fmt_f64, parse_f64, parse_usize, Lines};

/// Probabilities must sum to one within this tolerance.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Unit vectors must have norm one within this tolerance.
pub const UNIT_TOL: f64 = 1e-10;

/// `1 − ‖P_W x‖²` at or below this value is round-off: `x ∈ W`.
pub const CONTAINS_TOL: f64 = 1e-15;

/// A law on subspaces.
#[derive(Debug, Clone)]
pub enum SubspaceDistribution {
    Discrete(DiscreteLaw),
    Invariant { k: usize, d: usize },
}

/// Finitely many atoms with probabilities. Atoms may repeat.
#[derive(Debug, Clone)]
pub struct DiscreteLaw {
    atoms: Vec<Subspace>,
    probs: Vec<f64>,
    cdf: Vec<f64>,
    k: Option<usize>,
}

impl DiscreteLaw {
    fn build(atoms: Vec<Subspace>, probs: Vec<f64>, require_common_k: bool) -> Result<Self> {
        let first = atoms
            .first()
            .ok_or_else(|| Error::InvalidParameter("discrete law needs an atom".into()))?;
        let d = first.ambient_dim();
        let k0 = first.dim();
        check_dim(atoms.len(), probs.len())?;
        let mut common_k = true;
        for a in &atoms {
            check_dim(d, a.ambient_dim())?;
            common_k &= a.dim() == k0;
        }
        if require_common_k && !common_k {
            return Err(Error::MixedDimensions);
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidParameter(format!("probability {p} is negative")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidParameter(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Ok(Self {
            atoms,
            probs,
            cdf,
            k: common_k.then_some(k0),
        })
    }

    pub fn atoms(&self) -> &[Subspace] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn ambient_dim(&self) -> usize {
        self.atoms[0].ambient_dim()
    }

    /// Common atom dimension, `None` for mixed-dimension laws.
    pub fn subspace_dim(&self) -> Option<usize> {
        self.k
    }

    /// Inverse-CDF draw of an atom index.
    pub fn sample_index(&self, rng: &mut SeededRng) -> usize {
        let u = rng.uniform() * self.cdf[self.cdf.len() - 1];
        let i = self.cdf.partition_point(|&c| c <= u);
        // skip trailing zero-probability atoms if u landed on the top edge
        let mut i = i.min(self.atoms.len() - 1);
        while self.probs[i] == 0.0 && i > 0 {
            i -= 1;
        }
        i
    }

    pub fn expected_projection(&self) -> Matrix {
        let d = self.ambient_dim();
        let mut m = Matrix::zeros(d, d);
        for (a, &p) in self.atoms.iter().zip(&self.probs) {
            if p > 0.0 {
                m.add_scaled(p, &a.projector());
            }
        }
        m
    }

    /// `1 − ‖P_{W_n} x‖²` per atom, with round-off snapped to 0.
    pub(crate) fn residuals<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
        self.atoms
            .iter()
            .zip(&self.probs)
            .map(move |(a, &p)| (p, snap_residual(1.0 - a.proj_norm_sq_unchecked(x))))
    }

    pub(crate) fn potential_s_unchecked(&self, x: &[f64], s: f64) -> f64 {
        self.residuals(x)
            .filter(|(p, _)| *p > 0.0)
            .map(|(p, r)| p * r.powf(s))
            .sum()
    }

    pub(crate) fn potential_log_unchecked(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (p, r) in self.residuals(x) {
            if p > 0.0 {
                if r == 0.0 {
                    return f64::NEG_INFINITY;
                }
                acc += p * r.ln();
            }
        }
        acc
    }
}

pub(crate) fn snap_residual(r: f64) -> f64 {
    if r <= CONTAINS_TOL {
        0.0
    } else {
        r
    }
}

impl SubspaceDistribution {
    /// Law with atoms of a common dimension.
    pub fn discrete(atoms: Vec<Subspace>, probs: Vec<f64>) -> Result<Self> {
        Ok(Self::Discrete(DiscreteLaw::build(atoms, probs, true)?))
    }

    /// Law whose atoms may have different dimensions.
    pub fn discrete_mixed_dims(atoms: Vec<Subspace>, probs: Vec<f64>) -> Result<Self> {
        Ok(Self::Discrete(DiscreteLaw::build(atoms, probs, false)?))
    }

    pub fn uniform(atoms: Vec<Subspace>) -> Result<Self> {
        let n = atoms.len();
        Self::discrete(atoms, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn invariant(k: usize, d: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::InvalidParameter(format!(
                "invariant law needs 1 <= k <= d, got k={k}, d={d}"
            )));
        }
        Ok(Self::Invariant { k, d })
    }

    /// `Pr(W = W_n) = v_n² / Σ v_j²`.
    pub fn from_fusion_frame(ff: &FusionFrame) -> Result<Self> {
        let total: f64 = ff.weights().iter().map(|v| v * v).sum();
        let probs = ff.weights().iter().map(|v| v * v / total).collect();
        Self::discrete(ff.subspaces().to_vec(), probs)
    }

    /// Uniform over the spans of the canonical basis of `ℝ^d`.
    pub fn ronb(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("ronb needs d >= 1".into()));
        }
        Self::uniform((0..d).map(|i| Subspace::coordinate(d, &[i])).collect::<Result<_>>()?)
    }

    /// Uniform over the `d/k` consecutive coordinate blocks of size `k`.
    pub fn block_onb(d: usize, k: usize) -> Result<Self> {
        if k == 0 || d == 0 || d % k != 0 {
            return Err(Error::InvalidParameter(format!(
                "block_onb needs k dividing d, got d={d}, k={k}"
            )));
        }
        let atoms = (0..d / k)
            .map(|b| Subspace::coordinate(d, &(b * k..(b + 1) * k).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        Self::uniform(atoms)
    }

    /// Uniform over the lines through `(cos 2πj/K, sin 2πj/K)`, `j = 1..K`.
    pub fn roots_of_unity(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidParameter(format!("roots_of_unity needs K >= 3, got {k}")));
        }
        let atoms = (1..=k)
            .map(|j| {
                let t = 2.0 * std::f64::consts::PI * j as f64 / k as f64;
                Subspace::from_spanning(&[vec![t.cos(), t.sin()]], 1e-10)
            })
            .collect::<Result<_>>()?;
        Self::uniform(atoms)
    }

    /// Uniform over the six diagonals of the icosahedron, a unit-norm tight
    /// frame of lines in `ℝ³`.
    pub fn icosahedral() -> Result<Self> {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let vectors = [
            [0.0, 1.0, phi],
            [0.0, 1.0, -phi],
            [1.0, phi, 0.0],
            [1.0, -phi, 0.0],
            [phi, 0.0, 1.0],
            [-phi, 0.0, 1.0],
        ];
        let atoms = vectors
            .iter()
            .map(|v| Subspace::from_spanning(&[v.to_vec()], 1e-10))
            .collect::<Result<_>>()?;
        Self::uniform(atoms)
    }

    /// Uniform over `n` subspaces drawn once from the invariant law.
    pub fn random_uniform(n: usize, k: usize, d: usize, rng: &mut SeededRng) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one atom".into()));
        }
        let atoms = (0..n)
            .map(|_| Subspace::sample_invariant(rng, k, d))
            .collect::<Result<_>>()?;
        Self::uniform(atoms)
    }

    pub fn ambient_dim(&self) -> usize {
        match self {
            Self::Discrete(law) => law.ambient_dim(),
            Self::Invariant { d, .. } => *d,
        }
    }

    /// Common subspace dimension, `None` for mixed-dimension laws.
    pub fn subspace_dim(&self) -> Option<usize> {
        match self {
            Self::Discrete(law) => law.subspace_dim(),
            Self::Invariant { k, .. } => Some(*k),
        }
    }

    pub fn as_discrete(&self) -> Option<&DiscreteLaw> {
        match self {
            Self::Discrete(law) => Some(law),
            Self::Invariant { .. } => None,
        }
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Self::Invariant { .. })
    }

    pub fn sample(&self, rng: &mut SeededRng) -> Subspace {
        self.draw(rng).1.into_owned()
    }

    /// Draws a subspace, borrowing discrete atoms; the index is `Some` for
    /// discrete laws.
    pub fn draw(&self, rng: &mut SeededRng) -> (Option<usize>, Cow<'_, Subspace>) {
        match self {
            Self::Discrete(law) => {
                let i = law.sample_index(rng);
                (Some(i), Cow::Borrowed(&law.atoms[i]))
            }
            Self::Invariant { k, d } => (
                None,
                Cow::Owned(Subspace::sample_invariant(rng, *k, *d).expect("validated k, d")),
            ),
        }
    }

    /// `E[P_W]`.
    pub fn expected_projection(&self) -> Matrix {
        match self {
            Self::Discrete(law) => law.expected_projection(),
            Self::Invariant { k, d } => {
                let mut m = Matrix::identity(*d);
                m.scale(*k as f64 / *d as f64);
                m
            }
        }
    }

    fn check_unit(&self, x: &[f64]) -> Result<()> {
        check_dim(self.ambient_dim(), x.len())?;
        let n = norm_sq(x).sqrt();
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnitVector(n));
        }
        Ok(())
    }

    fn discrete_or_unsupported(&self) -> Result<&DiscreteLaw> {
        self.as_discrete()
            .ok_or(Error::UnsupportedVariant("potential of the invariant law"))
    }

    /// `E(1 − ‖P_W x‖²)^s` for unit `x`.
    pub fn potential_s(&self, x: &[f64], s: f64) -> Result<f64> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
        }
        let law = self.discrete_or_unsupported()?;
        self.check_unit(x)?;
        Ok(law.potential_s_unchecked(x, s))
    }

    /// `E log(1 − ‖P_W x‖²)`; `-∞` when a charged atom contains `x`.
    pub fn potential_log(&self, x: &[f64]) -> Result<f64> {
        let law = self.discrete_or_unsupported()?;
        self.check_unit(x)?;
        Ok(law.potential_log_unchecked(x))
    }

    /// `discrete d k N` and `N` records of a `p` line plus a subspace
    /// serialization, or `invariant d k`. Mixed-dimension laws write `k = 0`.
    pub fn to_text(&self) -> String {
        match self {
            Self::Invariant { k, d } => format!("invariant {d} {k}\n"),
            Self::Discrete(law) => {
                let mut out = format!(
                    "discrete {} {} {}\n",
                    law.ambient_dim(),
                    law.k.unwrap_or(0),
                    law.atoms.len()
                );
                for (a, &p) in law.atoms.iter().zip(&law.probs) {
                    out.push_str(&fmt_f64(p));
                    out.push('\n');
                    out.push_str(&a.to_text());
                }
                out
            }
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let header = lines.expect_line("distribution header")?;
        let mut toks = header.split_whitespace();
        let dist = match toks.next() {
            Some("invariant") => {
                let d = parse_usize(&lines, toks.next(), "d")?;
                let k = parse_usize(&lines, toks.next(), "k")?;
                Self::invariant(k, d).map_err(|e| lines.error(e.to_string()))?
            }
            Some("discrete") => {
                let d = parse_usize(&lines, toks.next(), "d")?;
                let k = parse_usize(&lines, toks.next(), "k")?;
                let n = parse_usize(&lines, toks.next(), "N")?;
                let mut atoms = Vec::with_capacity(n);
                let mut probs = Vec::with_capacity(n);
                for _ in 0..n {
                    let line = lines.expect_line("probability")?;
                    probs.push(parse_f64(&lines, Some(line), "probability")?);
                    let a = Subspace::read(&mut lines)?;
                    if a.ambient_dim() != d || (k != 0 && a.dim() != k) {
                        return Err(lines.error(format!(
                            "atom is {}x{}, header says d={d}, k={k}",
                            a.ambient_dim(),
                            a.dim()
                        )));
                    }
                    atoms.push(a);
                }
                let built = if k == 0 {
                    Self::discrete_mixed_dims(atoms, probs)
                } else {
                    Self::discrete(atoms, probs)
                };
                built.map_err(|e| lines.error(e.to_string()))?
            }
            other => {
                return Err(lines.error(format!(
                    "expected 'discrete' or 'invariant', found {:?}",
                    other.unwrap_or("")
                )))
            }
        };
        if toks.next().is_some() || lines.next_line().is_some() {
            return Err(lines.error("trailing content after distribution"));
        }
        Ok(dist)
    }

    /// Builtin spec or file path:
    /// `invariant:K:D`, `ronb:D`, `block_onb:D:K`, `roots:K`, `icosa`,
    /// `random:N:K:D:SEED`, otherwise a distribution file.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        let num = |i: usize| -> Result<usize> {
            parts
                .get(i)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Config(format!("bad distribution spec '{spec}'")))
        };
        let arity = |n: usize| -> Result<()> {
            if parts.len() == n {
                Ok(())
            } else {
                Err(Error::Config(format!("bad distribution spec '{spec}'")))
            }
        };
        match parts[0] {
            "invariant" => {
                arity(3)?;
                Self::invariant(num(1)?, num(2)?)
            }
            "ronb" => {
                arity(2)?;
                Self::ronb(num(1)?)
            }
            "block_onb" => {
                arity(3)?;
                Self::block_onb(num(1)?, num(2)?)
            }
            "roots" => {
                arity(2)?;
                Self::roots_of_unity(num(1)?)
            }
            "icosa" => {
                arity(1)?;
                Self::icosahedral()
            }
            "random" => {
                arity(5)?;
                let mut rng = SeededRng::new(num(4)? as u64, 0);
                Self::random_uniform(num(1)?, num(2)?, num(3)?, &mut rng)
            }
            _ if Path::new(spec).is_file() => Self::from_file(Path::new(spec)),
            _ => Err(Error::Config(format!(
                "unknown distribution `{spec}` (not a builtin and no such file)"
            ))),
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

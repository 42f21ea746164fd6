//! Weighted fusion frames, their frame operator and optimal bounds, and the
//! classical frame-operator reconstruction.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{axpy, dist_sq, sym_eig, Matrix, SymEig};
use crate::subspace::Subspace;
use crate::text::{fmt_f64, parse_f64, parse_usize, Lines};

/// Smallest admissible lower frame bound.
pub const MIN_FRAME_BOUND: f64 = 1e-10;

/// Optimal fusion frame bounds `A ≤ B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn is_tight(&self, tol: f64) -> bool {
        self.upper - self.lower <= tol * self.upper.max(1.0)
    }

    /// Contraction factor `(B − A)/(B + A)` of the classical iteration.
    pub fn contraction(&self) -> f64 {
        (self.upper - self.lower) / (self.upper + self.lower)
    }
}

/// Weighted family of subspaces `{(W_n, v_n)}` with `A > 0`.
#[derive(Debug, Clone)]
pub struct FusionFrame {
    subspaces: Vec<Subspace>,
    weights: Vec<f64>,
    operator: Matrix,
    eig: SymEig,
}

impl FusionFrame {
    pub fn new(subspaces: Vec<Subspace>, weights: Vec<f64>) -> Result<Self> {
        let first = subspaces
            .first()
            .ok_or_else(|| Error::InvalidParameter("fusion frame needs a subspace".into()))?;
        let d = first.ambient_dim();
        check_dim(subspaces.len(), weights.len())?;
        for w in &subspaces {
            check_dim(d, w.ambient_dim())?;
        }
        if let Some(v) = weights.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight {v} is not positive")));
        }

        let mut operator = Matrix::zeros(d, d);
        for (w, &v) in subspaces.iter().zip(&weights) {
            operator.add_scaled(v * v, &w.projector());
        }
        let eig = sym_eig(&operator)?;
        if eig.min() <= MIN_FRAME_BOUND {
            return Err(Error::NotAFrame(eig.min()));
        }
        Ok(Self {
            subspaces,
            weights,
            operator,
            eig,
        })
    }

    /// Unit weights.
    pub fn unweighted(subspaces: Vec<Subspace>) -> Result<Self> {
        let n = subspaces.len();
        Self::new(subspaces, vec![1.0; n])
    }

    pub fn ambient_dim(&self) -> usize {
        self.operator.rows()
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `S = Σ v_n² P_{W_n}`.
    pub fn frame_operator(&self) -> &Matrix {
        &self.operator
    }

    pub fn frame_bounds(&self) -> FrameBounds {
        FrameBounds {
            lower: self.eig.min(),
            upper: self.eig.max(),
        }
    }

    /// `y_n = P_{W_n} x` for every subspace.
    pub fn measure(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        check_dim(self.ambient_dim(), x.len())?;
        Ok(self.subspaces.iter().map(|w| w.project_unchecked(x)).collect())
    }

    /// Classical reconstruction
    /// `x_n = x_{n−1} + 2/(A+B) · (Σ v_j² y_j − S x_{n−1})`.
    ///
    /// When `truth` is given, `errors[n] = ‖truth − x_n‖` for `n = 0..=n_iter`;
    /// otherwise `errors` is empty.
    pub fn classic_recover(
        &self,
        y: &[Vec<f64>],
        x0: &[f64],
        n_iter: usize,
        truth: Option<&[f64]>,
    ) -> Result<ClassicRecovery> {
        let d = self.ambient_dim();
        check_dim(self.len(), y.len())?;
        check_dim(d, x0.len())?;
        for yn in y {
            check_dim(d, yn.len())?;
        }
        if let Some(t) = truth {
            check_dim(d, t.len())?;
        }
        let bounds = self.frame_bounds();
        let relax = 2.0 / (bounds.lower + bounds.upper);

        let mut target = vec![0.0; d];
        for (yn, &v) in y.iter().zip(&self.weights) {
            axpy(v * v, yn, &mut target);
        }

        let mut x = x0.to_vec();
        let mut errors = Vec::new();
        if let Some(t) = truth {
            errors.push(dist_sq(t, &x).sqrt());
        }
        for _ in 0..n_iter {
            let sx = self.operator.matvec(&x);
            for i in 0..d {
                x[i] += relax * (target[i] - sx[i]);
            }
            if let Some(t) = truth {
                errors.push(dist_sq(t, &x).sqrt());
            }
        }
        Ok(ClassicRecovery {
            estimate: x,
            errors,
        })
    }

    /// Text form: `d N`, then per subspace a `v k` line and `k` basis rows.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.ambient_dim(), self.len());
        for (w, &v) in self.subspaces.iter().zip(&self.weights) {
            out.push_str(&format!("{} {}\n", fmt_f64(v), w.dim()));
            out.push_str(&w.rows_text());
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let header = lines.expect_line("header 'd N'")?;
        let mut toks = header.split_whitespace();
        let d = parse_usize(&lines, toks.next(), "d")?;
        let n = parse_usize(&lines, toks.next(), "N")?;
        let mut subspaces = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines.expect_line("weight line 'v k'")?;
            let mut toks = line.split_whitespace();
            weights.push(parse_f64(&lines, toks.next(), "weight")?);
            let k = parse_usize(&lines, toks.next(), "k")?;
            subspaces.push(Subspace::read_rows(&mut lines, d, k)?);
        }
        if lines.next_line().is_some() {
            return Err(lines.error("trailing content after fusion frame"));
        }
        Self::new(subspaces, weights)
    }
}

#[derive(Debug, Clone)]
pub struct ClassicRecovery {
    pub estimate: Vec<f64>,
    pub errors: Vec<f64>,
}

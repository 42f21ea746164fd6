//! Subspaces of `ℝ^d` carried by an orthonormal basis.

use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, gaussian_matrix, orthonormalize, Matrix, SeededRng, DEFAULT_TOL};
use crate::text::{fmt_row, parse_usize, Lines};

/// Tolerance under which two subspaces are considered equal.
pub const SPAN_EQ_TOL: f64 = 1e-8;

/// A `k`-dimensional subspace of `ℝ^d`, stored as a `d × k` matrix with
/// orthonormal columns. Immutable once built.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Subspace spanned by `vectors`, which must be linearly independent.
    pub fn from_spanning(vectors: &[Vec<f64>], tol: f64) -> Result<Self> {
        let d = vectors
            .first()
            .ok_or_else(|| Error::InvalidParameter("no spanning vectors".into()))?
            .len();
        for v in vectors {
            check_dim(d, v.len())?;
        }
        Self::from_matrix(&Matrix::from_columns(vectors), tol)
    }

    /// Column span of `m`.
    pub fn from_matrix(m: &Matrix, tol: f64) -> Result<Self> {
        Ok(Self {
            basis: orthonormalize(m, tol)?,
        })
    }

    /// Wraps a basis that is already orthonormal (checked to `1e-10`).
    pub fn from_orthonormal(basis: Matrix) -> Result<Self> {
        let k = basis.cols();
        if k == 0 || k > basis.rows() {
            return Err(Error::InvalidParameter(format!(
                "basis must be d x k with 1 <= k <= d, got {}x{k}",
                basis.rows()
            )));
        }
        let err = basis.transpose().matmul(&basis).sub(&Matrix::identity(k)).max_abs();
        if !(err <= DEFAULT_TOL) {
            return Err(Error::InvalidParameter(format!(
                "basis columns are not orthonormal (error {err:.3e})"
            )));
        }
        Ok(Self { basis })
    }

    /// Span of the given canonical basis vectors.
    pub fn coordinate(d: usize, indices: &[usize]) -> Result<Self> {
        let mut b = Matrix::zeros(d, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if i >= d {
                return Err(Error::InvalidParameter(format!("coordinate {i} out of range")));
            }
            b[(i, j)] = 1.0;
        }
        Self::from_orthonormal(b)
    }

    /// The whole space `ℝ^d`.
    pub fn full(d: usize) -> Self {
        Self {
            basis: Matrix::identity(d),
        }
    }

    /// Draw from the rotation-invariant law on `G(k, d)`: orthonormalised
    /// Gaussian matrix.
    pub fn sample_invariant(rng: &mut SeededRng, k: usize, d: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(Error::InvalidParameter(format!(
                "invariant sampling needs 1 <= k <= d, got k={k}, d={d}"
            )));
        }
        loop {
            match orthonormalize(&gaussian_matrix(rng, d, k), 0.0) {
                Ok(basis) => return Ok(Self { basis }),
                Err(Error::RankDeficient { .. }) => continue,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<f64>> {
        (0..self.dim()).map(|j| self.basis.column(j)).collect()
    }

    /// Coordinates `Bᵀx` of the projection in the stored basis.
    pub(crate) fn coords(&self, x: &[f64]) -> Vec<f64> {
        self.basis.tr_matvec(x)
    }

    /// Orthogonal projection `P_W x = B Bᵀ x`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.ambient_dim(), x.len())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &[f64]) -> Vec<f64> {
        self.basis.matvec(&self.coords(x))
    }

    /// `‖P_W x‖²`, computed as `‖Bᵀx‖²`.
    pub fn proj_norm_sq(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.ambient_dim(), x.len())?;
        Ok(self.proj_norm_sq_unchecked(x))
    }

    pub(crate) fn proj_norm_sq_unchecked(&self, x: &[f64]) -> f64 {
        let c = self.coords(x);
        dot(&c, &c)
    }

    /// Matrix of the orthogonal projector, `B Bᵀ`.
    pub fn projector(&self) -> Matrix {
        self.basis.outer_self()
    }

    /// Frobenius distance between the two projectors.
    pub fn grassmann_distance(&self, other: &Subspace) -> Result<f64> {
        check_dim(self.ambient_dim(), other.ambient_dim())?;
        Ok(self.projector().sub(&other.projector()).frobenius_norm())
    }

    /// Span equality, up to [`SPAN_EQ_TOL`] in the projector metric.
    pub fn same_span(&self, other: &Subspace) -> bool {
        self.grassmann_distance(other)
            .map(|dist| dist <= SPAN_EQ_TOL)
            .unwrap_or(false)
    }

    /// Whether `x` lies in the subspace, relative to `‖x‖`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.ambient_dim() {
            return false;
        }
        let p = self.project_unchecked(x);
        let resid: f64 = x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
        resid.sqrt() <= tol * dot(x, x).sqrt().max(1.0)
    }

    /// Text form: `d k` followed by the `k` basis vectors, one per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.ambient_dim(), self.dim());
        out.push_str(&self.rows_text());
        out
    }

    /// Only the basis rows of [`Self::to_text`].
    pub fn rows_text(&self) -> String {
        let mut out = String::new();
        for v in self.basis_vectors() {
            out.push_str(&fmt_row(&v));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let s = Self::read(&mut lines)?;
        if lines.next_line().is_some() {
            return Err(lines.error("trailing content after subspace"));
        }
        Ok(s)
    }

    /// Reads a `d k` header and the basis rows.
    pub(crate) fn read(lines: &mut Lines<'_>) -> Result<Self> {
        let header = lines.expect_line("subspace header 'd k'")?;
        let mut toks = header.split_whitespace();
        let d = parse_usize(lines, toks.next(), "d")?;
        let k = parse_usize(lines, toks.next(), "k")?;
        Self::read_rows(lines, d, k)
    }

    /// Reads `k` rows of `d` entries and re-orthonormalises them.
    pub(crate) fn read_rows(lines: &mut Lines<'_>, d: usize, k: usize) -> Result<Self> {
        if k == 0 || k > d {
            return Err(lines.error(format!("need 1 <= k <= d, got d={d}, k={k}")));
        }
        let mut rows = Vec::with_capacity(k);
        for _ in 0..k {
            rows.push(lines.floats("basis row", d)?);
        }
        Self::from_spanning(&rows, DEFAULT_TOL).map_err(|e| lines.error(e.to_string()))
    }
}

use super::{norm_sq, Matrix};
use crate::error::{Error, Result};

/// Thin QR factorisation by Householder reflections, returning the `d × k`
/// factor `Q` with orthonormal columns spanning the columns of `m`.
///
/// The sign of each column is fixed so that the diagonal of `R` is positive,
/// which makes `Q` a deterministic function of `m`. In particular an input
/// that already has orthonormal columns is returned unchanged up to rounding.
///
/// Fails with [`Error::RankDeficient`] when the component of some column
/// orthogonal to the previous ones has norm `<= tol`.
pub fn orthonormalize(m: &Matrix, tol: f64) -> Result<Matrix> {
    let (d, k) = (m.rows(), m.cols());
    if k == 0 || k > d {
        return Err(Error::InvalidParameter(format!(
            "orthonormalize needs 1 <= k <= d, got d={d}, k={k}"
        )));
    }
    if !m.is_finite() {
        return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
    }

    let mut a = m.clone();
    let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut diag = Vec::with_capacity(k);

    for j in 0..k {
        let mut v: Vec<f64> = (j..d).map(|i| a[(i, j)]).collect();
        let col_norm = norm_sq(&v).sqrt();
        if col_norm <= tol {
            return Err(Error::RankDeficient { column: j, pivot: col_norm });
        }
        let alpha = if v[0] >= 0.0 { -col_norm } else { col_norm };
        v[0] -= alpha;
        let vv = norm_sq(&v);
        // H = I - 2 v vᵀ / vᵀv applied to the trailing block.
        for c in j..k {
            let s: f64 = (j..d).map(|i| v[i - j] * a[(i, c)]).sum();
            let f = 2.0 * s / vv;
            for i in j..d {
                a[(i, c)] -= f * v[i - j];
            }
        }
        reflectors.push(v);
        diag.push(alpha);
    }

    // Q = H_0 H_1 ... H_{k-1} [I_k; 0]
    let mut q = Matrix::zeros(d, k);
    for j in 0..k {
        q[(j, j)] = 1.0;
    }
    for (j, v) in reflectors.iter().enumerate().rev() {
        let vv = norm_sq(v);
        for c in 0..k {
            let s: f64 = (j..d).map(|i| v[i - j] * q[(i, c)]).sum();
            if s == 0.0 {
                continue;
            }
            let f = 2.0 * s / vv;
            for i in j..d {
                q[(i, c)] -= f * v[i - j];
            }
        }
    }

    for (j, &r) in diag.iter().enumerate() {
        if r < 0.0 {
            for i in 0..d {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    Ok(q)
}

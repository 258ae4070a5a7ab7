use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Largest dense eigenproblem the solvers accept.
pub const MAX_DENSE_DIM: usize = 4000;

/// Eigenpairs with eigenvalues ascending (or ascending in magnitude for the
/// generalized solver) and eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// `‖A v − λ B v‖` per pair (`B = I` for the standard problem).
    pub residuals: Vec<f64>,
}

fn symmetrize(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::Invalid(format!(
            "{}x{} matrix is not square",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() > MAX_DENSE_DIM {
        return Err(Error::Invalid(format!(
            "dense eigensolve limited to {MAX_DENSE_DIM} rows, got {}",
            a.nrows()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("matrix has non-finite entries".into()));
    }
    Ok((a + a.transpose()) * 0.5)
}

/// Full spectrum of a symmetric matrix.
///
/// Fails with [`Error::Convergence`] when the iteration does not converge or
/// any residual exceeds `tol · ‖A‖_F`.
pub fn eigensolve_sym(a: &DMatrix<f64>, tol: f64) -> Result<EigenResult> {
    let s = symmetrize(a)?;
    let n = s.nrows();
    if n == 0 {
        return Ok(EigenResult {
            values: vec![],
            vectors: DMatrix::zeros(0, 0),
            residuals: vec![],
        });
    }
    let eig = s
        .clone()
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::Convergence("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    let residuals = residuals(&s, None, &values, &vectors);
    let bound = tol * s.norm();
    if let Some(k) = residuals.iter().position(|&r| r > bound.max(f64::MIN_POSITIVE)) {
        return Err(Error::Convergence(format!(
            "eigenpair {k} residual {:e} exceeds {bound:e}",
            residuals[k]
        )));
    }
    Ok(EigenResult {
        values,
        vectors,
        residuals,
    })
}

fn residuals(a: &DMatrix<f64>, m: Option<&[f64]>, values: &[f64], vectors: &DMatrix<f64>) -> Vec<f64> {
    let av = a * vectors;
    (0..values.len())
        .map(|k| {
            let v = vectors.column(k);
            let mut r: DVector<f64> = av.column(k).into_owned();
            for i in 0..v.len() {
                let mi = m.map_or(1.0, |m| m[i]);
                r[i] -= values[k] * mi * v[i];
            }
            r.norm()
        })
        .collect()
}

/// The `count` smallest-magnitude eigenpairs of `A v = λ M v` for diagonal
/// positive `M`, with `Vᵀ M V = I`.
pub fn eigensolve_generalized(a: &DMatrix<f64>, m_diag: &[f64], count: usize) -> Result<EigenResult> {
    let s = symmetrize(a)?;
    let n = s.nrows();
    if m_diag.len() != n {
        return Err(Error::Invalid(format!(
            "mass diagonal has {} entries for {n} rows",
            m_diag.len()
        )));
    }
    if let Some(i) = m_diag.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::Positivity {
            index: i,
            value: m_diag[i],
        });
    }
    let inv_sqrt: Vec<f64> = m_diag.iter().map(|v| 1.0 / v.sqrt()).collect();
    let scaled = DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * s[(i, j)] * inv_sqrt[j]);
    let std = eigensolve_sym(&scaled, 1e-9)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        std.values[i]
            .abs()
            .total_cmp(&std.values[j].abs())
            .then(std.values[i].total_cmp(&std.values[j]))
    });
    order.truncate(count.min(n));
    let values: Vec<f64> = order.iter().map(|&k| std.values[k]).collect();
    let vectors = DMatrix::from_fn(n, order.len(), |r, c| inv_sqrt[r] * std.vectors[(r, order[c])]);
    let residuals = residuals(&s, Some(m_diag), &values, &vectors);
    Ok(EigenResult {
        values,
        vectors,
        residuals,
    })
}

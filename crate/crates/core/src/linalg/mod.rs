//! Sparse assembly, dense eigensolvers, SPD solves and matrix I/O.

mod eigen;
mod ldl;
mod mtx;
mod sparse;

pub use eigen::{eigensolve_generalized, eigensolve_sym, EigenResult, MAX_DENSE_DIM};
pub use ldl::{nested_dissection_order, LdlSymbolic, PivotPolicy, SparseLdl};
pub use mtx::{read_matrix_market, read_vector_csv, write_matrix_market, write_vector_csv};
pub use sparse::{assemble, SparseMatrix};

/// Row-major dense storage is not needed; dense work uses nalgebra.
pub type DenseMatrix = nalgebra::DMatrix<f64>;

use crate::error::{Error, Result};

/// Relative pivot threshold below which a reduced matrix is declared not
/// positive definite.
pub const SPD_PIVOT_TOLERANCE: f64 = 1e-12;

/// Solves `A x = b` for a symmetric matrix after eliminating Dirichlet
/// entries `fixed = [(index, value)]`.
///
/// The returned vector has the fixed entries set exactly; rows of `b` at
/// fixed indices are ignored. Fails with [`Error::NotSpd`] when the reduced
/// matrix has a non-positive pivot.
pub fn solve_spd(a: &SparseMatrix, b: &[f64], fixed: &[(usize, f64)]) -> Result<Vec<f64>> {
    let n = a.n_rows();
    if a.n_cols() != n || b.len() != n {
        return Err(Error::Invalid(format!(
            "system is {}x{} with {} right-hand entries",
            a.n_rows(),
            a.n_cols(),
            b.len()
        )));
    }
    let mut x = vec![0.0; n];
    let mut is_fixed = vec![false; n];
    for &(i, v) in fixed {
        if i >= n {
            return Err(Error::Index {
                index: i,
                bound: n,
                context: "fixed value".into(),
            });
        }
        if !v.is_finite() {
            return Err(Error::Invalid(format!("fixed value at {i} is not finite")));
        }
        is_fixed[i] = true;
        x[i] = v;
    }
    let free: Vec<usize> = (0..n).filter(|&i| !is_fixed[i]).collect();
    if free.is_empty() {
        return Ok(x);
    }
    // b_red = b_free - A_free,fixed x_fixed
    let mut rhs: Vec<f64> = Vec::with_capacity(free.len());
    for &i in &free {
        let (cols, vals) = a.row(i);
        let coupling: f64 = cols
            .iter()
            .zip(vals)
            .filter(|(j, _)| is_fixed[**j])
            .map(|(&j, &v)| v * x[j])
            .sum();
        rhs.push(b[i] - coupling);
    }
    let red = a.select(&free, &free);
    // symmetrize the pattern so the factorization sees both triangles
    let red = red.add(0.5, &red.transpose(), 0.5);
    let scale = red.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = SPD_PIVOT_TOLERANCE * scale.max(f64::MIN_POSITIVE);
    let f = SparseLdl::factorize(&red, None, PivotPolicy::Positive { threshold }).map_err(|e| match e {
        Error::NotSpd { pivot, value } => Error::NotSpd {
            pivot: free[pivot],
            value,
        },
        e => e,
    })?;
    let mut y = f.solve(&rhs);
    // one step of iterative refinement
    let r = red.mul_vec(&y);
    let corr: Vec<f64> = rhs.iter().zip(&r).map(|(p, q)| p - q).collect();
    let dy = f.solve(&corr);
    for (yi, di) in y.iter_mut().zip(&dy) {
        *yi += di;
    }
    for (k, &i) in free.iter().enumerate() {
        x[i] = y[k];
    }
    Ok(x)
}

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Real sparse matrix in compressed-row form with sorted, unique columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates in
    /// the order they appear.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        for &(i, j, _) in triplets {
            if i >= n_rows {
                return Err(Error::Index {
                    index: i,
                    bound: n_rows,
                    context: "triplet row".into(),
                });
            }
            if j >= n_cols {
                return Err(Error::Index {
                    index: j,
                    bound: n_cols,
                    context: "triplet column".into(),
                });
            }
        }
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        // stable: equal keys keep input order so the summation order is fixed
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (i, j, v) = triplets[k];
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: diag.to_vec(),
        }
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] != 0.0 {
                    t.push((i, j, m[(i, j)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &t).expect("indices in range")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        cols.binary_search(&j).map_or(0.0, |k| vals[k])
    }

    /// Entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (c, v) = self.row(i);
            c.iter().zip(v).map(move |(&j, &x)| (i, j, x))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| {
                let (c, v) = self.row(i);
                c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum()
            })
            .collect()
    }

    /// `y += alpha * A x`
    pub fn mul_vec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (c, v) = self.row(i);
            let s: f64 = c.iter().zip(v).map(|(&j, &a)| a * x[j]).sum();
            *yi += alpha * s;
        }
    }

    /// `y += alpha * Aᵀ x`
    pub fn mul_transpose_vec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        for (i, &xi) in x.iter().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &a) in c.iter().zip(v) {
                y[j] += alpha * a * xi;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<(usize, usize, f64)> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n_cols, self.n_rows, &t).expect("indices in range")
    }

    /// `alpha * self + beta * other` over the union of both patterns.
    pub fn add(&self, alpha: f64, other: &SparseMatrix, beta: f64) -> Self {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        let mut t: Vec<(usize, usize, f64)> = self.triplets().map(|(i, j, v)| (i, j, alpha * v)).collect();
        t.extend(other.triplets().map(|(i, j, v)| (i, j, beta * v)));
        Self::from_triplets(self.n_rows, self.n_cols, &t).expect("indices in range")
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n_rows)
            .map(|i| self.row(i).1.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            m[(i, j)] += v;
        }
        m
    }

    /// Submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_map = vec![usize::MAX; self.n_cols];
        for (k, &j) in cols.iter().enumerate() {
            col_map[j] = k;
        }
        let mut t = Vec::new();
        for (r, &i) in rows.iter().enumerate() {
            let (c, v) = self.row(i);
            for (&j, &x) in c.iter().zip(v) {
                if col_map[j] != usize::MAX {
                    t.push((r, col_map[j], x));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), &t).expect("indices in range")
    }
}

/// Assembles an `n × n` matrix from triplets; duplicates are summed.
pub fn assemble(triplets: &[(usize, usize, f64)], n: usize) -> Result<SparseMatrix> {
    SparseMatrix::from_triplets(n, n, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicates_sum() {
        let m = assemble(&[(0, 0, 1.0), (0, 0, 2.0)], 1).unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(m.get(0, 0), 3.0);
    }

    #[test]
    fn empty_is_zero() {
        let m = assemble(&[], 3).unwrap();
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.to_dense(), DMatrix::zeros(3, 3));
        assert_eq!(m.mul_vec(&[1.0, 2.0, 3.0]), vec![0.0; 3]);
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(
            assemble(&[(0, 3, 1.0)], 3),
            Err(Error::Index { index: 3, .. })
        ));
    }

    #[test]
    fn select_and_transpose() {
        let m = SparseMatrix::from_triplets(2, 3, &[(0, 1, 2.0), (1, 2, 5.0), (1, 0, -1.0)]).unwrap();
        let t = m.transpose();
        assert_eq!(t.get(1, 0), 2.0);
        assert_eq!(t.get(2, 1), 5.0);
        let s = m.select(&[1], &[2, 0]);
        assert_eq!(s.to_dense(), DMatrix::from_row_slice(1, 2, &[5.0, -1.0]));
    }

    proptest! {
        #[test]
        fn matches_dense_accumulation(
            entries in proptest::collection::vec((0usize..6, 0usize..6, -10.0f64..10.0), 0..60)
        ) {
            let m = assemble(&entries, 6).unwrap();
            let mut dense = DMatrix::<f64>::zeros(6, 6);
            for &(i, j, v) in &entries {
                dense[(i, j)] += v;
            }
            let diff = (m.to_dense() - &dense).abs().max();
            prop_assert!(diff <= 1e-14 * (1.0 + dense.abs().max()));
            let x: Vec<f64> = (0..6).map(|k| k as f64 - 2.5).collect();
            let y = m.mul_vec(&x);
            let yd = &dense * nalgebra::DVector::from_vec(x.clone());
            for k in 0..6 {
                prop_assert!((y[k] - yd[k]).abs() <= 1e-12 * (1.0 + yd[k].abs()));
            }
        }
    }
}

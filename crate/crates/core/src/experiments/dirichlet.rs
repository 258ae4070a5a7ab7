use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_spd, SparseMatrix};
use crate::mesh::TetMesh;

/// Labels and boundary values of a two-sided Dirichlet problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletSetup {
    pub inner_label: i32,
    pub outer_label: i32,
    pub mid_label: i32,
    pub inner_value: f64,
    pub outer_value: f64,
}

impl Default for DirichletSetup {
    fn default() -> Self {
        let labels = crate::mesh::ShellLabels::default();
        Self {
            inner_label: labels.inner,
            outer_label: labels.outer,
            mid_label: labels.middle,
            inner_value: 1.0,
            outer_value: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletSolution {
    pub values: Vec<f64>,
    pub mid_count: usize,
    pub mid_mean: f64,
    /// Population variance of the values on mid-labeled vertices.
    pub mid_variance: f64,
}

/// Minimizes `−fᵀ(L+Lᵀ)f` with `f` fixed on the inner and outer label sets
/// and reports the spread on the middle set.
///
/// Fails with [`Error::NotSpd`] when the energy is not convex on the free
/// vertices.
pub fn dirichlet(mesh: &TetMesh, l: &SparseMatrix, setup: &DirichletSetup) -> Result<DirichletSolution> {
    let n = mesh.num_vertices();
    if l.n_rows() != n || l.n_cols() != n {
        return Err(Error::Invalid(format!(
            "{}x{} Laplacian for {n} vertices",
            l.n_rows(),
            l.n_cols()
        )));
    }
    if setup.inner_label == setup.outer_label && setup.inner_value != setup.outer_value {
        return Err(Error::Invalid(
            "inner and outer labels coincide with different values".into(),
        ));
    }
    let labels = mesh.labels();
    let fixed: Vec<(usize, f64)> = (0..n)
        .filter_map(|i| {
            if labels[i] == setup.inner_label {
                Some((i, setup.inner_value))
            } else if labels[i] == setup.outer_label {
                Some((i, setup.outer_value))
            } else {
                None
            }
        })
        .collect();
    if fixed.is_empty() {
        return Err(Error::Invalid("no vertex carries a boundary label".into()));
    }
    let mid: Vec<usize> = (0..n).filter(|&i| labels[i] == setup.mid_label).collect();
    if mid.is_empty() {
        return Err(Error::Invalid(format!("no vertex carries label {}", setup.mid_label)));
    }
    let energy = l.add(-1.0, &l.transpose(), -1.0);
    let values = solve_spd(&energy, &vec![0.0; n], &fixed)?;
    let mean = mid.iter().map(|&i| values[i]).sum::<f64>() / mid.len() as f64;
    let variance = mid.iter().map(|&i| (values[i] - mean).powi(2)).sum::<f64>() / mid.len() as f64;
    Ok(DirichletSolution {
        values,
        mid_count: mid.len(),
        mid_mean: mean,
        mid_variance: variance,
    })
}

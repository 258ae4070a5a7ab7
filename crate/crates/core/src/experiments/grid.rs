use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dual::{build_operators, DualOperators, KERNEL_TOLERANCE};
use crate::error::{Error, Result};
use crate::linalg::eigensolve_generalized;
use crate::mesh::{make_grid, Connectivity, TetMesh};
use crate::optim::{Method, OptimizationReport, OptimizeOptions};

/// Largest grid side accepted by [`grid_eigen`].
pub const MAX_GRID_SIDE: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSetup {
    pub n: usize,
    pub h: f64,
    pub diagonal: u8,
    pub method: Method,
    /// Eliminate the `k = 0` plane.
    pub pin_base: bool,
    pub eigen_count: usize,
}

/// Generalized eigenpairs of a grid Laplacian and the rotation bias of the
/// lowest non-constant mode.
#[derive(Debug, Clone)]
pub struct GridEigen {
    pub mesh: TetMesh,
    pub operators: DualOperators,
    /// Lattice coordinates `(i, j, k)` of each row of `vectors`.
    pub free: Vec<[usize; 3]>,
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
    /// `‖S v − λ M v‖` per pair.
    pub residuals: Vec<f64>,
    /// Index into `values` of the mode the bias is measured on.
    pub bias_mode: usize,
    pub bias_metric: f64,
    pub optimization: Option<OptimizationReport>,
}

fn lattice(n: usize, v: usize) -> [usize; 3] {
    [v % (n + 1), (v / (n + 1)) % (n + 1), v / ((n + 1) * (n + 1))]
}

fn vertex(n: usize, [i, j, k]: [usize; 3]) -> usize {
    i + (n + 1) * (j + (n + 1) * k)
}

/// Builds an `n³` grid, eliminates the base plane if requested and solves
/// `S v = λ M v` with `S = −(L+Lᵀ)/2` restricted to the free vertices.
///
/// The bias metric is the eigen-residual of the lowest mode with `|λ|` above
/// the kernel tolerance after rotating it 90° about the z axis of the
/// lattice, `‖S Rv − λ M Rv‖ / (|λ| ‖M Rv‖)`. It vanishes when the rotated
/// mode is again a mode, which is what a grid-independent operator gives even
/// on degenerate eigenspaces.
pub fn grid_eigen(setup: &GridSetup, options: &OptimizeOptions) -> Result<GridEigen> {
    let n = setup.n;
    if n == 0 || n > MAX_GRID_SIDE {
        return Err(Error::Invalid(format!("grid side {n} outside 1..={MAX_GRID_SIDE}")));
    }
    if !(setup.h > 0.0 && setup.h.is_finite()) {
        return Err(Error::Invalid(format!("grid spacing {} is not positive", setup.h)));
    }
    if setup.diagonal >= 4 {
        return Err(Error::Invalid(format!("diagonal {} outside 0..4", setup.diagonal)));
    }
    let mesh = make_grid(n, n, n, setup.h, setup.diagonal);
    let conn = Connectivity::new(&mesh)?;
    let (centers, optimization) = setup.method.centers(&mesh, &conn, options)?;
    let operators = build_operators(&mesh, &conn, &centers)?;

    let nv = mesh.num_vertices();
    let free_ids: Vec<usize> = (0..nv).filter(|&v| !setup.pin_base || lattice(n, v)[2] > 0).collect();
    let mut position = vec![usize::MAX; nv];
    for (r, &v) in free_ids.iter().enumerate() {
        position[v] = r;
    }
    let l = operators.laplacian.select(&free_ids, &free_ids).to_dense();
    let s = -(&l + l.transpose()) * 0.5;
    let mass_all = operators.mass.diagonal();
    let mass: Vec<f64> = free_ids.iter().map(|&v| mass_all[v]).collect();
    let count = setup.eigen_count.max(1).min(free_ids.len());
    let eig = eigensolve_generalized(&s, &mass, free_ids.len())?;

    let scale = eig.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let bias_mode = eig
        .values
        .iter()
        .position(|v| v.abs() > KERNEL_TOLERANCE * scale)
        .ok_or_else(|| Error::Invalid("operator has no non-constant mode".into()))?;
    let lambda = eig.values[bias_mode];
    let v = eig.vectors.column(bias_mode);
    // (i, j, k) -> (n - j, i, k)
    let mut rotated = DVector::zeros(free_ids.len());
    for (r, &id) in free_ids.iter().enumerate() {
        let [i, j, k] = lattice(n, id);
        rotated[position[vertex(n, [n - j, i, k])]] = v[r];
    }
    let m_rot = DVector::from_iterator(free_ids.len(), rotated.iter().zip(&mass).map(|(x, m)| x * m));
    let residual = &s * &rotated - &m_rot * lambda;
    let bias_metric = residual.norm() / (lambda.abs() * m_rot.norm());

    Ok(GridEigen {
        free: free_ids.iter().map(|&v| lattice(n, v)).collect(),
        values: eig.values[..count].to_vec(),
        vectors: eig.vectors.columns(0, count).into_owned(),
        residuals: eig.residuals[..count].to_vec(),
        bias_mode,
        bias_metric,
        optimization,
        mesh,
        operators,
    })
}

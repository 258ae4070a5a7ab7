use rayon::prelude::*;

use super::hexahedron::{build, hex_volume, local_ids};
use super::local::{local_operators, LocalOperators};
use super::CenterSet;
use crate::error::Result;
use crate::linalg::SparseMatrix;
use crate::mesh::{Connectivity, TetMesh};

/// Local operators of every tet, in tet order.
pub fn all_local_operators(mesh: &TetMesh, conn: &Connectivity, centers: &CenterSet) -> Result<Vec<LocalOperators>> {
    centers.validate(mesh, conn)?;
    (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| local_operators(&mesh.tet_points(t), &centers.local(conn, t)))
        .collect()
}

/// Signed hexahedron volumes of each tet's four vertices, in tet order.
pub fn tet_hex_volumes(mesh: &TetMesh, conn: &Connectivity, centers: &CenterSet) -> Result<Vec<[f64; 4]>> {
    centers.validate(mesh, conn)?;
    Ok((0..mesh.num_tets())
        .into_par_iter()
        .map(|t| {
            let p = mesh.tet_points(t);
            let c = centers.local(conn, t);
            let ids = local_ids(mesh, conn, t);
            std::array::from_fn(|i| hex_volume(&build(&p, &c, &ids, i)))
        })
        .collect())
}

/// Diagonal lumped mass matrix. Negative entries are kept.
pub fn mass_matrix(mesh: &TetMesh, conn: &Connectivity, centers: &CenterSet) -> Result<SparseMatrix> {
    let vols = tet_hex_volumes(mesh, conn, centers)?;
    Ok(SparseMatrix::from_diagonal(&mass_diagonal(mesh, &vols)))
}

pub(crate) fn mass_diagonal(mesh: &TetMesh, vols: &[[f64; 4]]) -> Vec<f64> {
    let mut diag = vec![0.0; mesh.num_vertices()];
    for (tet, v) in mesh.tets().iter().zip(vols) {
        for k in 0..4 {
            diag[tet[k]] += v[k];
        }
    }
    diag
}

/// Scatters local 4×4 matrices into the global matrix in (tet, row, column)
/// order.
pub fn assemble_laplacian(mesh: &TetMesh, locals: &[LocalOperators]) -> Result<SparseMatrix> {
    let mut triplets = Vec::with_capacity(16 * mesh.num_tets());
    for (tet, ops) in mesh.tets().iter().zip(locals) {
        for a in 0..4 {
            for b in 0..4 {
                triplets.push((tet[a], tet[b], ops.l[(a, b)]));
            }
        }
    }
    crate::linalg::assemble(&triplets, mesh.num_vertices())
}

/// Global Laplacian `Σ_t S_tᵀ D_t G_t S_t` (negative semi-definite convention).
pub fn laplacian(mesh: &TetMesh, conn: &Connectivity, centers: &CenterSet) -> Result<SparseMatrix> {
    let locals = all_local_operators(mesh, conn, centers)?;
    assemble_laplacian(mesh, &locals)
}

/// Mass matrix, Laplacian and local operators of one center set.
#[derive(Debug, Clone)]
pub struct DualOperators {
    pub mass: SparseMatrix,
    pub laplacian: SparseMatrix,
    pub locals: Vec<LocalOperators>,
}

pub fn build_operators(mesh: &TetMesh, conn: &Connectivity, centers: &CenterSet) -> Result<DualOperators> {
    let locals = all_local_operators(mesh, conn, centers)?;
    let laplacian = assemble_laplacian(mesh, &locals)?;
    let mass = mass_matrix(mesh, conn, centers)?;
    Ok(DualOperators {
        mass,
        laplacian,
        locals,
    })
}

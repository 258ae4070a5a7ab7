use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{eigensolve_sym, SparseMatrix, MAX_DENSE_DIM};
use crate::mesh::{Connectivity, TetMesh};

/// Eigenvalues of `−(L+Lᵀ)` with magnitude below this times `λ_max` count as
/// zero.
pub const KERNEL_TOLERANCE: f64 = 1e-8;

/// Structural properties of an assembled `(L, M)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub num_vertices: usize,
    /// `‖L − Lᵀ‖_F / ‖L‖_F`
    pub symmetry_residual: f64,
    /// Spectrum of `−(L+Lᵀ)`; absent above the dense size limit.
    pub spectrum: Option<SpectrumSummary>,
    pub nonpositive_mass: usize,
    pub min_mass: f64,
    /// Largest `|(L f)_i|` over interior vertices and the three coordinate
    /// functions, relative to `‖L‖_∞ · diameter`.
    pub interior_linear_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Second smallest eigenvalue.
    pub lambda_second: f64,
    pub kernel_dimension: usize,
}

impl PropertyReport {
    /// True when `−(L+Lᵀ)` has no eigenvalue below `−tol · λ_max`.
    pub fn is_psd(&self, tol: f64) -> Option<bool> {
        self.spectrum
            .as_ref()
            .map(|s| s.lambda_min >= -tol * s.lambda_max.abs())
    }
}

/// Spectrum summary of `−(L+Lᵀ)`.
pub fn symmetric_part_spectrum(l: &SparseMatrix) -> Result<SpectrumSummary> {
    let dense = l.to_dense();
    let s = -(&dense + dense.transpose());
    let eig = eigensolve_sym(&s, 1e-9)?;
    let n = eig.values.len();
    let lambda_max = eig.values.last().copied().unwrap_or(0.0);
    let zero = KERNEL_TOLERANCE * lambda_max.abs();
    Ok(SpectrumSummary {
        lambda_min: eig.values.first().copied().unwrap_or(0.0),
        lambda_max,
        lambda_second: if n > 1 { eig.values[1] } else { f64::NAN },
        kernel_dimension: eig.values.iter().filter(|v| v.abs() < zero).count(),
    })
}

pub fn property_report(mesh: &TetMesh, l: &SparseMatrix, m: &SparseMatrix) -> Result<PropertyReport> {
    let n = mesh.num_vertices();
    let lnorm = l.frobenius_norm();
    let asym = l.add(1.0, &l.transpose(), -1.0).frobenius_norm();
    let symmetry_residual = if lnorm > 0.0 { asym / lnorm } else { 0.0 };

    let spectrum = if n <= MAX_DENSE_DIM {
        Some(symmetric_part_spectrum(l)?)
    } else {
        None
    };

    let diag = m.diagonal();
    let nonpositive_mass = diag.iter().filter(|&&d| d <= 0.0).count();
    let min_mass = diag.iter().copied().fold(f64::INFINITY, f64::min);

    let conn = Connectivity::new(mesh)?;
    let boundary = conn.faces.boundary_vertices(n);
    let mut worst: f64 = 0.0;
    for axis in 0..3 {
        let f: Vec<f64> = mesh.vertices().iter().map(|v| v[axis]).collect();
        let lf = l.mul_vec(&f);
        for i in (0..n).filter(|&i| !boundary[i]) {
            worst = worst.max(lf[i].abs());
        }
    }
    let denom = l.inf_norm() * mesh.bbox_diagonal();
    Ok(PropertyReport {
        num_vertices: n,
        symmetry_residual,
        spectrum,
        nonpositive_mass,
        min_mass,
        interior_linear_residual: if denom > 0.0 { worst / denom } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::{build_operators, compute_centers, CenterStrategy};
    use crate::mesh::{make_grid, perturb, Vec3};

    fn report(mesh: &TetMesh, s: CenterStrategy) -> PropertyReport {
        let conn = Connectivity::new(mesh).unwrap();
        let c = compute_centers(mesh, &conn, &s).unwrap();
        let o = build_operators(mesh, &conn, &c).unwrap();
        property_report(mesh, &o.laplacian, &o.mass).unwrap()
    }

    #[test]
    fn barycentric_report() {
        let a = perturb(&make_grid(3, 3, 3, 1.0, 0), 0.2, 1).unwrap();
        // a second, disjoint component
        let b = make_grid(1, 1, 1, 1.0, 0);
        let mut verts = a.vertices().to_vec();
        let off = verts.len();
        verts.extend(b.vertices().iter().map(|v| v + Vec3::new(10.0, 0.0, 0.0)));
        let mut tets = a.tets().to_vec();
        tets.extend(b.tets().iter().map(|t| t.map(|i| i + off)));
        let m = TetMesh::new(verts, tets, None).unwrap();
        let r = report(&m, CenterStrategy::Barycentric);
        assert!(r.symmetry_residual <= 1e-12);
        let s = r.spectrum.clone().unwrap();
        assert!(s.lambda_min >= -1e-8 * s.lambda_max);
        assert_eq!(s.kernel_dimension, 2);
        assert_eq!(r.nonpositive_mass, 0);
        assert!(r.interior_linear_residual < 1e-12);
        assert_eq!(r.is_psd(1e-8), Some(true));
    }

    #[test]
    fn alexa_on_obtuse_faces_is_asymmetric() {
        // a single tet with one strongly obtuse face snaps that face center
        let p = vec![
            Vec3::zeros(),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(3.0, 0.6, 0.0),
            Vec3::new(1.0, 0.5, 1.5),
        ];
        let m = TetMesh::new_reoriented(p, vec![[0, 1, 2, 3]], None).unwrap();
        let r = report(&m, CenterStrategy::AlexaSnap);
        assert!(r.symmetry_residual > 1e-3, "{}", r.symmetry_residual);
    }
}

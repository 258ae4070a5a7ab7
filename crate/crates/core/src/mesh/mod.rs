//! Tetrahedral meshes: storage, validation, connectivity, file I/O and
//! synthetic generators.

mod connectivity;
mod generate;
mod geometry;
mod medit;

pub use connectivity::{derive_connectivity, local_edge, Connectivity, EdgeTable, FaceTable, TET_EDGES, TET_FACES};
pub use generate::{jitter_tangential, make_grid, perturb, shell, ShellLabels};
pub use geometry::{
    area_vector, barycenter, barycentric_coords, circumcenter, diameter, signed_volume, tet_barycentric_coords,
    tet_face_distances, triangle_edge_distances, Vec3, MAX_CONDITION,
};
pub use medit::{load_medit, read_medit, save_medit, write_medit};

use crate::error::{Error, Result};

/// Relative volume threshold (times the cubed bounding-box diagonal) below
/// which a tetrahedron is rejected as degenerate.
pub const DEGENERACY_TOLERANCE: f64 = 1e-14;

/// A tetrahedral mesh with positively oriented elements.
#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh {
    vertices: Vec<Vec3>,
    tets: Vec<[usize; 4]>,
    labels: Vec<i32>,
}

impl TetMesh {
    /// Builds a mesh, requiring every tetrahedron to be positively oriented.
    ///
    /// `labels` defaults to all zeros when `None`.
    pub fn new(vertices: Vec<Vec3>, tets: Vec<[usize; 4]>, labels: Option<Vec<i32>>) -> Result<Self> {
        let mesh = Self::checked(vertices, tets, labels)?;
        let tol = mesh.volume_tolerance();
        for (t, _) in mesh.tets.iter().enumerate() {
            let v = mesh.tet_volume(t);
            if !(v > tol) {
                return Err(Error::Degenerate(format!(
                    "tetrahedron {t} has volume {v:e} (tolerance {tol:e})"
                )));
            }
        }
        Ok(mesh)
    }

    /// Builds a mesh, swapping the last two vertices of negatively oriented
    /// tetrahedra.
    pub fn new_reoriented(vertices: Vec<Vec3>, tets: Vec<[usize; 4]>, labels: Option<Vec<i32>>) -> Result<Self> {
        let mut mesh = Self::checked(vertices, tets, labels)?;
        let tol = mesh.volume_tolerance();
        for t in 0..mesh.tets.len() {
            let v = mesh.tet_volume(t);
            if v.abs() < tol || !v.is_finite() {
                return Err(Error::Degenerate(format!(
                    "tetrahedron {t} has volume {v:e} (tolerance {tol:e})"
                )));
            }
            if v < 0.0 {
                mesh.tets[t].swap(2, 3);
            }
        }
        Ok(mesh)
    }

    fn checked(vertices: Vec<Vec3>, tets: Vec<[usize; 4]>, labels: Option<Vec<i32>>) -> Result<Self> {
        let n = vertices.len();
        if let Some(i) = vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::Invalid(format!("vertex {i} has a non-finite coordinate")));
        }
        for (t, tet) in tets.iter().enumerate() {
            for &i in tet {
                if i >= n {
                    return Err(Error::Index {
                        index: i,
                        bound: n,
                        context: format!("tetrahedron {t}"),
                    });
                }
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    if tet[a] == tet[b] {
                        return Err(Error::Degenerate(format!("tetrahedron {t} repeats vertex {}", tet[a])));
                    }
                }
            }
        }
        let labels = labels.unwrap_or_else(|| vec![0; n]);
        if labels.len() != n {
            return Err(Error::Invalid(format!("{} labels for {n} vertices", labels.len())));
        }
        Ok(Self { vertices, tets, labels })
    }

    fn volume_tolerance(&self) -> f64 {
        DEGENERACY_TOLERANCE * self.bbox_diagonal().powi(3)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn tets(&self) -> &[[usize; 4]] {
        &self.tets
    }

    /// Per-vertex integer labels (0 when unlabeled).
    pub fn labels(&self) -> &[i32] {
        &self.labels
    }

    pub fn tet_points(&self, t: usize) -> [Vec3; 4] {
        self.tets[t].map(|i| self.vertices[i])
    }

    pub fn tet_volume(&self, t: usize) -> f64 {
        let p = self.tet_points(t);
        signed_volume(&p[0], &p[1], &p[2], &p[3])
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.num_tets()).map(|t| self.tet_volume(t)).sum()
    }

    /// Axis-aligned bounding box `(min, max)`; zero box for an empty mesh.
    pub fn bbox(&self) -> (Vec3, Vec3) {
        let mut it = self.vertices.iter();
        let Some(first) = it.next() else {
            return (Vec3::zeros(), Vec3::zeros());
        };
        it.fold((*first, *first), |(lo, hi), v| (lo.inf(v), hi.sup(v)))
    }

    pub fn bbox_diagonal(&self) -> f64 {
        let (lo, hi) = self.bbox();
        (hi - lo).norm()
    }

    /// Mean edge length over all tetrahedron edges (counted per tet).
    pub fn mean_edge_length(&self) -> f64 {
        if self.tets.is_empty() {
            return 0.0;
        }
        let mut sum = 0.0;
        for t in 0..self.num_tets() {
            let p = self.tet_points(t);
            for [a, b] in TET_EDGES {
                sum += (p[a] - p[b]).norm();
            }
        }
        sum / (6 * self.num_tets()) as f64
    }

    /// Same connectivity and labels with new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() != self.vertices.len() {
            return Err(Error::Invalid("vertex count mismatch".into()));
        }
        Self::new(vertices, self.tets.clone(), Some(self.labels.clone()))
    }

    pub fn with_labels(mut self, labels: Vec<i32>) -> Result<Self> {
        if labels.len() != self.vertices.len() {
            return Err(Error::Invalid("label count mismatch".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    /// Number of connected components of the vertex graph (isolated vertices
    /// count as their own component).
    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.num_vertices()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for tet in &self.tets {
            for k in 1..4 {
                let a = find(&mut parent, tet[0]);
                let b = find(&mut parent, tet[k]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        (0..self.num_vertices()).filter(|&i| find(&mut parent, i) == i).count()
    }
}

use crate::error::{Error, Result};
use crate::mesh::{
    barycenter, barycentric_coords, circumcenter, tet_barycentric_coords, tet_face_distances, triangle_edge_distances,
    Connectivity, TetMesh, Vec3, TET_FACES,
};

/// Barycentric coordinates at or above this value count as inside the closed
/// simplex. Circumcenters of right triangles sit exactly on an edge and must
/// not be snapped because of roundoff.
pub const INSIDE_TOLERANCE: f64 = 1e-12;

/// One point per edge, triangle and tetrahedron. Vertices are their own
/// centers.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterSet {
    pub edge_centers: Vec<Vec3>,
    pub face_centers: Vec<Vec3>,
    pub tet_centers: Vec<Vec3>,
}

/// How centers are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum CenterStrategy {
    Barycentric,
    Circumcentric,
    /// Circumcenters, each replaced by its own simplex's barycenter when it
    /// lies outside that simplex.
    AlexaSnap,
    /// Circumcenters; one outside its simplex moves to the (snapped) center
    /// of the most violated facet.
    CircumSnap,
    External(CenterSet),
}

impl CenterSet {
    /// Checks lengths against the connectivity and finiteness.
    pub fn validate(&self, mesh: &TetMesh, conn: &Connectivity) -> Result<()> {
        let expect = [
            ("edge", self.edge_centers.len(), conn.edges.len()),
            ("face", self.face_centers.len(), conn.faces.len()),
            ("tet", self.tet_centers.len(), mesh.num_tets()),
        ];
        for (what, got, want) in expect {
            if got != want {
                return Err(Error::Invalid(format!("{got} {what} centers, expected {want}")));
            }
        }
        let all = self
            .edge_centers
            .iter()
            .chain(&self.face_centers)
            .chain(&self.tet_centers);
        if all.clone().any(|c| !c.iter().all(|x| x.is_finite())) {
            return Err(Error::Invalid("center set has non-finite coordinates".into()));
        }
        Ok(())
    }

    /// Centers of tet `t` in local order: edges as in `TET_EDGES`, faces
    /// opposite each local vertex, then the tet center.
    pub fn local(&self, conn: &Connectivity, t: usize) -> LocalCenters {
        LocalCenters {
            edges: conn.edges.tet_edges[t].map(|e| self.edge_centers[e]),
            faces: conn.faces.tet_faces[t].map(|(f, _)| self.face_centers[f]),
            tet: self.tet_centers[t],
        }
    }
}

/// The centers one tetrahedron sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCenters {
    pub edges: [Vec3; 6],
    pub faces: [Vec3; 4],
    pub tet: Vec3,
}

impl LocalCenters {
    pub fn barycentric(p: &[Vec3; 4]) -> Self {
        let edges = crate::mesh::TET_EDGES.map(|[a, b]| (p[a] + p[b]) * 0.5);
        let faces = TET_FACES.map(|f| barycenter(&f.map(|k| p[k])));
        Self {
            edges,
            faces,
            tet: barycenter(p),
        }
    }
}

fn face_points(mesh: &TetMesh, f: &[usize; 3]) -> [Vec3; 3] {
    f.map(|v| mesh.vertices()[v])
}

fn inside(coords: &[f64]) -> bool {
    coords.iter().all(|&c| c >= -INSIDE_TOLERANCE)
}

/// Index of the smallest entry; ties resolve to the lowest index.
fn most_violated(d: &[f64]) -> usize {
    let mut k = 0;
    for (j, &v) in d.iter().enumerate() {
        if v < d[k] {
            k = j;
        }
    }
    k
}

/// Computes centers for every edge, face and tet.
pub fn compute_centers(mesh: &TetMesh, conn: &Connectivity, strategy: &CenterStrategy) -> Result<CenterSet> {
    let verts = mesh.vertices();
    let edge_centers: Vec<Vec3> = conn
        .edges
        .edges
        .iter()
        .map(|[a, b]| (verts[*a] + verts[*b]) * 0.5)
        .collect();
    let set = match strategy {
        CenterStrategy::External(set) => {
            set.validate(mesh, conn)?;
            return Ok(set.clone());
        }
        CenterStrategy::Barycentric => CenterSet {
            edge_centers,
            face_centers: conn
                .faces
                .faces
                .iter()
                .map(|f| barycenter(&face_points(mesh, f)))
                .collect(),
            tet_centers: (0..mesh.num_tets()).map(|t| barycenter(&mesh.tet_points(t))).collect(),
        },
        CenterStrategy::Circumcentric => CenterSet {
            edge_centers,
            face_centers: conn
                .faces
                .faces
                .iter()
                .map(|f| circumcenter(&face_points(mesh, f)))
                .collect::<Result<_>>()?,
            tet_centers: (0..mesh.num_tets())
                .map(|t| circumcenter(&mesh.tet_points(t)))
                .collect::<Result<_>>()?,
        },
        CenterStrategy::AlexaSnap => {
            let mut face_centers = Vec::with_capacity(conn.faces.len());
            for f in &conn.faces.faces {
                let p = face_points(mesh, f);
                let c = circumcenter(&p)?;
                face_centers.push(if inside(&barycentric_coords(&c, &p)?) {
                    c
                } else {
                    barycenter(&p)
                });
            }
            let mut tet_centers = Vec::with_capacity(mesh.num_tets());
            for t in 0..mesh.num_tets() {
                let p = mesh.tet_points(t);
                let c = circumcenter(&p)?;
                tet_centers.push(if inside(&tet_barycentric_coords(&c, &p)?) {
                    c
                } else {
                    barycenter(&p)
                });
            }
            CenterSet {
                edge_centers,
                face_centers,
                tet_centers,
            }
        }
        CenterStrategy::CircumSnap => {
            let mut face_centers = Vec::with_capacity(conn.faces.len());
            for f in &conn.faces.faces {
                let p = face_points(mesh, f);
                let c = circumcenter(&p)?;
                face_centers.push(if inside(&barycentric_coords(&c, &p)?) {
                    c
                } else {
                    // edge j is opposite local vertex j
                    let j = most_violated(&triangle_edge_distances(&c, &p)?);
                    (p[(j + 1) % 3] + p[(j + 2) % 3]) * 0.5
                });
            }
            let mut tet_centers = Vec::with_capacity(mesh.num_tets());
            for t in 0..mesh.num_tets() {
                let p = mesh.tet_points(t);
                let c = circumcenter(&p)?;
                tet_centers.push(if inside(&tet_barycentric_coords(&c, &p)?) {
                    c
                } else {
                    let j = most_violated(&tet_face_distances(&c, &p)?);
                    face_centers[conn.faces.tet_faces[t][j].0]
                });
            }
            CenterSet {
                edge_centers,
                face_centers,
                tet_centers,
            }
        }
    };
    Ok(set)
}

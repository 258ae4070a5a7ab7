use crate::error::{Error, Result};

use super::TetMesh;

/// Local faces of a tetrahedron; face `j` is opposite local vertex `j` and is
/// listed with outward orientation for a positively oriented element.
pub const TET_FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]];

/// Local edges of a tetrahedron.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// Unique triangles of a mesh in lexicographic order of their sorted vertex
/// triples.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceTable {
    /// Sorted vertex triples.
    pub faces: Vec<[usize; 3]>,
    /// Per tet, the face opposite each local vertex with `+1` when the tet's
    /// outward orientation agrees with the sorted triple and `-1` otherwise.
    pub tet_faces: Vec<[(usize, i8); 4]>,
    /// One or two incident tets per face.
    pub face_tets: Vec<(usize, Option<usize>)>,
}

impl FaceTable {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn is_boundary(&self, f: usize) -> bool {
        self.face_tets[f].1.is_none()
    }

    /// Vertices lying on at least one boundary face.
    pub fn boundary_vertices(&self, num_vertices: usize) -> Vec<bool> {
        let mut on = vec![false; num_vertices];
        for (f, face) in self.faces.iter().enumerate() {
            if self.is_boundary(f) {
                for &v in face {
                    on[v] = true;
                }
            }
        }
        on
    }
}

/// Unique edges in lexicographic order of their sorted vertex pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTable {
    pub edges: Vec<[usize; 2]>,
    /// Per tet, the edge index of each entry of [`TET_EDGES`].
    pub tet_edges: Vec<[usize; 6]>,
}

impl EdgeTable {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Global edge index joining local vertices `a` and `b` of tet `t`.
    pub fn tet_edge(&self, t: usize, a: usize, b: usize) -> usize {
        self.tet_edges[t][local_edge(a, b)]
    }
}

fn sort3(mut f: [usize; 3]) -> ([usize; 3], i8) {
    let mut sign = 1;
    for (i, j) in [(0, 1), (1, 2), (0, 1)] {
        if f[i] > f[j] {
            f.swap(i, j);
            sign = -sign;
        }
    }
    (f, sign)
}

/// Face and edge tables of one mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct Connectivity {
    pub faces: FaceTable,
    pub edges: EdgeTable,
}

impl Connectivity {
    pub fn new(mesh: &TetMesh) -> Result<Self> {
        let (faces, edges) = derive_connectivity(mesh)?;
        Ok(Self { faces, edges })
    }
}

/// Index into [`TET_EDGES`] of the local edge joining `a` and `b`.
pub fn local_edge(a: usize, b: usize) -> usize {
    match (a.min(b), a.max(b)) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("invalid local edge ({a}, {b})"),
    }
}

/// Builds the face and edge tables of a mesh.
pub fn derive_connectivity(mesh: &TetMesh) -> Result<(FaceTable, EdgeTable)> {
    let m = mesh.num_tets();

    let mut face_keys: Vec<([usize; 3], usize, usize, i8)> = Vec::with_capacity(4 * m);
    let mut edge_keys: Vec<([usize; 2], usize, usize)> = Vec::with_capacity(6 * m);
    for (t, tet) in mesh.tets().iter().enumerate() {
        for (j, lf) in TET_FACES.iter().enumerate() {
            let (key, sign) = sort3(lf.map(|l| tet[l]));
            face_keys.push((key, t, j, sign));
        }
        for (k, [a, b]) in TET_EDGES.iter().enumerate() {
            let (a, b) = (tet[*a], tet[*b]);
            edge_keys.push(([a.min(b), a.max(b)], t, k));
        }
    }
    face_keys.sort_unstable();
    edge_keys.sort_unstable();

    let mut faces = Vec::new();
    let mut face_tets: Vec<(usize, Option<usize>)> = Vec::new();
    let mut tet_faces = vec![[(0usize, 0i8); 4]; m];
    let mut i = 0;
    while i < face_keys.len() {
        let key = face_keys[i].0;
        let mut j = i;
        while j < face_keys.len() && face_keys[j].0 == key {
            j += 1;
        }
        if j - i > 2 {
            return Err(Error::NonManifold {
                face: key,
                count: j - i,
            });
        }
        let f = faces.len();
        faces.push(key);
        for &(_, t, local, sign) in &face_keys[i..j] {
            tet_faces[t][local] = (f, sign);
        }
        face_tets.push((face_keys[i].1, (j - i == 2).then(|| face_keys[i + 1].1)));
        i = j;
    }

    let mut edges = Vec::new();
    let mut tet_edges = vec![[0usize; 6]; m];
    for (idx, &(key, t, k)) in edge_keys.iter().enumerate() {
        if idx == 0 || edge_keys[idx - 1].0 != key {
            edges.push(key);
        }
        tet_edges[t][k] = edges.len() - 1;
    }

    Ok((
        FaceTable {
            faces,
            tet_faces,
            face_tets,
        },
        EdgeTable { edges, tet_edges },
    ))
}

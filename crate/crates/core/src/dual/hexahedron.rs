use super::{CenterSet, LocalCenters};
use crate::error::{Error, Result};
use crate::mesh::{local_edge, Connectivity, TetMesh, Vec3, TET_FACES};

/// Corner `x + 2y + 4z` of the unit cube; outward quads of its six faces.
const CUBE_QUADS: [[usize; 4]; 6] = [
    [0, 4, 6, 2], // x = 0
    [1, 3, 7, 5], // x = 1
    [0, 1, 5, 4], // y = 0
    [2, 6, 7, 3], // y = 1
    [0, 2, 3, 1], // z = 0
    [4, 5, 7, 6], // z = 1
];

/// The piece of a tetrahedron assigned to one of its vertices.
///
/// Corners follow cube combinatorics: the vertex at `(0,0,0)`, edge centers on
/// the axes, face centers on the axis-pair corners and the tet center at
/// `(1,1,1)`. `ids` are global simplex ids (vertices, then edges, faces and
/// tets) that fix the quad diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Hexahedron {
    pub corners: [Vec3; 8],
    pub ids: [usize; 8],
    /// Outward triangles indexing `corners`.
    pub triangles: [[usize; 3]; 12],
}

/// Global ids of the 15 simplices of a tet: 4 vertices, 6 edges (local
/// order), 4 faces (opposite each vertex), the tet.
pub(crate) type LocalIds = [usize; 15];

pub(crate) fn local_ids(mesh: &TetMesh, conn: &Connectivity, t: usize) -> LocalIds {
    let n = mesh.num_vertices();
    let ne = conn.edges.len();
    let nf = conn.faces.len();
    let mut ids = [0usize; 15];
    ids[..4].copy_from_slice(&mesh.tets()[t]);
    for k in 0..6 {
        ids[4 + k] = n + conn.edges.tet_edges[t][k];
    }
    for k in 0..4 {
        ids[10 + k] = n + ne + conn.faces.tet_faces[t][k].0;
    }
    ids[14] = n + ne + nf + t;
    ids
}

pub(crate) fn build(p: &[Vec3; 4], c: &LocalCenters, ids: &LocalIds, i: usize) -> Hexahedron {
    let [a, b, cc] = TET_FACES[i];
    let face = |x: usize, y: usize| 6 - i - x - y;
    let slots = [
        (p[i], ids[i]),
        (c.edges[local_edge(i, a)], ids[4 + local_edge(i, a)]),
        (c.edges[local_edge(i, b)], ids[4 + local_edge(i, b)]),
        (c.faces[face(a, b)], ids[10 + face(a, b)]),
        (c.edges[local_edge(i, cc)], ids[4 + local_edge(i, cc)]),
        (c.faces[face(a, cc)], ids[10 + face(a, cc)]),
        (c.faces[face(b, cc)], ids[10 + face(b, cc)]),
        (c.tet, ids[14]),
    ];
    let corners = slots.map(|s| s.0);
    let gid = slots.map(|s| s.1);
    let mut triangles = [[0usize; 3]; 12];
    for (k, q) in CUBE_QUADS.iter().enumerate() {
        let lowest = (0..4).min_by_key(|&j| gid[q[j]]).unwrap();
        let (t1, t2) = if lowest % 2 == 0 {
            ([q[0], q[1], q[2]], [q[0], q[2], q[3]])
        } else {
            ([q[1], q[2], q[3]], [q[1], q[3], q[0]])
        };
        triangles[2 * k] = t1;
        triangles[2 * k + 1] = t2;
    }
    Hexahedron {
        corners,
        ids: gid,
        triangles,
    }
}

/// The hexahedron of `vertex` (a global index) inside tet `t`.
pub fn hexahedron(
    mesh: &TetMesh,
    conn: &Connectivity,
    centers: &CenterSet,
    t: usize,
    vertex: usize,
) -> Result<Hexahedron> {
    if t >= mesh.num_tets() {
        return Err(Error::Index {
            index: t,
            bound: mesh.num_tets(),
            context: "hexahedron tet".into(),
        });
    }
    let i = mesh.tets()[t]
        .iter()
        .position(|&v| v == vertex)
        .ok_or_else(|| Error::Invalid(format!("vertex {vertex} is not a corner of tetrahedron {t}")))?;
    Ok(build(
        &mesh.tet_points(t),
        &centers.local(conn, t),
        &local_ids(mesh, conn, t),
        i,
    ))
}

/// Signed enclosed volume `Σ (1/6) x₁·(x₂×x₃)` over the triangles, taken
/// relative to the first corner.
pub fn hex_volume(h: &Hexahedron) -> f64 {
    let o = h.corners[0];
    h.triangles
        .iter()
        .map(|[a, b, c]| {
            let (x1, x2, x3) = (h.corners[*a] - o, h.corners[*b] - o, h.corners[*c] - o);
            x1.dot(&x2.cross(&x3))
        })
        .sum::<f64>()
        / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::local::tests::{random_centers, random_tet};
    use crate::mesh::signed_volume;
    use proptest::prelude::*;
    use rand::{seq::SliceRandom, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_cube() -> Hexahedron {
        let corners: [Vec3; 8] =
            std::array::from_fn(|k| Vec3::new((k & 1) as f64, ((k >> 1) & 1) as f64, ((k >> 2) & 1) as f64));
        let p = [corners[0], corners[1], corners[2], corners[4]];
        // any centers: overwrite with the cube corners through a fake tet
        let mut h = build(&p, &LocalCenters::barycentric(&p), &std::array::from_fn(|k| k), 0);
        h.corners = corners;
        h
    }

    #[test]
    fn unit_cube_volume() {
        let mut h = unit_cube();
        assert!((hex_volume(&h) - 1.0).abs() < 1e-15);
        for t in &mut h.triangles {
            t.swap(1, 2);
        }
        assert!((hex_volume(&h) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn closed_surface() {
        let h = unit_cube();
        // every undirected edge is used once in each direction
        let mut directed = std::collections::BTreeMap::new();
        for t in &h.triangles {
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_insert(0) += 1;
            }
        }
        for (&(a, b), &n) in &directed {
            assert_eq!(n, 1);
            assert_eq!(directed.get(&(b, a)), Some(&1));
        }
        assert_eq!(h.triangles.len(), 12);
    }

    #[test]
    fn reference_barycentric_equal_division() {
        let m = TetMesh::new(
            vec![
                Vec3::zeros(),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
            ],
            vec![[0, 1, 2, 3]],
            None,
        )
        .unwrap();
        let conn = Connectivity::new(&m).unwrap();
        let c = super::super::compute_centers(&m, &conn, &super::super::CenterStrategy::Barycentric).unwrap();
        for v in 0..4 {
            let h = hexahedron(&m, &conn, &c, 0, v).unwrap();
            assert!((hex_volume(&h) - 1.0 / 24.0).abs() < 1e-15);
        }
        assert!(hexahedron(&m, &conn, &c, 0, 7).is_err());
    }

    proptest! {
        #[test]
        fn hexahedra_tile_the_tet(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_tet(&mut rng);
            let c = random_centers(&p, &mut rng);
            let mut ids: LocalIds = std::array::from_fn(|k| k);
            ids.shuffle(&mut rng);
            let total: f64 = (0..4).map(|i| hex_volume(&build(&p, &c, &ids, i))).sum();
            let vol = signed_volume(&p[0], &p[1], &p[2], &p[3]);
            prop_assert!((total - vol).abs() <= 1e-12 * vol.abs().max(1e-3));
        }
    }
}

//! Synthetic meshes: tetrahedralized grids, seeded perturbations and
//! concentric spherical shells.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{TetMesh, Vec3};
use crate::error::Result;

/// Regular `nx × ny × nz` grid of cubes with spacing `h`, each cube split into
/// six tetrahedra around one of its four main diagonals.
///
/// `diagonal` selects the diagonal: 0 joins local corners (0,0,0)-(1,1,1),
/// 1 joins (1,0,0)-(0,1,1), 2 joins (0,1,0)-(1,0,1), 3 joins (1,1,0)-(0,0,1).
/// Vertex `(i, j, k)` has index `i + (nx+1)*(j + (ny+1)*k)`.
pub fn make_grid(nx: usize, ny: usize, nz: usize, h: f64, diagonal: u8) -> TetMesh {
    assert!(nx >= 1 && ny >= 1 && nz >= 1, "grid dimensions must be positive");
    assert!(diagonal < 4, "diagonal must be in 0..4");
    assert!(h > 0.0 && h.is_finite(), "spacing must be positive");

    let index = |i: usize, j: usize, k: usize| i + (nx + 1) * (j + (ny + 1) * k);
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1) * (nz + 1));
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                vertices.push(Vec3::new(i as f64 * h, j as f64 * h, k as f64 * h));
            }
        }
    }

    let (flip_x, flip_y) = match diagonal {
        0 => (false, false),
        1 => (true, false),
        2 => (false, true),
        _ => (true, true),
    };
    // Monotone lattice paths from (0,0,0) to (1,1,1), one per axis permutation.
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for perm in PERMS {
                    let mut corner = [0usize; 3];
                    let mut tet = [0usize; 4];
                    for (step, slot) in tet.iter_mut().enumerate() {
                        if step > 0 {
                            corner[perm[step - 1]] = 1;
                        }
                        let cx = if flip_x { 1 - corner[0] } else { corner[0] };
                        let cy = if flip_y { 1 - corner[1] } else { corner[1] };
                        *slot = index(i + cx, j + cy, k + corner[2]);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    TetMesh::new_reoriented(vertices, tets, None).expect("grid tetrahedra are non-degenerate")
}

/// Displaces every vertex by `eps` times a vector drawn uniformly from the unit
/// ball.
///
/// The generator is ChaCha8 seeded with `seed` (via `seed_from_u64`); each
/// vertex, in index order, draws three `f64` in `[-1, 1)` until the vector
/// lies in the closed unit ball. Labels are preserved. Fails with
/// `Degenerate` if a tetrahedron loses positive volume.
pub fn perturb(mesh: &TetMesh, eps: f64, seed: u64) -> Result<TetMesh> {
    assert!(eps >= 0.0, "perturbation magnitude must be non-negative");
    if eps == 0.0 {
        return Ok(mesh.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = mesh
        .vertices()
        .iter()
        .map(|v| {
            let u = loop {
                let u = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if u.norm_squared() <= 1.0 {
                    break u;
                }
            };
            v + eps * u
        })
        .collect();
    mesh.with_vertices(vertices)
}

/// Vertex labels used by [`shell`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShellLabels {
    pub inner: i32,
    pub outer: i32,
    pub middle: i32,
}

impl Default for ShellLabels {
    fn default() -> Self {
        Self {
            inner: 1,
            outer: 2,
            middle: 3,
        }
    }
}

fn icosphere(subdivisions: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut tris = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut mid = |a: usize, b: usize, verts: &mut Vec<Vec3>| {
            *mids.entry((a.min(b), a.max(b))).or_insert_with(|| {
                verts.push((0.5 * (verts[a] + verts[b])).normalize());
                verts.len() - 1
            })
        };
        let mut next = Vec::with_capacity(4 * tris.len());
        for [a, b, c] in tris {
            let ab = mid(a, b, &mut verts);
            let bc = mid(b, c, &mut verts);
            let ca = mid(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    (verts, tris)
}

/// Spherical shell between radii `0.5` and `1.0` with a labeled middle sphere
/// at radius `0.75`.
///
/// The sphere is an icosahedron refined `subdivisions` times;
/// `layers_per_half` radial layers of prisms fill each half of the shell, and
/// every prism is split into three tetrahedra by the global-index rule so that
/// neighbouring prisms agree on their shared quads. Vertices on the inner,
/// outer and middle spheres carry the labels of [`ShellLabels::default`].
pub fn shell(subdivisions: usize, layers_per_half: usize) -> TetMesh {
    assert!(layers_per_half >= 1);
    let labels = ShellLabels::default();
    let (sphere, tris) = icosphere(subdivisions);
    let ns = sphere.len();
    let layers = 2 * layers_per_half;
    let mut vertices = Vec::with_capacity(ns * (layers + 1));
    let mut vertex_labels = Vec::with_capacity(ns * (layers + 1));
    for k in 0..=layers {
        let r = 0.5 + 0.5 * k as f64 / layers as f64;
        let label = if k == 0 {
            labels.inner
        } else if k == layers {
            labels.outer
        } else if k == layers_per_half {
            labels.middle
        } else {
            0
        };
        for p in &sphere {
            vertices.push(r * p);
            vertex_labels.push(label);
        }
    }
    let mut tets = Vec::with_capacity(3 * tris.len() * layers);
    for k in 0..layers {
        for tri in &tris {
            let mut s = *tri;
            s.sort_unstable();
            let [a, b, c] = s.map(|i| i + k * ns);
            let [a2, b2, c2] = s.map(|i| i + (k + 1) * ns);
            tets.extend([[a, b, c, c2], [a, b, b2, c2], [a, a2, b2, c2]]);
        }
    }
    TetMesh::new_reoriented(vertices, tets, Some(vertex_labels)).expect("shell tetrahedra are non-degenerate")
}

/// Moves every vertex of a mesh centered at the origin tangentially to the
/// sphere through it, keeping its radius.
///
/// The displacement is `eps · r · spacing` times a vector drawn as in
/// [`perturb`] (same generator and seed handling) and projected onto the
/// tangent plane, where `spacing` is the mean edge length of an icosahedron
/// refined `subdivisions` times on the unit sphere. Labels are preserved.
pub fn jitter_tangential(mesh: &TetMesh, subdivisions: usize, eps: f64, seed: u64) -> Result<TetMesh> {
    assert!(eps >= 0.0, "jitter magnitude must be non-negative");
    let (sphere, tris) = icosphere(subdivisions);
    let spacing = tris
        .iter()
        .map(|t| {
            (0..3)
                .map(|k| (sphere[t[k]] - sphere[t[(k + 1) % 3]]).norm())
                .sum::<f64>()
        })
        .sum::<f64>()
        / (3 * tris.len()) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = mesh
        .vertices()
        .iter()
        .map(|p| {
            let u = loop {
                let u = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                if u.norm_squared() <= 1.0 {
                    break u;
                }
            };
            let r = p.norm();
            if r == 0.0 {
                return *p;
            }
            let n = p / r;
            let q = p + (u - n * n.dot(&u)) * (eps * r * spacing);
            q * (r / q.norm())
        })
        .collect();
    mesh.with_vertices(vertices)
}

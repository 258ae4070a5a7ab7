use crate::error::Result;
use crate::mesh::{circumcenter, jitter_tangential, make_grid, perturb, shell, TetMesh, Vec3};

/// A named generated mesh.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub mesh: TetMesh,
}

fn scaled(mesh: &TetMesh, s: Vec3) -> Result<TetMesh> {
    mesh.with_vertices(mesh.vertices().iter().map(|v| v.component_mul(&s)).collect())
}

/// Column of triangular prisms whose layers rotate by `twist` radians each.
///
/// The base is an `n × n` square lattice of spacing 1 with every square cut
/// along its `(0,0)-(1,1)` diagonal; prisms split by the global-index rule.
pub fn twisted_column(n: usize, layers: usize, height: f64, twist: f64) -> Result<TetMesh> {
    let per_layer = (n + 1) * (n + 1);
    let centre = n as f64 / 2.0;
    let mut vertices = Vec::with_capacity(per_layer * (layers + 1));
    for k in 0..=layers {
        let (s, c) = (twist * k as f64).sin_cos();
        for j in 0..=n {
            for i in 0..=n {
                let (x, y) = (i as f64 - centre, j as f64 - centre);
                vertices.push(Vec3::new(c * x - s * y, s * x + c * y, height * k as f64));
            }
        }
    }
    let id = |i: usize, j: usize| i + (n + 1) * j;
    let mut tris = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut tets = Vec::with_capacity(3 * tris.len() * layers);
    for k in 0..layers {
        for tri in &tris {
            let mut t = *tri;
            t.sort_unstable();
            let [a, b, c] = t.map(|v| v + k * per_layer);
            let [a2, b2, c2] = t.map(|v| v + (k + 1) * per_layer);
            tets.extend([[a, b, c, c2], [a, b, b2, c2], [a, a2, b2, c2]]);
        }
    }
    TetMesh::new_reoriented(vertices, tets, None)
}

/// Non-Delaunay meshes exercised by the property suite, each at most a few
/// thousand vertices. Every entry is deterministic.
pub fn non_delaunay_fixtures() -> Result<Vec<Fixture>> {
    let unit = |nx, d| make_grid(nx, nx, nx, 1.0, d);
    Ok(vec![
        Fixture {
            name: "grid3_jitter40",
            mesh: perturb(&unit(3, 3), 0.4, 31)?,
        },
        Fixture {
            name: "grid4_jitter30",
            mesh: perturb(&unit(4, 0), 0.3, 1)?,
        },
        Fixture {
            name: "grid5_jitter25",
            mesh: perturb(&unit(5, 1), 0.25, 5)?,
        },
        Fixture {
            name: "grid6_jitter40",
            mesh: perturb(&unit(6, 1), 0.4, 2)?,
        },
        Fixture {
            name: "grid8_jitter35",
            mesh: perturb(&unit(8, 2), 0.35, 3)?,
        },
        Fixture {
            name: "grid10_jitter30",
            mesh: perturb(&unit(10, 3), 0.3, 6)?,
        },
        Fixture {
            name: "slab_slivers",
            mesh: scaled(
                &perturb(&make_grid(8, 8, 2, 1.0, 0), 0.3, 7)?,
                Vec3::new(1.0, 1.0, 0.25),
            )?,
        },
        Fixture {
            name: "stretched_bar",
            mesh: scaled(&perturb(&make_grid(9, 4, 4, 1.0, 2), 0.3, 8)?, Vec3::new(3.0, 1.0, 1.0))?,
        },
        Fixture {
            name: "twisted_column",
            mesh: twisted_column(4, 8, 0.5, 0.12)?,
        },
        Fixture {
            name: "flat_twisted_column",
            mesh: perturb(&twisted_column(6, 4, 0.2, 0.05)?, 0.05, 10)?,
        },
        Fixture {
            name: "shell_jitter",
            mesh: perturb(&shell(1, 2), 0.03, 12)?,
        },
    ])
}

/// Tangential jitter of the labeled shells, relative to the sphere spacing.
pub const SHELL_JITTER: f64 = 0.08;

/// Labeled shells at two refinement levels, coarse first. The fine level
/// halves both the sphere spacing and the radial layer width.
pub fn shell_fixtures() -> Result<Vec<Fixture>> {
    Ok(vec![
        Fixture {
            name: "shell_coarse",
            mesh: jitter_tangential(&shell(2, 2), 2, SHELL_JITTER, 1)?,
        },
        Fixture {
            name: "shell_fine",
            mesh: jitter_tangential(&shell(3, 4), 3, SHELL_JITTER, 1)?,
        },
    ])
}

/// Tet and vertex such that the vertex lies strictly inside the tet's
/// circumsphere, by a relative margin.
pub fn delaunay_violation(mesh: &TetMesh) -> Option<(usize, usize)> {
    let v = mesh.vertices();
    for t in 0..mesh.num_tets() {
        let p = mesh.tet_points(t);
        let Ok(c) = circumcenter(&p) else { continue };
        let r = (p[0] - c).norm();
        let tet = mesh.tets()[t];
        if let Some(i) = (0..v.len()).find(|&i| !tet.contains(&i) && (v[i] - c).norm() < r * (1.0 - 1e-9)) {
            return Some((t, i));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Connectivity;

    #[test]
    fn twisted_column_is_valid() {
        let m = twisted_column(3, 4, 0.5, 0.1).unwrap();
        assert_eq!(m.num_tets(), 3 * 18 * 4);
        let v = m.total_volume();
        assert!((v - 18.0).abs() < 0.05 * 18.0, "{v}");
        Connectivity::new(&m).unwrap();
    }

    #[test]
    fn regular_grid_is_delaunay_with_cospherical_ties() {
        assert_eq!(delaunay_violation(&make_grid(2, 2, 2, 1.0, 0)), None);
    }
}

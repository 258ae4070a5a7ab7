use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dual::{build_operators, compute_centers, CenterStrategy, INSIDE_TOLERANCE};
use crate::error::Result;
use crate::mesh::{barycentric_coords, circumcenter, tet_barycentric_coords, Connectivity, TetMesh};
use crate::optim::{optimized_centers, OptimizeOptions, StageTimings};

/// Circumcenter and operator statistics of one mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub tets: usize,
    pub face_outside_fraction: f64,
    pub tet_outside_fraction: f64,
    pub circumcentric_negative_mass: usize,
    pub alexa_symmetry_residual: f64,
    /// `None` when the optimization itself failed.
    pub optimized_definite: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimized_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<StatsTimings>,
}

/// Wall-clock seconds per stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StatsTimings {
    pub connectivity: f64,
    pub circumcentric: f64,
    pub alexa: f64,
    pub optimized: StageTimings,
}

fn outside(coords: &[f64]) -> bool {
    coords.iter().any(|&c| c < -INSIDE_TOLERANCE)
}

/// Fractions of face and tet circumcenters strictly outside their simplex.
pub fn outside_fractions(mesh: &TetMesh, conn: &Connectivity) -> Result<(f64, f64)> {
    let v = mesh.vertices();
    let mut faces_out = 0;
    for f in &conn.faces.faces {
        let p = f.map(|i| v[i]);
        if outside(&barycentric_coords(&circumcenter(&p)?, &p)?) {
            faces_out += 1;
        }
    }
    let mut tets_out = 0;
    for t in 0..mesh.num_tets() {
        let p = mesh.tet_points(t);
        if outside(&tet_barycentric_coords(&circumcenter(&p)?, &p)?) {
            tets_out += 1;
        }
    }
    let frac = |k: usize, n: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    Ok((frac(faces_out, conn.faces.len()), frac(tets_out, mesh.num_tets())))
}

/// Collects [`MeshStats`]. Stage times are recorded only when
/// `options.timings` is set.
pub fn mesh_stats(mesh: &TetMesh, options: &OptimizeOptions) -> Result<MeshStats> {
    let clock = Instant::now();
    let conn = Connectivity::new(mesh)?;
    let (face_outside_fraction, tet_outside_fraction) = outside_fractions(mesh, &conn)?;
    let t_conn = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let circ = compute_centers(mesh, &conn, &CenterStrategy::Circumcentric)?;
    let mass = crate::dual::mass_matrix(mesh, &conn, &circ)?.diagonal();
    let circumcentric_negative_mass = mass.iter().filter(|&&m| m < 0.0).count();
    let t_circ = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let alexa = compute_centers(mesh, &conn, &CenterStrategy::AlexaSnap)?;
    let l = build_operators(mesh, &conn, &alexa)?.laplacian;
    let norm = l.frobenius_norm();
    let alexa_symmetry_residual = if norm > 0.0 {
        l.add(1.0, &l.transpose(), -1.0).frobenius_norm() / norm
    } else {
        0.0
    };
    let t_alexa = clock.elapsed().as_secs_f64();

    let (optimized_definite, optimized_error, opt_times) = match optimized_centers(mesh, &conn, options) {
        Ok((_, report)) => (report.definite.map(|d| d.pass), None, report.timings),
        Err(e) => {
            log::error!("optimization failed: {e}");
            (None, Some(e.to_string()), None)
        }
    };
    let timings = options.timings.then(|| StatsTimings {
        connectivity: t_conn,
        circumcentric: t_circ,
        alexa: t_alexa,
        optimized: opt_times.unwrap_or_default(),
    });
    Ok(MeshStats {
        vertices: mesh.num_vertices(),
        tets: mesh.num_tets(),
        face_outside_fraction,
        tet_outside_fraction,
        circumcentric_negative_mass,
        alexa_symmetry_residual,
        optimized_definite,
        optimized_error,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{make_grid, perturb, Vec3};

    #[test]
    fn acute_tet_has_nothing_outside() {
        let s = 1.0 / 2f64.sqrt();
        let p = vec![
            Vec3::new(1.0, 0.0, -s),
            Vec3::new(-1.0, 0.0, -s),
            Vec3::new(0.0, 1.0, s),
            Vec3::new(0.0, -1.0, s),
        ];
        let m = TetMesh::new_reoriented(p, vec![[0, 1, 2, 3]], None).unwrap();
        let st = mesh_stats(&m, &OptimizeOptions::default()).unwrap();
        assert_eq!((st.face_outside_fraction, st.tet_outside_fraction), (0.0, 0.0));
        assert_eq!(st.circumcentric_negative_mass, 0);
        assert!(st.alexa_symmetry_residual < 1e-12);
        assert_eq!(st.optimized_definite, Some(true));
        assert!(st.timings.is_none());
    }

    #[test]
    fn perturbed_grid_has_outside_circumcenters() {
        let m = perturb(&make_grid(3, 3, 3, 1.0, 0), 0.3, 1).unwrap();
        let st = mesh_stats(&m, &OptimizeOptions::default()).unwrap();
        assert!(st.face_outside_fraction > 0.0 && st.face_outside_fraction < 1.0);
        assert!(st.tet_outside_fraction > st.face_outside_fraction);
        assert!(st.alexa_symmetry_residual > 1e-3);
    }

    #[test]
    fn timings_are_opt_in() {
        let m = make_grid(1, 1, 1, 1.0, 0);
        let o = OptimizeOptions {
            timings: true,
            ..Default::default()
        };
        assert!(mesh_stats(&m, &o).unwrap().timings.is_some());
    }
}

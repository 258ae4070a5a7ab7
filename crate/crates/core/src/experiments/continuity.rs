use serde::{Deserialize, Serialize};

use crate::dual::mass_matrix;
use crate::error::{Error, Result};
use crate::mesh::{Connectivity, TetMesh, Vec3};
use crate::optim::{Method, OptimizeOptions};

/// One row of a morph sweep. Step `s` sits at `t = s / T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityStep {
    pub step: usize,
    pub t: f64,
    /// `fᵀ M f` for the probe.
    pub energy: f64,
    /// `|energy(s) − energy(s−1)|`; zero at step 0.
    pub energy_jump: f64,
    /// `‖M(s) − M(s−1)‖_∞ · T`; zero at step 0.
    pub mass_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuitySummary {
    pub method: Method,
    pub steps: usize,
    pub max_energy_jump: f64,
    /// Step at which the largest jump ends.
    pub max_jump_step: usize,
    pub max_mass_rate: f64,
}

/// Sinusoidal probe evaluated at the start positions, so that every step
/// weighs the same vector.
pub fn probe(mesh: &TetMesh) -> Vec<f64> {
    let (lo, _) = mesh.bbox();
    let d = mesh.bbox_diagonal();
    let dir = Vec3::new(1.0, 2.0, 3.0).normalize();
    mesh.vertices()
        .iter()
        .map(|p| (2.0 * std::f64::consts::PI * (p - lo).dot(&dir) / d).sin() + 1.5)
        .collect()
}

/// Linearly interpolates vertex positions from `start` to `end` over `steps`
/// steps and records the probe mass at each of the `steps + 1` meshes.
///
/// Fails with `Degenerate` when an intermediate tetrahedron collapses.
pub fn continuity(
    start: &TetMesh,
    end: &TetMesh,
    steps: usize,
    method: Method,
    options: &OptimizeOptions,
) -> Result<(Vec<ContinuityStep>, ContinuitySummary)> {
    if steps == 0 {
        return Err(Error::Invalid("continuity sweep needs at least one step".into()));
    }
    if start.tets() != end.tets() || start.num_vertices() != end.num_vertices() {
        return Err(Error::Invalid(
            "start and end meshes have different connectivity".into(),
        ));
    }
    let conn = Connectivity::new(start)?;
    let f = probe(start);
    let mut rows = Vec::with_capacity(steps + 1);
    let mut previous: Option<(Vec<f64>, f64)> = None;
    for s in 0..=steps {
        // exact endpoints
        let t = s as f64 / steps as f64;
        let vertices = start
            .vertices()
            .iter()
            .zip(end.vertices())
            .map(|(a, b)| if s == steps { *b } else { a + (b - a) * t })
            .collect();
        let mesh = start.with_vertices(vertices)?;
        let (centers, _) = method.centers(&mesh, &conn, options)?;
        let mass = mass_matrix(&mesh, &conn, &centers)?.diagonal();
        let energy: f64 = mass.iter().zip(&f).map(|(m, x)| m * x * x).sum();
        let (energy_jump, mass_rate) = match &previous {
            None => (0.0, 0.0),
            Some((m0, e0)) => {
                let dm = mass.iter().zip(m0).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
                ((energy - e0).abs(), dm * steps as f64)
            }
        };
        rows.push(ContinuityStep {
            step: s,
            t,
            energy,
            energy_jump,
            mass_rate,
        });
        previous = Some((mass, energy));
    }
    let (max_jump_step, max_energy_jump) = rows
        .iter()
        .map(|r| (r.step, r.energy_jump))
        .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
    let max_mass_rate = rows.iter().map(|r| r.mass_rate).fold(0.0, f64::max);
    let summary = ContinuitySummary {
        method,
        steps,
        max_energy_jump,
        max_jump_step,
        max_mass_rate,
    };
    Ok((rows, summary))
}

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{Matrix3, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::center_qp::{assemble_center_qp, face_centers_from_weights, SymmetryRows};
use super::{solve_qp, QpSettings, QpStatus};
use crate::dual::hexahedron::{build, local_ids};
use crate::dual::{all_local_operators, compute_centers, CenterSet, CenterStrategy};
use crate::error::{Error, Result};
use crate::mesh::{barycenter, barycentric_coords, tet_barycentric_coords, Connectivity, TetMesh, Vec3};

/// A face counts as moved when its center is farther than this times the
/// QP length scale from its circumcenter.
pub const MOVE_TOLERANCE: f64 = 1e-6;

/// `verify_definite` passes when every tet has `λ_min ≥ −DEFINITE_TOLERANCE · λ_max`.
pub const DEFINITE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    /// Lower bound on every barycentric weight of a face center.
    pub margin: f64,
    pub symmetry_rows: SymmetryRows,
    pub qp: QpSettings,
    /// Record wall-clock stage durations in the report.
    pub timings: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            margin: 0.0,
            symmetry_rows: SymmetryRows::default(),
            qp: QpSettings::default(),
            timings: false,
        }
    }
}

/// Seconds spent in each stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub assemble: f64,
    pub solve: f64,
    pub tet_centers: f64,
    pub verify: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    /// `Σ_f ‖o_f − c_f‖²`
    pub objective: f64,
    /// Largest per-tet `‖L_t − L_tᵀ‖_F / ‖L_t‖_F`.
    pub max_symmetry_residual: f64,
    pub min_barycentric: f64,
    pub moved_faces: usize,
    pub num_faces: usize,
    pub num_variables: usize,
    pub num_equalities: usize,
    pub qp_status: QpStatus,
    pub qp_iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    /// Tets whose center fell back to the barycenter.
    pub tet_fallbacks: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub definite: Option<DefiniteReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimings>,
}

/// Optimizes face centers; edges are midpoints and tets barycenters.
pub fn optimize_face_centers(
    mesh: &TetMesh,
    conn: &Connectivity,
    options: &OptimizeOptions,
) -> Result<(CenterSet, OptimizationReport)> {
    let clock = Instant::now();
    let qp = assemble_center_qp(mesh, conn, options.margin, options.symmetry_rows)?;
    let assemble = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let mut settings = options.qp.clone();
    if settings.initial_x.is_none() {
        settings.initial_x = Some(vec![1.0 / 3.0; qp.problem.num_variables()]);
    }
    if settings.kkt_order.is_none() {
        settings.kkt_order = Some(qp.kkt_order.clone());
    }
    let sol = solve_qp(&qp.problem, &settings)?;
    let solve = clock.elapsed().as_secs_f64();
    log::info!(
        "center QP: {} variables, {} equalities, {:?} after {} iterations",
        qp.problem.num_variables(),
        qp.problem.num_equalities(),
        sol.status,
        sol.iterations
    );
    if sol.status != QpStatus::Optimal {
        return Err(Error::Solver(format!(
            "{:?} after {} iterations (primal {:e}, dual {:e}, gap {:e})",
            sol.status, sol.iterations, sol.primal_residual, sol.dual_residual, sol.gap
        )));
    }

    let face_centers = face_centers_from_weights(mesh, conn, &sol.x);
    let edge_centers = conn
        .edges
        .edges
        .iter()
        .map(|[a, b]| (mesh.vertices()[*a] + mesh.vertices()[*b]) * 0.5)
        .collect();
    let tet_centers = (0..mesh.num_tets()).map(|t| barycenter(&mesh.tet_points(t))).collect();
    let centers = CenterSet {
        edge_centers,
        face_centers,
        tet_centers,
    };

    let verts = mesh.vertices();
    let mut min_barycentric = f64::INFINITY;
    let mut moved_faces = 0;
    for (f, tri) in conn.faces.faces.iter().enumerate() {
        let bc = barycentric_coords(&centers.face_centers[f], &tri.map(|v| verts[v]))?;
        min_barycentric = bc.iter().copied().fold(min_barycentric, f64::min);
        if (centers.face_centers[f] - qp.circumcenters[f]).norm() > MOVE_TOLERANCE * qp.length_scale {
            moved_faces += 1;
        }
    }
    let max_symmetry_residual = all_local_operators(mesh, conn, &centers)?
        .iter()
        .map(|o| (o.l - o.l.transpose()).norm() / o.l.norm())
        .fold(0.0, f64::max);

    let report = OptimizationReport {
        objective: qp.objective(mesh, conn, &sol.x),
        max_symmetry_residual,
        min_barycentric,
        moved_faces,
        num_faces: conn.faces.len(),
        num_variables: qp.problem.num_variables(),
        num_equalities: qp.problem.num_equalities(),
        qp_status: sol.status,
        qp_iterations: sol.iterations,
        primal_residual: sol.primal_residual,
        dual_residual: sol.dual_residual,
        gap: sol.gap,
        tet_fallbacks: Vec::new(),
        definite: None,
        timings: options.timings.then(|| StageTimings {
            assemble,
            solve,
            ..Default::default()
        }),
    };
    Ok((centers, report))
}

/// Full pipeline: optimized face centers, projected tet centers and the
/// definiteness check.
pub fn optimized_centers(
    mesh: &TetMesh,
    conn: &Connectivity,
    options: &OptimizeOptions,
) -> Result<(CenterSet, OptimizationReport)> {
    let (mut centers, mut report) = optimize_face_centers(mesh, conn, options)?;

    let clock = Instant::now();
    let tets = postfacto_tet_centers(mesh, conn, &centers)?;
    centers.tet_centers = tets.centers;
    report.tet_fallbacks = tets.fallbacks;
    let tet_time = clock.elapsed().as_secs_f64();

    let clock = Instant::now();
    let definite = verify_definite(mesh, conn, &centers)?;
    if !definite.pass {
        log::error!("indefinite implied tensor: {definite:?}");
    }
    report.definite = Some(definite);
    if let Some(t) = report.timings.as_mut() {
        t.tet_centers = tet_time;
        t.verify = clock.elapsed().as_secs_f64();
    }
    Ok((centers, report))
}

/// Result of the per-tet center projection.
#[derive(Debug, Clone, PartialEq)]
pub struct TetCenters {
    pub centers: Vec<Vec3>,
    /// Tets with no feasible center; they keep their barycenter.
    pub fallbacks: Vec<usize>,
}

/// Per tet, the point closest to the tet circumcenter that lies in the
/// closed tet and keeps all four hexahedron volumes non-negative.
pub fn postfacto_tet_centers(mesh: &TetMesh, conn: &Connectivity, centers: &CenterSet) -> Result<TetCenters> {
    centers.validate(mesh, conn)?;
    let results: Vec<(Vec3, bool)> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| -> Result<(Vec3, bool)> {
            let p = mesh.tet_points(t);
            let target = crate::mesh::circumcenter(&p)?;
            let cons = tet_center_constraints(mesh, conn, centers, t)?;
            let scale = crate::mesh::diameter(&p);
            Ok(match project_polytope(&target, &cons, scale) {
                Some(c) => (c, false),
                None => (barycenter(&p), true),
            })
        })
        .collect::<Result<_>>()?;
    let fallbacks: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, r)| r.1)
        .map(|(t, _)| t)
        .collect();
    if !fallbacks.is_empty() {
        log::warn!("{} tet centers fell back to barycenters", fallbacks.len());
    }
    Ok(TetCenters {
        centers: results.into_iter().map(|r| r.0).collect(),
        fallbacks,
    })
}

/// Half-space `n · c + h ≥ 0`.
#[derive(Debug, Clone, Copy)]
struct HalfSpace {
    n: Vec3,
    h: f64,
}

/// The eight affine constraints on the center of tet `t`: four barycentric
/// coordinates and four hexahedron volumes, each normalized to a unit
/// gradient. Volumes that do not depend on the center are checked directly.
fn tet_center_constraints(
    mesh: &TetMesh,
    conn: &Connectivity,
    centers: &CenterSet,
    t: usize,
) -> Result<Option<Vec<HalfSpace>>> {
    let p = mesh.tet_points(t);
    let mut local = centers.local(conn, t);
    let ids = local_ids(mesh, conn, t);
    let base = barycenter(&p);
    let step = crate::mesh::diameter(&p);

    let eval = |c: Vec3, local: &mut crate::dual::LocalCenters| -> Result<[f64; 8]> {
        let bc = tet_barycentric_coords(&c, &p)?;
        local.tet = c;
        let mut out = [0.0; 8];
        out[..4].copy_from_slice(&bc);
        for i in 0..4 {
            out[4 + i] = crate::dual::hex_volume(&build(&p, local, &ids, i)) / step.powi(3);
        }
        Ok(out)
    };
    let f0 = eval(base, &mut local)?;
    let mut grads = [Vec3::zeros(); 8];
    for axis in 0..3 {
        let mut c = base;
        c[axis] += step;
        let f1 = eval(c, &mut local)?;
        for k in 0..8 {
            grads[k][axis] = (f1[k] - f0[k]) / step;
        }
    }
    let mut out = Vec::with_capacity(8);
    for k in 0..8 {
        let norm = grads[k].norm();
        if norm * step <= 1e-12 {
            if f0[k] < -1e-12 {
                return Ok(None);
            }
            continue;
        }
        let n = grads[k] / norm;
        out.push(HalfSpace {
            n,
            h: f0[k] / norm - n.dot(&base),
        });
    }
    Ok(Some(out))
}

/// Euclidean projection of `target` onto the polytope, by enumerating every
/// set of at most three linearly independent active constraints.
fn project_polytope(target: &Vec3, cons: &Option<Vec<HalfSpace>>, scale: f64) -> Option<Vec3> {
    let cons = cons.as_ref()?;
    let feasible = |c: &Vec3| cons.iter().all(|h| h.n.dot(c) + h.h >= -1e-12 * scale);
    if feasible(target) {
        return Some(*target);
    }
    let m = cons.len();
    let mut best: Option<(f64, Vec3)> = None;
    let mut consider = |c: Vec3| {
        if feasible(&c) {
            let d = (c - target).norm_squared();
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, c));
            }
        }
    };
    for a in 0..m {
        let ha = cons[a];
        consider(target - ha.n * (ha.n.dot(target) + ha.h));
        for b in a + 1..m {
            if let Some(c) = project_affine(target, &[cons[a], cons[b]]) {
                consider(c);
            }
            for c in b + 1..m {
                if let Some(x) = project_affine(target, &[cons[a], cons[b], cons[c]]) {
                    consider(x);
                }
            }
        }
    }
    best.map(|b| b.1)
}

/// Projection onto `{c : n_k · c + h_k = 0}`, or `None` when the normals are
/// dependent.
fn project_affine(target: &Vec3, cons: &[HalfSpace]) -> Option<Vec3> {
    let k = cons.len();
    let gram = nalgebra::DMatrix::from_fn(k, k, |i, j| cons[i].n.dot(&cons[j].n));
    let r = nalgebra::DVector::from_fn(k, |i, _| cons[i].n.dot(target) + cons[i].h);
    if gram.determinant().abs() < 1e-10 {
        return None;
    }
    let lambda = gram.lu().solve(&r)?;
    let mut c = *target;
    for i in 0..k {
        c -= cons[i].n * lambda[i];
    }
    Some(c)
}

/// Outcome of the per-tet definiteness check of the symmetrized tensors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefiniteReport {
    pub pass: bool,
    /// Tet with the smallest `λ_min / λ_max`.
    pub worst_tet: usize,
    pub worst_ratio: f64,
    pub worst_lambda_min: f64,
    pub worst_lambda_max: f64,
}

/// Eigenvalues of each symmetrized implied tensor; PASS iff every tet has
/// `λ_min ≥ −DEFINITE_TOLERANCE · λ_max`.
pub fn verify_definite(mesh: &TetMesh, conn: &Connectivity, centers: &CenterSet) -> Result<DefiniteReport> {
    let locals = all_local_operators(mesh, conn, centers)?;
    let mut report = DefiniteReport {
        pass: true,
        worst_tet: 0,
        worst_ratio: f64::INFINITY,
        worst_lambda_min: f64::NAN,
        worst_lambda_max: f64::NAN,
    };
    for (t, o) in locals.iter().enumerate() {
        let s: Matrix3<f64> = (o.a + o.a.transpose()) * 0.5;
        let eig = SymmetricEigen::new(s).eigenvalues;
        let (lo, hi) = (eig.min(), eig.max());
        let ratio = lo / hi.abs();
        if lo < -DEFINITE_TOLERANCE * hi || !ratio.is_finite() {
            report.pass = false;
        }
        if ratio < report.worst_ratio || t == 0 {
            report.worst_tet = t;
            report.worst_ratio = ratio;
            report.worst_lambda_min = lo;
            report.worst_lambda_max = hi;
        }
    }
    Ok(report)
}

/// Every way of choosing centers, including the optimized pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Barycentric,
    Circumcentric,
    Alexa,
    CircumSnap,
    Optimized,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Barycentric,
        Method::Circumcentric,
        Method::Alexa,
        Method::CircumSnap,
        Method::Optimized,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Barycentric => "barycentric",
            Method::Circumcentric => "circumcentric",
            Method::Alexa => "alexa",
            Method::CircumSnap => "circumsnap",
            Method::Optimized => "optimized",
        }
    }

    /// Centers for this method; the report is present for `Optimized` only.
    pub fn centers(
        self,
        mesh: &TetMesh,
        conn: &Connectivity,
        options: &OptimizeOptions,
    ) -> Result<(CenterSet, Option<OptimizationReport>)> {
        let strategy = match self {
            Method::Barycentric => CenterStrategy::Barycentric,
            Method::Circumcentric => CenterStrategy::Circumcentric,
            Method::Alexa => CenterStrategy::AlexaSnap,
            Method::CircumSnap => CenterStrategy::CircumSnap,
            Method::Optimized => {
                let (c, r) = optimized_centers(mesh, conn, options)?;
                return Ok((c, Some(r)));
            }
        };
        Ok((compute_centers(mesh, conn, &strategy)?, None))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown center method '{s}'")))
    }
}

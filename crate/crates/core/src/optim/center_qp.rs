use nalgebra::{Matrix3x4, Matrix4, Matrix4x3, SVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::QpProblem;
use crate::dual::gradient_matrix;
use crate::error::{Error, Result};
use crate::linalg::{nested_dissection_order, SparseMatrix};
use crate::mesh::{circumcenter, local_edge, Connectivity, TetMesh, Vec3, TET_EDGES, TET_FACES};

/// Weight of the `(Σ_j B_fj − 1)²` term that makes each face block strictly
/// convex without changing the optimum.
const PARTITION_WEIGHT: f64 = 1.0;

/// Symmetry rows (or singular values) below this fraction of the tet's
/// largest are dropped.
const ZERO_ROW: f64 = 1e-12;

/// Singular values of a tet's symmetry block below this fraction of the
/// largest are treated as zero.
const RANK_TOLERANCE: f64 = 1e-9;

/// How each tet's six symmetry equations enter the QP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryRows {
    /// All six, each scaled to unit max-norm; redundant rows stay.
    All,
    /// An orthonormal basis of their row space (numerically rank 3).
    #[default]
    Basis,
}

/// The face-center QP in barycentric variables.
///
/// Variable `3f + j` is the weight of vertex `conn.faces.faces[f][j]` in the
/// center of face `f`. The first `num_faces` equality rows are partitions of
/// unity; the rest are symmetry rows, one per entry of `row_tets`.
#[derive(Debug, Clone)]
pub struct CenterQp {
    pub problem: QpProblem,
    pub circumcenters: Vec<Vec3>,
    /// Length used to nondimensionalize the objective.
    pub length_scale: f64,
    /// Tet of each symmetry row.
    pub row_tets: Vec<usize>,
    /// Elimination order for the KKT system: each face's weights and
    /// partition row, then the symmetry rows tet by tet in nested-dissection
    /// order of the tet adjacency graph.
    pub kkt_order: Vec<usize>,
}

impl CenterQp {
    pub fn num_faces(&self) -> usize {
        self.circumcenters.len()
    }

    pub fn variable(face: usize, corner: usize) -> usize {
        3 * face + corner
    }

    /// `Σ‖o_f − c_f‖²` in mesh units.
    pub fn objective(&self, mesh: &TetMesh, conn: &Connectivity, x: &[f64]) -> f64 {
        face_centers_from_weights(mesh, conn, x)
            .iter()
            .zip(&self.circumcenters)
            .map(|(c, o)| (c - o).norm_squared())
            .sum()
    }
}

/// Face centers `Σ_j B_fj v_j`, with each weight triple renormalized to sum
/// to one.
pub fn face_centers_from_weights(mesh: &TetMesh, conn: &Connectivity, x: &[f64]) -> Vec<Vec3> {
    conn.faces
        .faces
        .iter()
        .enumerate()
        .map(|(f, tri)| {
            let w = &x[3 * f..3 * f + 3];
            let s: f64 = w.iter().sum();
            (0..3).map(|j| mesh.vertices()[tri[j]] * (w[j] / s)).sum()
        })
        .collect()
}

/// Coefficients of the six entries `L_xy − L_yx` (pairs in `TET_EDGES` order)
/// of `L_t = D_t G_t` in the twelve weights of the tet's faces, indexed
/// `3k + j` for local face `k` and corner `j` of `face_points[k]`.
///
/// Exact on the partition-of-unity subspace.
pub fn symmetry_coefficients(p: &[Vec3; 4], g: &Matrix3x4<f64>, face_points: &[[Vec3; 3]; 4]) -> [[f64; 12]; 6] {
    let o = (p[0] + p[1] + p[2] + p[3]) * 0.25;
    let edges = TET_EDGES.map(|[a, b]| (p[a] + p[b]) * 0.5);
    let mut rows = [[0.0; 12]; 6];
    for k in 0..4 {
        for j in 0..3 {
            let w = face_points[k][j] - o;
            let mut d = Matrix4x3::zeros();
            for i in (0..4).filter(|&i| i != k) {
                let [a, b, c] = TET_FACES[i];
                for (s, t) in [(a, b), (b, c), (c, a)] {
                    if 6 - i - s - t == k {
                        let v = w.cross(&(edges[local_edge(i, t)] - edges[local_edge(i, s)])) * 0.5;
                        let row = d.row(i) + v.transpose();
                        d.set_row(i, &row);
                    }
                }
            }
            let l: Matrix4<f64> = d * g;
            for (r, [x, y]) in TET_EDGES.iter().enumerate() {
                rows[r][3 * k + j] = l[(*x, *y)] - l[(*y, *x)];
            }
        }
    }
    rows
}

/// Builds the QP: minimize `Σ‖o_f − c_f‖²` over weights `B ≥ margin` with
/// partition of unity and a symmetric `D_t G_t` on every tet.
pub fn assemble_center_qp(
    mesh: &TetMesh,
    conn: &Connectivity,
    margin: f64,
    symmetry: SymmetryRows,
) -> Result<CenterQp> {
    if !(0.0..1.0 / 3.0).contains(&margin) {
        return Err(Error::Invalid(format!("margin {margin} must lie in [0, 1/3)")));
    }
    let k = conn.faces.len();
    let n = 3 * k;
    let s = mesh.mean_edge_length();
    let verts = mesh.vertices();

    let circumcenters: Vec<Vec3> = conn
        .faces
        .faces
        .par_iter()
        .map(|tri| circumcenter(&tri.map(|v| verts[v])))
        .collect::<Result<_>>()?;

    // ‖Σ_j B_j (v_j − o)‖² / s² + ρ (Σ_j B_j − 1)², expanded
    let mut p_trip = Vec::with_capacity(9 * k);
    let mut q = vec![0.0; n];
    for (f, tri) in conn.faces.faces.iter().enumerate() {
        let w = tri.map(|v| (verts[v] - circumcenters[f]) / s);
        for a in 0..3 {
            for b in 0..3 {
                let h = 2.0 * (w[a].dot(&w[b]) + PARTITION_WEIGHT);
                p_trip.push((3 * f + a, 3 * f + b, h));
            }
            q[3 * f + a] = -2.0 * PARTITION_WEIGHT;
        }
    }
    let p = SparseMatrix::from_triplets(n, n, &p_trip)?;

    let local: Vec<Vec<[f64; 12]>> = (0..mesh.num_tets())
        .into_par_iter()
        .map(|t| -> Result<_> {
            let pts = mesh.tet_points(t);
            let g = gradient_matrix(&pts)?;
            let fp = conn.faces.tet_faces[t].map(|(f, _)| conn.faces.faces[f].map(|v| verts[v]));
            Ok(reduce_rows(&symmetry_coefficients(&pts, &g, &fp), symmetry))
        })
        .collect::<Result<_>>()?;

    let mut a_trip = Vec::with_capacity(3 * k + 12 * 6 * mesh.num_tets());
    for f in 0..k {
        for j in 0..3 {
            a_trip.push((f, 3 * f + j, 1.0));
        }
    }
    let mut row_tets = Vec::new();
    let mut first_row = Vec::with_capacity(mesh.num_tets() + 1);
    for (t, rows) in local.iter().enumerate() {
        first_row.push(k + row_tets.len());
        let faces = conn.faces.tet_faces[t];
        for coef in rows {
            let r = k + row_tets.len();
            for lf in 0..4 {
                for j in 0..3 {
                    a_trip.push((r, 3 * faces[lf].0 + j, coef[3 * lf + j]));
                }
            }
            row_tets.push(t);
        }
    }
    first_row.push(k + row_tets.len());
    let m = k + row_tets.len();
    let a = SparseMatrix::from_triplets(m, n, &a_trip)?;
    let mut b = vec![0.0; m];
    b[..k].fill(1.0);

    Ok(CenterQp {
        problem: QpProblem {
            p,
            q,
            a,
            b,
            lower: vec![margin; n],
            upper: vec![f64::INFINITY; n],
        },
        circumcenters,
        length_scale: s,
        row_tets,
        kkt_order: kkt_order(mesh, conn, &first_row),
    })
}

/// Drops negligible rows, or replaces the rows by an orthonormal basis of
/// their span.
fn reduce_rows(rows: &[[f64; 12]; 6], symmetry: SymmetryRows) -> Vec<[f64; 12]> {
    let big = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if big == 0.0 {
        return Vec::new();
    }
    match symmetry {
        SymmetryRows::All => rows
            .iter()
            .filter_map(|r| {
                let m = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                (m > ZERO_ROW * big).then(|| r.map(|v| v / m))
            })
            .collect(),
        SymmetryRows::Basis => {
            // Gram-Schmidt with largest-remaining-row pivoting, two passes
            let mut rest: Vec<SVector<f64, 12>> = rows.iter().map(|r| SVector::from_column_slice(r) / big).collect();
            let mut basis: Vec<SVector<f64, 12>> = Vec::with_capacity(3);
            let scale = rest.iter().map(|r| r.norm()).fold(0.0, f64::max);
            while let Some((k, norm)) = rest
                .iter()
                .map(|r| r.norm())
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(&b.1))
            {
                if norm <= RANK_TOLERANCE * scale {
                    break;
                }
                let mut q = rest.swap_remove(k) / norm;
                for b in &basis {
                    q -= b * b.dot(&q);
                }
                q /= q.norm();
                for r in rest.iter_mut() {
                    *r -= q * q.dot(r);
                }
                basis.push(q);
            }
            basis.iter().map(|q| std::array::from_fn(|i| q[i])).collect()
        }
    }
}

/// Faces first (weights then partition row), then tets in nested-dissection
/// order. Eliminating every face before any tet only couples the rows of
/// face-adjacent tets.
fn kkt_order(mesh: &TetMesh, conn: &Connectivity, first_row: &[usize]) -> Vec<usize> {
    let k = conn.faces.len();
    let n = 3 * k;
    let nt = mesh.num_tets();
    let mut order = Vec::with_capacity(n + first_row[nt]);
    for f in 0..k {
        order.extend([3 * f, 3 * f + 1, 3 * f + 2, n + f]);
    }
    let mut ptr = vec![0usize; nt + 1];
    let mut adj = Vec::with_capacity(4 * nt);
    for t in 0..nt {
        for (f, _) in conn.faces.tet_faces[t] {
            if let (a, Some(b)) = conn.faces.face_tets[f] {
                adj.push(if a == t { b } else { a })
            }
        }
        ptr[t + 1] = adj.len();
    }
    for t in nested_dissection_order(&ptr, &adj) {
        order.extend((first_row[t]..first_row[t + 1]).map(|r| n + r));
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::local::tests::{random_centers, random_tet};
    use crate::dual::{divergence_matrix, LocalCenters};
    use crate::mesh::{barycentric_coords, make_grid, perturb};
    use nalgebra::SMatrix;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    proptest! {
        #[test]
        fn symmetry_rows_match_divergence(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_tet(&mut rng);
            let g = gradient_matrix(&p).unwrap();
            let fp = TET_FACES.map(|f| f.map(|v| p[v]));
            let c = random_centers(&p, &mut rng);
            let c = LocalCenters { edges: TET_EDGES.map(|[a, b]| (p[a] + p[b]) * 0.5), ..c };
            let l = divergence_matrix(&p, &c) * g;
            let mut w = [0.0; 12];
            for k in 0..4 {
                let bc = barycentric_coords(&c.faces[k], &fp[k]).unwrap();
                w[3 * k..3 * k + 3].copy_from_slice(&bc);
            }
            let rows = symmetry_coefficients(&p, &g, &fp);
            let scale = 1.0 + l.abs().max();
            for (r, [x, y]) in TET_EDGES.iter().enumerate() {
                let got: f64 = rows[r].iter().zip(&w).map(|(a, b)| a * b).sum();
                prop_assert!((got - (l[(*x, *y)] - l[(*y, *x)])).abs() < 1e-10 * scale);
            }
        }

        #[test]
        fn barycenters_are_feasible(seed in any::<u64>(), diag in 0u8..4) {
            let m = perturb(&make_grid(3, 2, 2, 1.0, diag), 0.3, seed).unwrap();
            let conn = Connectivity::new(&m).unwrap();
            for rows in [SymmetryRows::All, SymmetryRows::Basis] {
                let qp = assemble_center_qp(&m, &conn, 0.0, rows).unwrap();
                let x = vec![1.0 / 3.0; qp.problem.num_variables()];
                let r = qp.problem.a.mul_vec(&x);
                for (ri, bi) in r.iter().zip(&qp.problem.b) {
                    prop_assert!((ri - bi).abs() <= 1e-10);
                }
            }
        }

        #[test]
        fn symmetry_rows_have_rank_three(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_tet(&mut rng);
            let g = gradient_matrix(&p).unwrap();
            let fp = TET_FACES.map(|f| f.map(|v| p[v]));
            let rows = symmetry_coefficients(&p, &g, &fp);
            let mat = SMatrix::<f64, 6, 12>::from_fn(|i, j| rows[i][j]);
            let sv = mat.singular_values();
            let smax = sv.max();
            let rank = sv.iter().filter(|&&v| v > 1e-9 * smax).count();
            prop_assert_eq!(rank, 3);
            let basis = reduce_rows(&rows, SymmetryRows::Basis);
            prop_assert_eq!(basis.len(), 3);
            // every original row lies in the span of the basis
            for r in &rows {
                let mut rest = SVector::<f64, 12>::from_column_slice(r);
                for q in &basis {
                    let q = SVector::<f64, 12>::from_column_slice(q);
                    rest -= q * q.dot(&rest);
                }
                prop_assert!(rest.norm() <= 1e-9 * (1.0 + smax));
            }
        }
    }

    #[test]
    fn face_blocks_are_strictly_convex() {
        let m = perturb(&make_grid(2, 2, 2, 1.0, 0), 0.2, 3).unwrap();
        let conn = Connectivity::new(&m).unwrap();
        let qp = assemble_center_qp(&m, &conn, 0.0, SymmetryRows::Basis).unwrap();
        let dense = qp.problem.p.to_dense();
        for f in 0..qp.num_faces() {
            let block = dense.view((3 * f, 3 * f), (3, 3)).into_owned();
            let eig = block.symmetric_eigen();
            assert!(eig.eigenvalues.min() > 1e-8, "face {f}");
        }
    }

    #[test]
    fn kkt_order_is_a_permutation() {
        let m = perturb(&make_grid(2, 2, 2, 1.0, 1), 0.2, 8).unwrap();
        let conn = Connectivity::new(&m).unwrap();
        let qp = assemble_center_qp(&m, &conn, 0.0, SymmetryRows::Basis).unwrap();
        let mut o = qp.kkt_order.clone();
        o.sort_unstable();
        let dim = qp.problem.num_variables() + qp.problem.num_equalities();
        assert_eq!(o, (0..dim).collect::<Vec<_>>());
        assert_eq!(qp.row_tets.len(), 3 * m.num_tets());
    }

    #[test]
    fn rejects_bad_margin() {
        let m = make_grid(1, 1, 1, 1.0, 0);
        let conn = Connectivity::new(&m).unwrap();
        assert!(assemble_center_qp(&m, &conn, 0.5, SymmetryRows::All).is_err());
        assert!(assemble_center_qp(&m, &conn, -0.1, SymmetryRows::All).is_err());
    }
}

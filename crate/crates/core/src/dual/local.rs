use nalgebra::{Matrix3, Matrix3x4, Matrix4, Matrix4x3};

use super::LocalCenters;
use crate::error::{Error, Result};
use crate::mesh::{local_edge, signed_volume, Vec3, TET_FACES};

/// Per-tet operators. `l = d * g` and `a` is the implied diffusion tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOperators {
    pub g: Matrix3x4<f64>,
    pub d: Matrix4x3<f64>,
    pub l: Matrix4<f64>,
    pub a: Matrix3<f64>,
}

/// Gradients of the four linear hat functions as columns.
pub fn gradient_matrix(p: &[Vec3; 4]) -> Result<Matrix3x4<f64>> {
    let vol = signed_volume(&p[0], &p[1], &p[2], &p[3]);
    let scale = (1..4).map(|k| (p[k] - p[0]).norm()).fold(0.0, f64::max);
    if !(vol.abs() > 1e-14 * scale.powi(3)) {
        return Err(Error::Degenerate(format!("tetrahedron volume {vol:e}")));
    }
    // rows of the inverse edge matrix are the gradients of φ1..φ3
    let e = Matrix3::from_columns(&[p[1] - p[0], p[2] - p[0], p[3] - p[0]]);
    let inv = e
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular edge matrix".into()))?;
    let mut g = Matrix3x4::zeros();
    for k in 0..3 {
        g.set_column(k + 1, &inv.row(k).transpose());
    }
    let g0 = -(g.column(1) + g.column(2) + g.column(3));
    g.set_column(0, &g0);
    Ok(g)
}

/// Integrated outward normal of the dual interface around each local vertex,
/// as rows.
///
/// Row `i` is the vector area `½ Σ x_k × x_{k+1}` of the closed loop
/// `e(i,a) f(i,a,b) e(i,b) f(i,b,c) e(i,c) f(i,a,c)` where `(i,a,b,c)` is an
/// even permutation of the local vertices. The tet center never enters.
pub fn divergence_matrix(p: &[Vec3; 4], c: &LocalCenters) -> Matrix4x3<f64> {
    let mut d = Matrix4x3::zeros();
    for i in 0..4 {
        let [a, b, cc] = TET_FACES[i];
        // the face containing three local vertices is opposite the fourth
        let face = |x: usize, y: usize| c.faces[6 - i - x - y];
        let loop_points = [
            c.edges[local_edge(i, a)],
            face(a, b),
            c.edges[local_edge(i, b)],
            face(b, cc),
            c.edges[local_edge(i, cc)],
            face(a, cc),
        ];
        // translation invariant for a closed loop; centering on the vertex
        // reduces cancellation
        let x = loop_points.map(|q| q - p[i]);
        let mut area = Vec3::zeros();
        for k in 0..6 {
            area += x[k].cross(&x[(k + 1) % 6]);
        }
        d.set_row(i, &(area * 0.5).transpose());
    }
    d
}

/// `A = −(G Gᵀ)⁻¹ G D`, the tensor with `D = −Gᵀ A` whenever the columns of
/// `D` sum to zero.
///
/// `(G Gᵀ)⁻¹ G` equals `X_cᵀ`, the transposed vertex positions centered at
/// the barycenter, so no inverse is formed.
pub fn implied_tensor(p: &[Vec3; 4], d: &Matrix4x3<f64>) -> Result<Matrix3<f64>> {
    gradient_matrix(p)?;
    let o = (p[0] + p[1] + p[2] + p[3]) * 0.25;
    let xc = Matrix4x3::from_fn(|r, c| p[r][c] - o[c]);
    Ok(-(xc.transpose() * d))
}

pub fn local_operators(p: &[Vec3; 4], c: &LocalCenters) -> Result<LocalOperators> {
    let g = gradient_matrix(p)?;
    let d = divergence_matrix(p, c);
    let o = (p[0] + p[1] + p[2] + p[3]) * 0.25;
    let xc = Matrix4x3::from_fn(|r, c| p[r][c] - o[c]);
    let a = -(xc.transpose() * d);
    Ok(LocalOperators { g, d, l: d * g, a })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn reference() -> [Vec3; 4] {
        [
            Vec3::zeros(),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(0.0, 0.0, 1.0),
        ]
    }

    pub(crate) fn random_tet(rng: &mut ChaCha8Rng) -> [Vec3; 4] {
        loop {
            let p: [Vec3; 4] = std::array::from_fn(|_| {
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            });
            let v = signed_volume(&p[0], &p[1], &p[2], &p[3]);
            if v.abs() > 1e-3 {
                return if v > 0.0 { p } else { [p[0], p[1], p[3], p[2]] };
            }
        }
    }

    /// Arbitrary centers on the affine hulls of their simplices.
    pub(crate) fn random_centers(p: &[Vec3; 4], rng: &mut ChaCha8Rng) -> LocalCenters {
        let mut affine = |pts: &[Vec3]| {
            let mut w: Vec<f64> = (1..pts.len()).map(|_| rng.random_range(-0.5..1.0)).collect();
            w.push(1.0 - w.iter().sum::<f64>());
            pts.iter().zip(&w).map(|(q, wi)| q * *wi).sum::<Vec3>()
        };
        let edges = crate::mesh::TET_EDGES.map(|[a, b]| affine(&[p[a], p[b]]));
        let faces = TET_FACES.map(|f| affine(&f.map(|k| p[k])));
        let tet = affine(p);
        LocalCenters { edges, faces, tet }
    }

    #[test]
    fn reference_gradient() {
        let g = gradient_matrix(&reference()).unwrap();
        let want = Matrix3x4::new(-1.0, 1.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 0.0, 1.0);
        assert!((g - want).abs().max() < 1e-15);
    }

    #[test]
    fn degenerate_gradient() {
        let mut p = reference();
        p[3] = Vec3::new(0.3, 0.3, 0.0);
        assert!(matches!(gradient_matrix(&p), Err(Error::Degenerate(_))));
    }

    #[test]
    fn reference_divergence_barycentric() {
        let p = reference();
        let g = gradient_matrix(&p).unwrap();
        let d = divergence_matrix(&p, &LocalCenters::barycentric(&p));
        let oracle = -g.transpose() / 6.0;
        assert!((d - oracle).abs().max() < 1e-15);
        assert!((d.row(1) - nalgebra::RowVector3::new(-1.0 / 6.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn reference_laplacian_barycentric() {
        let p = reference();
        let ops = local_operators(&p, &LocalCenters::barycentric(&p)).unwrap();
        // -(1/6) GᵀG by hand: GᵀG = [[3,-1,-1,-1],[-1,1,0,0],...]
        assert!((ops.l[(0, 0)] + 0.5).abs() < 1e-15);
        assert!((ops.l[(0, 1)] - 1.0 / 6.0).abs() < 1e-15);
        assert!((ops.l[(1, 1)] + 1.0 / 6.0).abs() < 1e-15);
        assert!((ops.a - Matrix3::identity() / 6.0).abs().max() < 1e-15);
    }

    fn tensor_for(p: [Vec3; 4], s: crate::dual::CenterStrategy) -> Matrix3<f64> {
        let m = crate::mesh::TetMesh::new_reoriented(p.to_vec(), vec![[0, 1, 2, 3]], None).unwrap();
        let conn = crate::mesh::Connectivity::new(&m).unwrap();
        let c = crate::dual::compute_centers(&m, &conn, &s).unwrap();
        local_operators(&m.tet_points(0), &c.local(&conn, 0)).unwrap().a
    }

    #[test]
    fn alexa_tensor_asymmetric_on_obtuse_face() {
        let p = [
            Vec3::zeros(),
            Vec3::new(2.0, 0.0, 0.0),
            Vec3::new(3.0, 0.6, 0.0),
            Vec3::new(1.0, 0.5, 1.5),
        ];
        let a = tensor_for(p, crate::dual::CenterStrategy::AlexaSnap);
        assert!((a - a.transpose()).norm() > 1e-3 * a.norm());
    }

    proptest! {
        #[test]
        fn circumcentric_tensor_symmetric(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = tensor_for(random_tet(&mut rng), crate::dual::CenterStrategy::Circumcentric);
            prop_assert!((a - a.transpose()).norm() <= 1e-10 * a.norm());
        }

        #[test]
        fn gradient_invariants(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_tet(&mut rng);
            let g = gradient_matrix(&p).unwrap();
            let x = Matrix4x3::from_fn(|r, c| p[r][c]);
            prop_assert!((g * x - Matrix3::identity()).abs().max() < 1e-12);
            let ones = nalgebra::Vector4::repeat(1.0);
            prop_assert!((g * ones).abs().max() < 1e-12 * g.abs().max());
        }

        #[test]
        fn divergence_invariants(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = random_tet(&mut rng);
            let c1 = random_centers(&p, &mut rng);
            let c2 = random_centers(&p, &mut rng);
            let g = gradient_matrix(&p).unwrap();
            let d1 = divergence_matrix(&p, &c1);
            let scale = 1.0 + d1.abs().max();
            // columns sum to zero
            for k in 0..3 {
                prop_assert!(d1.column(k).sum().abs() < 1e-12 * scale);
            }
            // D = -Gᵀ A reconstructs exactly
            let a = implied_tensor(&p, &d1).unwrap();
            // oracle: least squares Gᵀ A = -D by Householder QR
            let qr = g.transpose().qr();
            let rhs = qr.q().transpose() * (-d1);
            let ls = qr.r().solve_upper_triangular(&rhs).unwrap();
            let sv = g.singular_values();
            let cond = sv.max() / sv.min();
            prop_assert!(
                (a - ls).abs().max() < 1e-13 * cond * (1.0 + ls.abs().max()),
                "{:e} vs {:e}", (a - ls).abs().max(), 1e-13 * cond * (1.0 + ls.abs().max())
            );
            prop_assert!((d1 + g.transpose() * a).abs().max() < 1e-10 * scale * (1.0 + g.abs().max()));
            // tet center does not matter
            let mut c3 = c1;
            c3.tet = Vec3::new(rng.random(), rng.random(), rng.random()) * 100.0;
            prop_assert_eq!(divergence_matrix(&p, &c3), d1);
            // linear in face centers with edge centers fixed
            let alpha: f64 = rng.random_range(-1.0..2.0);
            let mut mix = c1;
            let mut c2f = c1;
            c2f.faces = c2.faces;
            for k in 0..4 {
                mix.faces[k] = c1.faces[k] * alpha + c2.faces[k] * (1.0 - alpha);
            }
            let lhs = divergence_matrix(&p, &mix);
            let rhs = d1 * alpha + divergence_matrix(&p, &c2f) * (1.0 - alpha);
            prop_assert!((lhs - rhs).abs().max() < 1e-12 * (scale + rhs.abs().max()));
        }
    }
}

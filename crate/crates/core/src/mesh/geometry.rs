//! Simplex geometry: volumes, circumcenters, barycenters and barycentric
//! coordinates.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Conditioning bound above which a circumcenter system is declared degenerate.
pub const MAX_CONDITION: f64 = 1e12;

/// Signed volume `det[p1-p0, p2-p0, p3-p0] / 6`.
pub fn signed_volume(p0: &Vec3, p1: &Vec3, p2: &Vec3, p3: &Vec3) -> f64 {
    (p1 - p0).dot(&(p2 - p0).cross(&(p3 - p0))) / 6.0
}

/// Area vector of a triangle (half the cross product, normal by right-hand rule).
pub fn area_vector(p0: &Vec3, p1: &Vec3, p2: &Vec3) -> Vec3 {
    0.5 * (p1 - p0).cross(&(p2 - p0))
}

pub fn barycenter(points: &[Vec3]) -> Vec3 {
    let sum = points.iter().fold(Vec3::zeros(), |acc, p| acc + p);
    sum / points.len() as f64
}

/// Largest pairwise distance between the points.
pub fn diameter(points: &[Vec3]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max((p - q).norm());
        }
    }
    d
}

fn condition2(m: &Matrix2<f64>) -> Option<f64> {
    m.try_inverse().map(|inv| m.norm() * inv.norm())
}

fn condition3(m: &Matrix3<f64>) -> Option<f64> {
    m.try_inverse().map(|inv| m.norm() * inv.norm())
}

/// Circumcenter of an edge, triangle or tetrahedron given as 2, 3 or 4 points.
///
/// Triangles are solved in their own plane, so the result is coplanar with the
/// input. Systems whose (Frobenius) condition estimate exceeds
/// [`MAX_CONDITION`] are rejected.
pub fn circumcenter(points: &[Vec3]) -> Result<Vec3> {
    match points.len() {
        2 => {
            if (points[1] - points[0]).norm() == 0.0 {
                return Err(Error::Degenerate("zero-length edge".into()));
            }
            Ok(0.5 * (points[0] + points[1]))
        }
        3 => {
            let u = points[1] - points[0];
            let v = points[2] - points[0];
            let gram = Matrix2::new(u.dot(&u), u.dot(&v), u.dot(&v), v.dot(&v));
            let cond = condition2(&gram).unwrap_or(f64::INFINITY);
            if !(cond <= MAX_CONDITION) {
                return Err(Error::Degenerate(format!(
                    "triangle circumcenter system has condition {cond:e}"
                )));
            }
            let rhs = Vector2::new(0.5 * u.dot(&u), 0.5 * v.dot(&v));
            let ab = gram.try_inverse().unwrap() * rhs;
            Ok(points[0] + ab.x * u + ab.y * v)
        }
        4 => {
            let p0 = points[0];
            let rows: Vec<Vec3> = points[1..].iter().map(|p| p - p0).collect();
            let m = Matrix3::from_rows(&[rows[0].transpose(), rows[1].transpose(), rows[2].transpose()]);
            let cond = condition3(&m).unwrap_or(f64::INFINITY);
            if !(cond <= MAX_CONDITION) {
                return Err(Error::Degenerate(format!(
                    "tetrahedron circumcenter system has condition {cond:e}"
                )));
            }
            let rhs = Vec3::new(
                0.5 * rows[0].norm_squared(),
                0.5 * rows[1].norm_squared(),
                0.5 * rows[2].norm_squared(),
            );
            Ok(p0 + m.try_inverse().unwrap() * rhs)
        }
        n => Err(Error::Invalid(format!("circumcenter needs 2, 3 or 4 points, got {n}"))),
    }
}

/// Barycentric coordinates of `p` with respect to a triangle.
///
/// `p` is orthogonally projected onto the triangle's plane first; the
/// coordinates sum to one and reconstruct the projection.
pub fn barycentric_coords(p: &Vec3, tri: &[Vec3; 3]) -> Result<[f64; 3]> {
    let u = tri[1] - tri[0];
    let v = tri[2] - tri[0];
    let d = p - tri[0];
    let gram = Matrix2::new(u.dot(&u), u.dot(&v), u.dot(&v), v.dot(&v));
    let det = gram.determinant();
    if !(det > 1e-28 * gram.norm_squared()) {
        return Err(Error::Degenerate("zero-area triangle".into()));
    }
    let inv = gram.try_inverse().unwrap();
    let st = inv * Vector2::new(u.dot(&d), v.dot(&d));
    Ok([1.0 - st.x - st.y, st.x, st.y])
}

/// Barycentric coordinates of `p` with respect to a tetrahedron.
pub fn tet_barycentric_coords(p: &Vec3, tet: &[Vec3; 4]) -> Result<[f64; 4]> {
    let m = Matrix3::from_columns(&[tet[1] - tet[0], tet[2] - tet[0], tet[3] - tet[0]]);
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("flat tetrahedron".into()))?;
    let l = inv * (p - tet[0]);
    Ok([1.0 - l.x - l.y - l.z, l.x, l.y, l.z])
}

/// Signed distances from `p` to the lines of the triangle's edges, measured
/// in-plane; entry `j` refers to the edge opposite vertex `j` and is positive
/// on the triangle's side.
pub fn triangle_edge_distances(p: &Vec3, tri: &[Vec3; 3]) -> Result<[f64; 3]> {
    let b = barycentric_coords(p, tri)?;
    let twice_area = (tri[1] - tri[0]).cross(&(tri[2] - tri[0])).norm();
    let mut out = [0.0; 3];
    for j in 0..3 {
        let len = (tri[(j + 2) % 3] - tri[(j + 1) % 3]).norm();
        out[j] = b[j] * twice_area / len;
    }
    Ok(out)
}

/// Signed distances from `p` to the planes of the tetrahedron's faces; entry
/// `j` refers to the face opposite vertex `j` and is positive inside.
pub fn tet_face_distances(p: &Vec3, tet: &[Vec3; 4]) -> Result<[f64; 4]> {
    let b = tet_barycentric_coords(p, tet)?;
    let vol = signed_volume(&tet[0], &tet[1], &tet[2], &tet[3]).abs();
    let mut out = [0.0; 4];
    for j in 0..4 {
        let f: Vec<Vec3> = (0..4).filter(|&k| k != j).map(|k| tet[k]).collect();
        let area = area_vector(&f[0], &f[1], &f[2]).norm();
        out[j] = b[j] * 3.0 * vol / area;
    }
    Ok(out)
}

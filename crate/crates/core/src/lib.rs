//! Lumped mass matrices and finite-volume Laplacians for tetrahedral meshes.
//!
//! Every operator is built from a choice of *centers*, one point per edge,
//! triangle and tetrahedron. Each tetrahedron hands a hexahedral piece of its
//! volume to each of its vertices; the corners of that piece are the vertex,
//! three edge centers, three face centers and the tet center. The mass matrix
//! sums the piece volumes; the Laplacian integrates a piecewise-constant
//! gradient against the normals of the interfaces between pieces.
//!
//! Modules:
//! - [`mesh`]: meshes, connectivity, MEDIT I/O and generators.
//! - [`dual`]: center strategies, local operators, assembly and property checks.
//! - [`optim`]: optimized face centers (a strictly convex QP) and its solver.
//! - [`linalg`]: sparse matrices, eigensolvers, SPD solves, MatrixMarket I/O.
//! - [`experiments`]: grid bias, continuity, Dirichlet shells and statistics.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod dual;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod mesh;
pub mod optim;

pub use error::{Error, Result};
pub use mesh::{TetMesh, Vec3};

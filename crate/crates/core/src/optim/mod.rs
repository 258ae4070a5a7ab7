//! Optimized face centers: the center QP, its interior-point solver, the
//! per-tet center projection and the definiteness check.

mod center_qp;
mod pipeline;
mod qp;

pub use center_qp::{assemble_center_qp, face_centers_from_weights, symmetry_coefficients, CenterQp, SymmetryRows};
pub use pipeline::{
    optimize_face_centers, optimized_centers, postfacto_tet_centers, verify_definite, DefiniteReport, Method,
    OptimizationReport, OptimizeOptions, StageTimings, TetCenters, DEFINITE_TOLERANCE, MOVE_TOLERANCE,
};
pub use qp::{solve_qp, QpProblem, QpSettings, QpSolution, QpStatus};

//! Dual volumes: center strategies, per-tet operators, global assembly and
//! property checks.

mod assembly;
mod centers;
pub(crate) mod hexahedron;
pub(crate) mod local;
mod report;

pub use assembly::{
    all_local_operators, assemble_laplacian, build_operators, laplacian, mass_matrix, tet_hex_volumes, DualOperators,
};
pub use centers::{compute_centers, CenterSet, CenterStrategy, LocalCenters, INSIDE_TOLERANCE};
pub use hexahedron::{hex_volume, hexahedron, Hexahedron};
pub use local::{divergence_matrix, gradient_matrix, implied_tensor, local_operators, LocalOperators};
pub use report::{property_report, symmetric_part_spectrum, PropertyReport, SpectrumSummary, KERNEL_TOLERANCE};

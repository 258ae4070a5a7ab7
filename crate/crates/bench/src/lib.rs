//! Benchmark inputs shared by the criterion targets.

use dualvol::mesh::{make_grid, perturb};
use dualvol::TetMesh;

/// A jittered grid of `n` unit cubes per side, the standard non-Delaunay benchmark input.
pub fn jittered_grid(n: usize) -> TetMesh {
    perturb(&make_grid(n, n, n, 1.0, 1), 0.3, 7).expect("small jitter keeps tets valid")
}

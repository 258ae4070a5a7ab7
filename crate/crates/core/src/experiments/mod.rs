//! Experiment harness: grid bias, morph continuity, Dirichlet shells,
//! circumcenter statistics and the bundled fixture meshes.

mod continuity;
mod dirichlet;
mod fixtures;
mod grid;
mod stats;

pub use continuity::{continuity, probe, ContinuityStep, ContinuitySummary};
pub use dirichlet::{dirichlet, DirichletSetup, DirichletSolution};
pub use fixtures::{delaunay_violation, non_delaunay_fixtures, shell_fixtures, twisted_column, Fixture, SHELL_JITTER};
pub use grid::{grid_eigen, GridEigen, GridSetup, MAX_GRID_SIDE};
pub use stats::{mesh_stats, outside_fractions, MeshStats, StatsTimings};

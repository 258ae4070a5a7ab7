use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dualvol::optim::Method;

mod commands;
mod output;

use output::Failure;

/// Dual-volume mass and Laplacian matrices for tetrahedral meshes.
///
/// Exit codes: 0 success, 1 invalid input or degenerate geometry, 2 a
/// verified property failed.
#[derive(Debug, Parser)]
#[command(name = "dualvol", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Record wall-clock stage times in reports.
    #[arg(long, global = true)]
    pub timings: bool,
    /// Lower bound on optimized face-center barycentric weights.
    #[arg(long, global = true, default_value_t = 0.0)]
    pub margin: f64,
    /// Relative tolerance of the center QP.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Assemble L and M for one mesh and report their properties.
    Build(BuildArgs),
    /// Generalized eigenmodes of a tetrahedralized grid and their rotation bias.
    Grid(GridArgs),
    /// Probe mass along a linear morph between two meshes.
    Continuity(ContinuityArgs),
    /// Two-sided Dirichlet problem and the variance on a middle label set.
    Dirichlet(DirichletArgs),
    /// Circumcenter and operator statistics over a directory of meshes.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub centers: Method,
    #[arg(long)]
    pub out_laplacian: PathBuf,
    #[arg(long)]
    pub out_mass: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
    /// Exit 2 when a verified property fails.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long, default_value_t = 0)]
    pub diagonal: u8,
    #[arg(long)]
    pub centers: Method,
    /// Eliminate the base-plane vertices.
    #[arg(long)]
    pub pin_base: bool,
    /// Number of eigenpairs to write.
    #[arg(long, default_value_t = 4)]
    pub eigen: usize,
    /// Writes PREFIX_eigenvectors.csv and PREFIX_summary.json.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ContinuityArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub mesh_end: PathBuf,
    #[arg(long)]
    pub steps: usize,
    #[arg(long)]
    pub centers: Method,
    #[arg(long)]
    pub out: PathBuf,
    /// Summary JSON path; printed to standard output when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DirichletArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub inner_label: i32,
    #[arg(long)]
    pub outer_label: i32,
    #[arg(long)]
    pub mid_label: i32,
    #[arg(long, default_value_t = 1.0)]
    pub inner_value: f64,
    #[arg(long, default_value_t = 0.0)]
    pub outer_value: f64,
    #[arg(long)]
    pub centers: Method,
    #[arg(long)]
    pub out: PathBuf,
    /// Summary JSON path; printed to standard output when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub mesh_dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Summary JSON path; printed to standard output when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DUALVOL_LOG", "error"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Property(msg)) => {
            eprintln!("property check failed: {msg}");
            ExitCode::from(2)
        }
    }
}

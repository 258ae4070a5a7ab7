use std::path::{Path, PathBuf};

use dualvol::dual::{build_operators, compute_centers, property_report, CenterStrategy, PropertyReport};
use dualvol::experiments::{
    continuity, dirichlet, grid_eigen, mesh_stats, DirichletSetup, GridSetup, MeshStats, MAX_GRID_SIDE,
};
use dualvol::linalg::write_matrix_market;
use dualvol::mesh::Connectivity;
use dualvol::optim::{Method, OptimizationReport, OptimizeOptions, QpSettings, DEFINITE_TOLERANCE};
use serde::Serialize;

use crate::output::{check_output, csv_rows, json, read_mesh, Artifacts, Failure, Outcome};
use crate::{BuildArgs, Cli, Command, Common, ContinuityArgs, DirichletArgs, GridArgs, StatsArgs};

/// Relative tolerance of the symmetry and semi-definiteness checks behind
/// `--strict`.
pub const PROPERTY_TOLERANCE: f64 = 1e-8;

/// Face centers within this times the mean edge length of the face
/// circumcenters count as coincident.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-6;

pub fn run(cli: &Cli) -> Outcome {
    let options = validate_common(&cli.common)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.common.threads)
        .build_global()
        .map_err(|e| Failure::Input(e.to_string()))?;
    match &cli.command {
        Command::Build(a) => build(a, &options),
        Command::Grid(a) => grid(a, &options),
        Command::Continuity(a) => run_continuity(a, &options),
        Command::Dirichlet(a) => run_dirichlet(a, &options),
        Command::Stats(a) => stats(a, &options),
    }
}

fn validate_common(c: &Common) -> Outcome<OptimizeOptions> {
    if c.threads == 0 {
        return Err(Failure::Input("--threads must be at least 1".into()));
    }
    if !(0.0..1.0 / 3.0).contains(&c.margin) {
        return Err(Failure::Input(format!("--margin {} outside [0, 1/3)", c.margin)));
    }
    if !(c.tol > 0.0 && c.tol < 1.0) {
        return Err(Failure::Input(format!("--tol {} outside (0, 1)", c.tol)));
    }
    Ok(OptimizeOptions {
        margin: c.margin,
        qp: QpSettings {
            tol: c.tol,
            ..Default::default()
        },
        timings: c.timings,
        ..Default::default()
    })
}

fn check_outputs(paths: &[&Path]) -> Outcome {
    for (k, p) in paths.iter().enumerate() {
        check_output(p)?;
        if paths[..k].contains(p) {
            return Err(Failure::Input(format!("output {} given twice", p.display())));
        }
    }
    Ok(())
}

fn emit_summary(artifacts: &mut Artifacts, path: Option<&PathBuf>, value: &impl Serialize) -> Outcome<Option<String>> {
    match path {
        Some(p) => {
            artifacts.push_json(p, value)?;
            Ok(None)
        }
        None => Ok(Some(json(value)?)),
    }
}

fn finish(artifacts: Artifacts, stdout: Option<String>) -> Outcome {
    artifacts.write()?;
    if let Some(s) = stdout {
        print!("{s}");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BuildReport {
    mesh: String,
    centers: Method,
    num_vertices: usize,
    num_tets: usize,
    total_volume: f64,
    mass_trace: f64,
    negative_mass_entries: usize,
    /// Largest distance from a face center to the face circumcenter, relative
    /// to the mean edge length.
    max_face_circumcenter_offset: f64,
    coincides_with_circumcentric: bool,
    properties: PropertyReport,
    failed_checks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimization: Option<OptimizationReport>,
}

fn build(a: &BuildArgs, options: &OptimizeOptions) -> Outcome {
    check_outputs(&[&a.out_laplacian, &a.out_mass, &a.report])?;
    let mesh = read_mesh(&a.mesh)?;
    let conn = Connectivity::new(&mesh)?;
    let (centers, optimization) = a.centers.centers(&mesh, &conn, options)?;
    let ops = build_operators(&mesh, &conn, &centers)?;
    let properties = property_report(&mesh, &ops.laplacian, &ops.mass)?;

    let circ = compute_centers(&mesh, &conn, &CenterStrategy::Circumcentric)?;
    let h = mesh.mean_edge_length();
    let offset = centers
        .face_centers
        .iter()
        .zip(&circ.face_centers)
        .map(|(c, o)| (c - o).norm() / h)
        .fold(0.0, f64::max);

    let mass = ops.mass.diagonal();
    let mut failed_checks = Vec::new();
    if properties.symmetry_residual > PROPERTY_TOLERANCE {
        failed_checks.push(format!("symmetry residual {:e}", properties.symmetry_residual));
    }
    if properties.is_psd(PROPERTY_TOLERANCE) == Some(false) {
        let lmin = properties.spectrum.as_ref().map_or(f64::NAN, |s| s.lambda_min);
        failed_checks.push(format!("indefinite Dirichlet energy, lambda_min {lmin:e}"));
    }
    if properties.nonpositive_mass > 0 {
        failed_checks.push(format!("{} non-positive mass entries", properties.nonpositive_mass));
    }
    if let Some(d) = optimization.as_ref().and_then(|r| r.definite.as_ref()) {
        if !d.pass {
            failed_checks.push(format!(
                "implied tensor of tet {} indefinite, ratio {:e} below -{DEFINITE_TOLERANCE:e}",
                d.worst_tet, d.worst_ratio
            ));
        }
    }
    let report = BuildReport {
        mesh: a.mesh.display().to_string(),
        centers: a.centers,
        num_vertices: mesh.num_vertices(),
        num_tets: mesh.num_tets(),
        total_volume: mesh.total_volume(),
        mass_trace: mass.iter().sum(),
        negative_mass_entries: mass.iter().filter(|&&m| m < 0.0).count(),
        max_face_circumcenter_offset: offset,
        coincides_with_circumcentric: offset <= COINCIDENCE_TOLERANCE,
        properties,
        failed_checks,
        optimization,
    };

    let mut artifacts = Artifacts::default();
    artifacts.push(&a.out_laplacian, write_matrix_market(&ops.laplacian));
    artifacts.push(&a.out_mass, write_matrix_market(&ops.mass));
    artifacts.push_json(&a.report, &report)?;
    artifacts.write()?;
    if a.strict && !report.failed_checks.is_empty() {
        return Err(Failure::Property(report.failed_checks.join("; ")));
    }
    for c in &report.failed_checks {
        log::warn!("{c}");
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct GridSummary<'a> {
    setup: &'a GridSetup,
    eigenvalues: &'a [f64],
    residuals: &'a [f64],
    bias_mode: usize,
    bias_metric: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimization: Option<&'a OptimizationReport>,
}

fn prefixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn grid(a: &GridArgs, options: &OptimizeOptions) -> Outcome {
    if a.n == 0 || a.n > MAX_GRID_SIDE {
        return Err(Failure::Input(format!("--n {} outside 1..={MAX_GRID_SIDE}", a.n)));
    }
    if a.eigen == 0 {
        return Err(Failure::Input("--eigen must be at least 1".into()));
    }
    let vectors_path = prefixed(&a.out, "_eigenvectors.csv");
    let summary_path = prefixed(&a.out, "_summary.json");
    check_outputs(&[&vectors_path, &summary_path])?;
    let setup = GridSetup {
        n: a.n,
        h: a.h,
        diagonal: a.diagonal,
        method: a.centers,
        pin_base: a.pin_base,
        eigen_count: a.eigen,
    };
    let g = grid_eigen(&setup, options)?;

    let count = g.values.len();
    let mut header: Vec<String> = ["i", "j", "k"].map(String::from).to_vec();
    header.extend((0..count).map(|c| format!("mode_{c}")));
    let rows: Vec<(usize, usize, usize, Vec<f64>)> = g
        .free
        .iter()
        .enumerate()
        .map(|(r, &[i, j, k])| (i, j, k, g.vectors.row(r).iter().copied().collect()))
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();

    let summary = GridSummary {
        setup: &setup,
        eigenvalues: &g.values,
        residuals: &g.residuals,
        bias_mode: g.bias_mode,
        bias_metric: g.bias_metric,
        optimization: g.optimization.as_ref(),
    };
    let mut artifacts = Artifacts::default();
    artifacts.push(&vectors_path, csv_rows(&header, &rows)?);
    artifacts.push_json(&summary_path, &summary)?;
    artifacts.write()
}

fn run_continuity(a: &ContinuityArgs, options: &OptimizeOptions) -> Outcome {
    if a.steps == 0 {
        return Err(Failure::Input("--steps must be at least 1".into()));
    }
    let mut outs = vec![a.out.as_path()];
    outs.extend(a.summary.as_deref());
    check_outputs(&outs)?;
    let start = read_mesh(&a.mesh)?;
    let end = read_mesh(&a.mesh_end)?;
    let (rows, summary) = continuity(&start, &end, a.steps, a.centers, options)?;
    let mut artifacts = Artifacts::default();
    artifacts.push(
        &a.out,
        csv_rows(&["step", "t", "energy", "energy_jump", "mass_rate"], &rows)?,
    );
    let stdout = emit_summary(&mut artifacts, a.summary.as_ref(), &summary)?;
    finish(artifacts, stdout)
}

#[derive(Debug, Serialize)]
struct DirichletSummary {
    mesh: String,
    centers: Method,
    setup: DirichletSetup,
    mid_count: usize,
    mid_mean: f64,
    mid_variance: f64,
}

fn run_dirichlet(a: &DirichletArgs, options: &OptimizeOptions) -> Outcome {
    let mut outs = vec![a.out.as_path()];
    outs.extend(a.summary.as_deref());
    check_outputs(&outs)?;
    let setup = DirichletSetup {
        inner_label: a.inner_label,
        outer_label: a.outer_label,
        mid_label: a.mid_label,
        inner_value: a.inner_value,
        outer_value: a.outer_value,
    };
    if !(setup.inner_value.is_finite() && setup.outer_value.is_finite()) {
        return Err(Failure::Input("boundary values must be finite".into()));
    }
    let mesh = read_mesh(&a.mesh)?;
    let conn = Connectivity::new(&mesh)?;
    let (centers, _) = a.centers.centers(&mesh, &conn, options)?;
    let l = build_operators(&mesh, &conn, &centers)?.laplacian;
    let sol = dirichlet(&mesh, &l, &setup)?;
    let rows: Vec<(usize, i32, f64)> = sol
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| (i, mesh.labels()[i], v))
        .collect();
    let summary = DirichletSummary {
        mesh: a.mesh.display().to_string(),
        centers: a.centers,
        setup,
        mid_count: sol.mid_count,
        mid_mean: sol.mid_mean,
        mid_variance: sol.mid_variance,
    };
    let mut artifacts = Artifacts::default();
    artifacts.push(&a.out, csv_rows(&["vertex", "label", "value"], &rows)?);
    let stdout = emit_summary(&mut artifacts, a.summary.as_ref(), &summary)?;
    finish(artifacts, stdout)
}

#[derive(Debug, Default, Serialize)]
struct StatsRow {
    file: String,
    vertices: Option<usize>,
    tets: Option<usize>,
    face_outside_fraction: Option<f64>,
    tet_outside_fraction: Option<f64>,
    circumcentric_negative_mass: Option<usize>,
    alexa_symmetry_residual: Option<f64>,
    optimized_definite: Option<bool>,
    error: Option<String>,
    seconds_connectivity: Option<f64>,
    seconds_circumcentric: Option<f64>,
    seconds_alexa: Option<f64>,
    seconds_qp_assemble: Option<f64>,
    seconds_qp_solve: Option<f64>,
    seconds_tet_centers: Option<f64>,
    seconds_verify: Option<f64>,
}

const STATS_HEADER: [&str; 16] = [
    "file",
    "vertices",
    "tets",
    "face_outside_fraction",
    "tet_outside_fraction",
    "circumcentric_negative_mass",
    "alexa_symmetry_residual",
    "optimized_definite",
    "error",
    "seconds_connectivity",
    "seconds_circumcentric",
    "seconds_alexa",
    "seconds_qp_assemble",
    "seconds_qp_solve",
    "seconds_tet_centers",
    "seconds_verify",
];

impl StatsRow {
    fn from_stats(file: String, s: MeshStats) -> Self {
        let t = s.timings.as_ref();
        Self {
            file,
            vertices: Some(s.vertices),
            tets: Some(s.tets),
            face_outside_fraction: Some(s.face_outside_fraction),
            tet_outside_fraction: Some(s.tet_outside_fraction),
            circumcentric_negative_mass: Some(s.circumcentric_negative_mass),
            alexa_symmetry_residual: Some(s.alexa_symmetry_residual),
            optimized_definite: s.optimized_definite,
            error: s.optimized_error,
            seconds_connectivity: t.map(|t| t.connectivity),
            seconds_circumcentric: t.map(|t| t.circumcentric),
            seconds_alexa: t.map(|t| t.alexa),
            seconds_qp_assemble: t.map(|t| t.optimized.assemble),
            seconds_qp_solve: t.map(|t| t.optimized.solve),
            seconds_tet_centers: t.map(|t| t.optimized.tet_centers),
            seconds_verify: t.map(|t| t.optimized.verify),
        }
    }
}

#[derive(Debug, Serialize)]
struct StatsSummary {
    meshes: usize,
    failed: usize,
    with_negative_mass: usize,
    fraction_with_negative_mass: f64,
    mean_face_outside_fraction: f64,
    mean_tet_outside_fraction: f64,
    optimized_pass: usize,
    optimized_fail: usize,
}

fn stats(a: &StatsArgs, options: &OptimizeOptions) -> Outcome {
    let mut outs = vec![a.out.as_path()];
    outs.extend(a.summary.as_deref());
    check_outputs(&outs)?;
    let entries =
        std::fs::read_dir(&a.mesh_dir).map_err(|e| Failure::Input(format!("{}: {e}", a.mesh_dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "mesh"))
        .collect();
    files.sort();

    let mut rows = Vec::with_capacity(files.len());
    for path in &files {
        let name = path
            .file_name()
            .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
        let result = read_mesh(path).and_then(|m| mesh_stats(&m, options).map_err(Failure::from));
        match result {
            Ok(s) => rows.push(StatsRow::from_stats(name, s)),
            Err(Failure::Input(msg) | Failure::Property(msg)) => {
                log::error!("{msg}");
                rows.push(StatsRow {
                    file: name,
                    error: Some(msg),
                    ..Default::default()
                });
            }
        }
    }

    let ok: Vec<&StatsRow> = rows.iter().filter(|r| r.vertices.is_some()).collect();
    let mean = |f: fn(&StatsRow) -> Option<f64>| {
        if ok.is_empty() {
            0.0
        } else {
            ok.iter().filter_map(|r| f(r)).sum::<f64>() / ok.len() as f64
        }
    };
    let with_negative_mass = ok.iter().filter(|r| r.circumcentric_negative_mass > Some(0)).count();
    let summary = StatsSummary {
        meshes: rows.len(),
        failed: rows.len() - ok.len(),
        with_negative_mass,
        fraction_with_negative_mass: if ok.is_empty() {
            0.0
        } else {
            with_negative_mass as f64 / ok.len() as f64
        },
        mean_face_outside_fraction: mean(|r| r.face_outside_fraction),
        mean_tet_outside_fraction: mean(|r| r.tet_outside_fraction),
        optimized_pass: ok.iter().filter(|r| r.optimized_definite == Some(true)).count(),
        optimized_fail: ok.iter().filter(|r| r.optimized_definite != Some(true)).count(),
    };
    let mut artifacts = Artifacts::default();
    artifacts.push(&a.out, csv_rows(&STATS_HEADER, &rows)?);
    let stdout = emit_summary(&mut artifacts, a.summary.as_ref(), &summary)?;
    finish(artifacts, stdout)
}

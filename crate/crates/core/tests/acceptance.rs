//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use dualvol::dual::{
    build_operators, compute_centers, implied_tensor, symmetric_part_spectrum, CenterStrategy, DualOperators,
};
use dualvol::experiments::{continuity, dirichlet, grid_eigen, DirichletSetup, GridSetup};
use dualvol::linalg::SparseMatrix;
use dualvol::mesh::{make_grid, perturb, read_medit, Connectivity, TetMesh, Vec3};
use dualvol::optim::{
    assemble_center_qp, solve_qp, Method, OptimizationReport, OptimizeOptions, QpProblem, QpSettings, QpStatus,
    SymmetryRows,
};
use nalgebra::{DMatrix, DVector, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Evaluated {
    ops: DualOperators,
    report: Option<OptimizationReport>,
}

struct Case {
    name: String,
    mesh: TetMesh,
    conn: Connectivity,
    methods: BTreeMap<&'static str, Evaluated>,
}

impl Case {
    fn load(kind: &str, name: &str) -> Case {
        let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("data")
            .join(kind)
            .join(name);
        let mesh = read_medit(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let conn = Connectivity::new(&mesh).unwrap();
        Case {
            name: name.trim_end_matches(".mesh").to_string(),
            mesh,
            conn,
            methods: BTreeMap::new(),
        }
    }

    fn evaluate(&mut self, method: Method, options: &OptimizeOptions) -> &Evaluated {
        if !self.methods.contains_key(method.name()) {
            let (centers, report) = method.centers(&self.mesh, &self.conn, options).unwrap();
            let ops = build_operators(&self.mesh, &self.conn, &centers).unwrap();
            self.methods.insert(method.name(), Evaluated { ops, report });
        }
        &self.methods[method.name()]
    }
}

fn bundled(kind: &str) -> Vec<Case> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(kind);
    let mut names: Vec<String> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".mesh"))
        .collect();
    names.sort();
    names.iter().map(|n| Case::load(kind, n)).collect()
}

#[derive(Default)]
struct Outcome {
    results: Vec<(u32, bool)>,
}

impl Outcome {
    fn record(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        let status = if pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} [{status}] {name}: {detail}");
        self.results.push((id, pass));
    }
}

fn symmetry_residual(l: &SparseMatrix) -> f64 {
    l.add(1.0, &l.transpose(), -1.0).frobenius_norm() / l.frobenius_norm()
}

/// Hat-function gradients from the inverse of the `[1 x y z]` vertex matrix.
fn fem_gradients(p: &[Vec3; 4]) -> [Vec3; 4] {
    let m = Matrix4::from_fn(|r, c| if c == 0 { 1.0 } else { p[r][c - 1] });
    let inv = m.try_inverse().unwrap();
    std::array::from_fn(|k| Vec3::new(inv[(1, k)], inv[(2, k)], inv[(3, k)]))
}

fn fem_stiffness(mesh: &TetMesh) -> DMatrix<f64> {
    let n = mesh.num_vertices();
    let mut k = DMatrix::zeros(n, n);
    for (t, tet) in mesh.tets().iter().enumerate() {
        let p = mesh.tet_points(t);
        let g = fem_gradients(&p);
        let v = mesh.tet_volume(t);
        for a in 0..4 {
            for b in 0..4 {
                k[(tet[a], tet[b])] -= v * g[a].dot(&g[b]);
            }
        }
    }
    k
}

fn random_grids() -> Vec<TetMesh> {
    (0..25u64)
        .map(|k| {
            let nx = 3 + (k % 3) as usize;
            let ny = 3 + (k / 3 % 3) as usize;
            let nz = 3 + (k / 9 % 2) as usize;
            perturb(&make_grid(nx, ny, nz, 1.0, (k % 4) as u8), 0.25, 100 + k).unwrap()
        })
        .collect()
}

fn criterion_1_2(out: &mut Outcome) {
    let clock = Instant::now();
    let meshes = random_grids();
    let mut worst_l: f64 = 0.0;
    let mut worst_a: f64 = 0.0;
    let mut max_vertices = 0;
    for mesh in &meshes {
        max_vertices = max_vertices.max(mesh.num_vertices());
        let conn = Connectivity::new(mesh).unwrap();
        let c = compute_centers(mesh, &conn, &CenterStrategy::Barycentric).unwrap();
        let ops = build_operators(mesh, &conn, &c).unwrap();
        let fem = fem_stiffness(mesh);
        let dense = ops.laplacian.to_dense();
        let scale = fem.amax();
        worst_l = worst_l.max((dense - &fem).amax() / scale);
        for (t, local) in ops.locals.iter().enumerate() {
            let v = mesh.tet_volume(t);
            let a = implied_tensor(&mesh.tet_points(t), &local.d).unwrap();
            worst_a = worst_a.max((a - nalgebra::Matrix3::identity() * v).amax() / v);
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    out.record(
        1,
        "FEM equivalence",
        worst_l <= 1e-10 && secs < 5.0 && max_vertices <= 500,
        format!(
            "max |L - K_fem| / max|K_fem| = {worst_l:.2e} (tol 1e-10) over {} meshes of <= {max_vertices} vertices in {secs:.2} s (limit 5 s)",
            meshes.len()
        ),
    );
    out.record(
        2,
        "implied tensor",
        worst_a <= 1e-12,
        format!("max |A_t - V_t I| / V_t = {worst_a:.2e} (tol 1e-12)"),
    );
}

fn grid_vertex(n: usize, i: usize, j: usize, k: usize) -> usize {
    i + (n + 1) * (j + (n + 1) * k)
}

fn criterion_3(out: &mut Outcome) {
    let n = 4;
    let mut worst_stencil: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    let mut rows = 0;
    for d in 0..4u8 {
        let mesh = make_grid(n, n, n, 1.0, d);
        let conn = Connectivity::new(&mesh).unwrap();
        let c = compute_centers(&mesh, &conn, &CenterStrategy::Circumcentric).unwrap();
        let ops = build_operators(&mesh, &conn, &c).unwrap();
        let mass = ops.mass.diagonal();
        for k in 1..n {
            for j in 1..n {
                for i in 1..n {
                    let v = grid_vertex(n, i, j, k);
                    let neighbours = [
                        grid_vertex(n, i - 1, j, k),
                        grid_vertex(n, i + 1, j, k),
                        grid_vertex(n, i, j - 1, k),
                        grid_vertex(n, i, j + 1, k),
                        grid_vertex(n, i, j, k - 1),
                        grid_vertex(n, i, j, k + 1),
                    ];
                    let (cols, vals) = ops.laplacian.row(v);
                    for (&c, &x) in cols.iter().zip(vals) {
                        let want = if c == v {
                            -6.0
                        } else if neighbours.contains(&c) {
                            1.0
                        } else {
                            0.0
                        };
                        worst_stencil = worst_stencil.max((x - want).abs());
                    }
                    for nb in neighbours {
                        if !cols.contains(&nb) {
                            worst_stencil = worst_stencil.max(1.0);
                        }
                    }
                    worst_mass = worst_mass.max((mass[v] - 1.0).abs());
                    rows += 1;
                }
            }
        }
    }
    out.record(
        3,
        "finite-difference grid",
        worst_stencil <= 1e-10 && worst_mass <= 1e-10,
        format!(
            "{rows} interior rows over 4 diagonals: stencil deviation {worst_stencil:.2e}, mass deviation {worst_mass:.2e} (tol 1e-10)"
        ),
    );
}

fn criterion_4(out: &mut Outcome) {
    let n = 4;
    let options = OptimizeOptions::default();
    let mut center_dev: f64 = 0.0;
    let mut bias = BTreeMap::new();
    for d in 0..4u8 {
        let mesh = make_grid(n, n, n, 1.0, d);
        let conn = Connectivity::new(&mesh).unwrap();
        let (opt, _) = Method::Optimized.centers(&mesh, &conn, &options).unwrap();
        let circ = compute_centers(&mesh, &conn, &CenterStrategy::Circumcentric).unwrap();
        for (a, b) in opt.face_centers.iter().zip(&circ.face_centers) {
            center_dev = center_dev.max((a - b).norm());
        }
        for method in [Method::Optimized, Method::Circumcentric, Method::Barycentric] {
            let setup = GridSetup {
                n,
                h: 1.0,
                diagonal: d,
                method,
                pin_base: true,
                eigen_count: 1,
            };
            let b = grid_eigen(&setup, &options).unwrap().bias_metric;
            let e = bias.entry(method.name()).or_insert((f64::INFINITY, 0.0f64));
            e.0 = e.0.min(b);
            e.1 = e.1.max(b);
        }
    }
    let (_, opt_max) = bias["optimized"];
    let (_, circ_max) = bias["circumcentric"];
    let (bary_min, _) = bias["barycentric"];
    out.record(
        4,
        "grid coincidence",
        center_dev <= 1e-6 && opt_max <= 1e-6 && circ_max <= 1e-6 && bary_min > 1e-2,
        format!(
            "face center deviation {center_dev:.2e} (tol 1e-6); bias optimized {opt_max:.2e}, circumcentric {circ_max:.2e} (tol 1e-6), barycentric min {bary_min:.2e} (> 1e-2), all 4 diagonals"
        ),
    );
}

fn criterion_5(out: &mut Outcome, fixtures: &mut [Case], options: &OptimizeOptions) {
    let clock = Instant::now();
    let mut failures = Vec::new();
    let mut worst_sym: f64 = 0.0;
    let mut worst_psd: f64 = f64::INFINITY;
    let mut worst_l2: f64 = f64::INFINITY;
    let mut worst_mass: f64 = f64::INFINITY;
    let mut worst_definite: f64 = f64::INFINITY;
    for case in fixtures.iter_mut() {
        let e = case.evaluate(Method::Optimized, options);
        let sym = symmetry_residual(&e.ops.laplacian);
        let s = symmetric_part_spectrum(&e.ops.laplacian).unwrap();
        let mass = e.ops.mass.diagonal().iter().copied().fold(f64::INFINITY, f64::min);
        let def = e.report.as_ref().and_then(|r| r.definite.clone()).unwrap();
        worst_sym = worst_sym.max(sym);
        worst_psd = worst_psd.min(s.lambda_min / s.lambda_max);
        worst_l2 = worst_l2.min(s.lambda_second);
        worst_mass = worst_mass.min(mass);
        worst_definite = worst_definite.min(def.worst_ratio);
        let ok = sym <= 1e-8 && s.lambda_min >= -1e-8 * s.lambda_max && s.lambda_second > 0.0 && mass > 0.0 && def.pass;
        if !ok {
            failures.push(case.name.clone());
        }
    }
    let secs = clock.elapsed().as_secs_f64();
    out.record(
        5,
        "optimized guarantees",
        failures.is_empty() && fixtures.len() >= 10 && secs < 600.0,
        format!(
            "{} fixtures in {secs:.1} s: max sym {worst_sym:.2e} (tol 1e-8), min lambda_min/lambda_max {worst_psd:.2e} (>= -1e-8), min lambda_2 {worst_l2:.2e} (> 0), min M_ii {worst_mass:.2e} (> 0), min tensor ratio {worst_definite:.2e}; failing {failures:?}",
            fixtures.len()
        ),
    );
}

/// A face with an angle above 90 degrees.
fn has_obtuse_face(mesh: &TetMesh, conn: &Connectivity) -> bool {
    let v = mesh.vertices();
    conn.faces.faces.iter().any(|f| {
        (0..3).any(|k| {
            let (a, b, c) = (v[f[k]], v[f[(k + 1) % 3]], v[f[(k + 2) % 3]]);
            (b - a).dot(&(c - a)) < 0.0
        })
    })
}

fn criterion_6(out: &mut Outcome, fixtures: &mut [Case], options: &OptimizeOptions) {
    let mut negative_mass = Vec::new();
    let mut min_alexa_sym = f64::INFINITY;
    let mut obtuse = 0;
    let mut alexa_sym_fail = Vec::new();
    let mut indefinite = Vec::new();
    for case in fixtures.iter_mut() {
        let circ = case.evaluate(Method::Circumcentric, options);
        let neg = circ.ops.mass.diagonal().iter().filter(|&&m| m < 0.0).count();
        if neg > 0 {
            negative_mass.push(format!("{}:{neg}", case.name));
        }
        let is_obtuse = has_obtuse_face(&case.mesh, &case.conn);
        let name = case.name.clone();
        let alexa = case.evaluate(Method::Alexa, options);
        let sym = symmetry_residual(&alexa.ops.laplacian);
        if is_obtuse {
            obtuse += 1;
            min_alexa_sym = min_alexa_sym.min(sym);
            if sym <= 1e-3 {
                alexa_sym_fail.push(name.clone());
            }
        }
        let s = symmetric_part_spectrum(&alexa.ops.laplacian).unwrap();
        if s.lambda_min < 0.0 && s.lambda_min.abs() > 1e-8 * s.lambda_max {
            indefinite.push(format!("{name}:{:.2e}", s.lambda_min / s.lambda_max));
        }
    }
    out.record(
        6,
        "failure reproduction",
        !negative_mass.is_empty() && alexa_sym_fail.is_empty() && !indefinite.is_empty(),
        format!(
            "circumcentric negative M_ii on {negative_mass:?}; alexa min sym {min_alexa_sym:.2e} over {obtuse} obtuse fixtures (> 1e-3, failing {alexa_sym_fail:?}); alexa lambda_min/lambda_max < 0 on {indefinite:?}"
        ),
    );
}

fn criterion_7(out: &mut Outcome) {
    let start = make_grid(3, 3, 3, 1.0, 0);
    let end = perturb(&start, 0.3, 1).unwrap();
    let options = OptimizeOptions::default();
    let jumps = |method: Method| -> Vec<f64> {
        [50, 100, 200]
            .iter()
            .map(|&t| continuity(&start, &end, t, method, &options).unwrap().1.max_energy_jump)
            .collect()
    };
    let opt = jumps(Method::Optimized);
    let alexa = jumps(Method::Alexa);
    let ratios = [opt[0] / opt[1], opt[1] / opt[2]];
    // the floor is fixed by the coarsest sweep
    let floor = 0.5 * alexa[0];
    let pass = ratios.iter().all(|&r| r >= 1.8) && alexa.iter().all(|&j| j >= floor) && floor > 0.0;
    out.record(
        7,
        "continuity",
        pass,
        format!(
            "optimized max jump {:.3e}/{:.3e}/{:.3e} at T=50/100/200, ratios {:.3}, {:.3} (>= 1.8); alexa {:.3e}/{:.3e}/{:.3e} (>= {floor:.3e})",
            opt[0], opt[1], opt[2], ratios[0], ratios[1], alexa[0], alexa[1], alexa[2]
        ),
    );
}

fn criterion_8_9(out: &mut Outcome, fixtures: &mut [Case], shells: &mut [Case], options: &OptimizeOptions) {
    let mut worst_volume: f64 = 0.0;
    let mut worst_linear: f64 = 0.0;
    let mut count = 0;
    for case in fixtures.iter_mut().chain(shells.iter_mut()) {
        let vol = case.mesh.total_volume();
        let diag = case.mesh.bbox_diagonal();
        let boundary = case.conn.faces.boundary_vertices(case.mesh.num_vertices());
        let coords: Vec<Vec<f64>> = (0..3)
            .map(|a| case.mesh.vertices().iter().map(|p| p[a]).collect())
            .collect();
        for method in Method::ALL {
            let e = case.evaluate(method, options);
            let trace: f64 = e.ops.mass.diagonal().iter().sum();
            worst_volume = worst_volume.max((trace - vol).abs() / vol);
            let scale = e.ops.laplacian.inf_norm() * diag;
            for f in &coords {
                let lf = e.ops.laplacian.mul_vec(f);
                for (i, x) in lf.iter().enumerate() {
                    if !boundary[i] {
                        worst_linear = worst_linear.max(x.abs() / scale);
                    }
                }
            }
            count += 1;
        }
    }
    out.record(
        8,
        "volume tiling",
        worst_volume <= 1e-10,
        format!("max |sum M_ii - V| / V = {worst_volume:.2e} (tol 1e-10) over {count} mesh/strategy pairs"),
    );
    out.record(
        9,
        "linear reproduction",
        worst_linear <= 1e-10,
        format!(
            "max interior |L f| / (||L||_inf bbox) = {worst_linear:.2e} (tol 1e-10) over {count} mesh/strategy pairs"
        ),
    );
}

fn criterion_10(out: &mut Outcome, shells: &mut [Case], options: &OptimizeOptions) {
    let order = [
        Method::Circumcentric,
        Method::Optimized,
        Method::Barycentric,
        Method::Alexa,
    ];
    let mut table: Vec<Vec<f64>> = Vec::new();
    for case in shells.iter_mut() {
        let mut row = Vec::new();
        for method in order {
            case.evaluate(method, options);
            let e = &case.methods[method.name()];
            let v = match dirichlet(&case.mesh, &e.ops.laplacian, &DirichletSetup::default()) {
                Ok(s) => s.mid_variance,
                Err(_) => f64::NAN,
            };
            row.push(v);
        }
        table.push(row);
    }
    let ordered = table.iter().all(|r| r.windows(2).all(|w| w[0] <= w[1]));
    let refines = (0..order.len()).all(|k| table[1][k] < table[0][k]);
    let fmt = |r: &Vec<f64>| r.iter().map(|v| format!("{v:.3e}")).collect::<Vec<_>>().join(" <= ");
    out.record(
        10,
        "Dirichlet variance ordering",
        ordered && refines && table.len() == 2,
        format!(
            "circumcentric <= optimized <= barycentric <= alexa: {} [{}], {} [{}]; decreasing with refinement: {refines}",
            shells[0].name,
            fmt(&table[0]),
            shells[1].name,
            fmt(&table[1])
        ),
    );
}

/// Minimizes over every assignment of variables to {free, lower, upper}.
fn brute_force(p: &DMatrix<f64>, q: &[f64], a: &DMatrix<f64>, b: &[f64], l: &[f64], u: &[f64]) -> Option<Vec<f64>> {
    let n = q.len();
    let m = b.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for code in 0..3usize.pow(n as u32) {
        let state: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let fixed: Vec<usize> = (0..n).filter(|&i| state[i] != 0).collect();
        let k = n + m + fixed.len();
        let mut kkt = DMatrix::zeros(k, k);
        let mut rhs = DVector::zeros(k);
        kkt.view_mut((0, 0), (n, n)).copy_from(p);
        for i in 0..n {
            rhs[i] = -q[i];
        }
        for r in 0..m {
            for j in 0..n {
                kkt[(n + r, j)] = a[(r, j)];
                kkt[(j, n + r)] = a[(r, j)];
            }
            rhs[n + r] = b[r];
        }
        for (r, &i) in fixed.iter().enumerate() {
            kkt[(n + m + r, i)] = 1.0;
            kkt[(i, n + m + r)] = 1.0;
            rhs[n + m + r] = if state[i] == 1 { l[i] } else { u[i] };
        }
        let Some(sol) = kkt.clone().lu().solve(&rhs) else {
            continue;
        };
        if (&kkt * &sol - &rhs).amax() > 1e-9 {
            continue;
        }
        let x: Vec<f64> = sol.iter().take(n).copied().collect();
        if !(0..n).all(|i| x[i] >= l[i] - 1e-9 && x[i] <= u[i] + 1e-9) {
            continue;
        }
        let xv = DVector::from_vec(x.clone());
        let obj = 0.5 * xv.dot(&(p * &xv)) + xv.dot(&DVector::from_vec(q.to_vec()));
        if best.as_ref().is_none_or(|(o, _)| obj < *o) {
            best = Some((obj, x));
        }
    }
    best.map(|(_, x)| x)
}

fn criterion_11(out: &mut Outcome, fixtures: &[Case]) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut non_optimal = 0;
    for _ in 0..100 {
        let n = rng.random_range(1..=7usize);
        let m = rng.random_range(0..=2usize.min(n - 1));
        let g = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let p = &g * g.transpose() + DMatrix::identity(n, n) * 0.1;
        let q: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let l: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..0.0)).collect();
        let u: Vec<f64> = (0..n).map(|i| l[i] + rng.random_range(0.2..2.0)).collect();
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let x0 = DVector::from_fn(n, |i, _| l[i] + rng.random_range(0.1..0.9) * (u[i] - l[i]));
        let b: Vec<f64> = (&a * &x0).iter().copied().collect();
        let want = brute_force(&p, &q, &a, &b, &l, &u).expect("interior point is feasible");
        let prob = QpProblem {
            p: SparseMatrix::from_dense(&p),
            q,
            a: SparseMatrix::from_dense(&a),
            b,
            lower: l,
            upper: u,
        };
        let s = solve_qp(&prob, &QpSettings::default()).unwrap();
        if s.status != QpStatus::Optimal {
            non_optimal += 1;
        }
        for (xi, wi) in s.x.iter().zip(&want) {
            worst = worst.max((xi - wi).abs());
        }
    }

    let mut worst_eq: f64 = 0.0;
    let mut worst_bound = f64::INFINITY;
    for case in fixtures {
        for rows in [SymmetryRows::Basis, SymmetryRows::All] {
            let qp = assemble_center_qp(&case.mesh, &case.conn, 0.0, rows).unwrap();
            let x = vec![1.0 / 3.0; qp.problem.num_variables()];
            let ax = qp.problem.a.mul_vec(&x);
            for (r, b) in ax.iter().zip(&qp.problem.b) {
                worst_eq = worst_eq.max((r - b).abs());
            }
            for (xi, li) in x.iter().zip(&qp.problem.lower) {
                worst_bound = worst_bound.min(xi - li);
            }
        }
    }
    out.record(
        11,
        "QP solver correctness",
        worst <= 1e-7 && non_optimal == 0 && worst_eq <= 1e-10 && worst_bound >= 0.0,
        format!(
            "100 random QPs: max deviation from active-set enumeration {worst:.2e} (tol 1e-7), {non_optimal} not optimal; barycenters on {} fixtures: equality residual {worst_eq:.2e} (tol 1e-10), min bound slack {worst_bound:.2e}",
            fixtures.len()
        ),
    );
}

/// Times the optimized pipeline on the largest shell and caches its result.
fn time_largest_shell(shells: &mut [Case]) -> (bool, String) {
    let case = shells.iter_mut().max_by_key(|c| c.mesh.num_tets()).unwrap();
    let options = OptimizeOptions {
        timings: true,
        ..Default::default()
    };
    let clock = Instant::now();
    let (centers, report) = Method::Optimized.centers(&case.mesh, &case.conn, &options).unwrap();
    let secs = clock.elapsed().as_secs_f64();
    let report = report.unwrap();
    let t = report.timings.clone().unwrap();
    let others = [t.assemble, t.tet_centers, t.verify];
    let dominant = others.iter().all(|&s| t.solve > s);
    let ops = build_operators(&case.mesh, &case.conn, &centers).unwrap();
    let detail = format!(
        "{} ({} tets): {secs:.1} s total (limit 1800 s); assemble {:.2} s, QP solve {:.2} s in {} iterations, tet centers {:.2} s, verify {:.2} s; status {:?}",
        case.name,
        case.mesh.num_tets(),
        t.assemble,
        t.solve,
        report.qp_iterations,
        t.tet_centers,
        t.verify,
        report.qp_status
    );
    case.methods.insert(
        Method::Optimized.name(),
        Evaluated {
            ops,
            report: Some(report),
        },
    );
    (secs < 1800.0 && dominant && case.mesh.num_tets() >= 20_000, detail)
}

fn main() {
    // cargo passes harness flags such as --nocapture; a listing request runs nothing
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let options = OptimizeOptions::default();
    let mut fixtures = bundled("fixtures");
    let mut shells = bundled("shells");
    shells.sort_by_key(|c| c.mesh.num_tets());
    let mut out = Outcome::default();

    criterion_1_2(&mut out);
    criterion_3(&mut out);
    criterion_4(&mut out);
    criterion_5(&mut out, &mut fixtures, &options);
    criterion_6(&mut out, &mut fixtures, &options);
    criterion_7(&mut out);
    // the large optimized solve is timed once and reused by 8 to 10
    let (scaling_pass, scaling_detail) = time_largest_shell(&mut shells);
    criterion_8_9(&mut out, &mut fixtures, &mut shells, &options);
    criterion_10(&mut out, &mut shells, &options);
    criterion_11(&mut out, &fixtures);
    out.record(12, "scaling smoke test", scaling_pass, scaling_detail);

    let failed: Vec<u32> = out.results.iter().filter(|(_, p)| !p).map(|(id, _)| *id).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        out.results.len() - failed.len(),
        out.results.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(", failing {failed:?}")
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

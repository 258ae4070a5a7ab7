use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dualvol::dual::build_operators;
use dualvol::linalg::{PivotPolicy, SparseLdl};
use dualvol::mesh::Connectivity;
use dualvol::optim::{assemble_center_qp, solve_qp, Method, OptimizeOptions, QpSettings, SymmetryRows};
use dualvol_bench::jittered_grid;

fn assembly(c: &mut Criterion) {
    let mut group = c.benchmark_group("assembly");
    let options = OptimizeOptions::default();
    for n in [4, 8] {
        let mesh = jittered_grid(n);
        let conn = Connectivity::new(&mesh).unwrap();
        for method in [Method::Barycentric, Method::Circumcentric, Method::Alexa] {
            let (centers, _) = method.centers(&mesh, &conn, &options).unwrap();
            group.bench_with_input(BenchmarkId::new(method.name(), n), &centers, |b, centers| {
                b.iter(|| build_operators(&mesh, &conn, centers).unwrap())
            });
        }
    }
    group.finish();
}

fn center_qp(c: &mut Criterion) {
    let mut group = c.benchmark_group("center_qp");
    group.sample_size(10);
    for n in [3, 5] {
        let mesh = jittered_grid(n);
        let conn = Connectivity::new(&mesh).unwrap();
        let qp = assemble_center_qp(&mesh, &conn, 0.0, SymmetryRows::Basis).unwrap();
        let settings = QpSettings {
            kkt_order: Some(qp.kkt_order.clone()),
            ..Default::default()
        };
        group.bench_with_input(BenchmarkId::new("solve", n), &qp.problem, |b, p| {
            b.iter(|| solve_qp(p, &settings).unwrap())
        });
    }
    group.finish();
}

fn ldl(c: &mut Criterion) {
    let mut group = c.benchmark_group("ldl");
    for n in [6, 10] {
        let mesh = jittered_grid(n);
        let conn = Connectivity::new(&mesh).unwrap();
        let (centers, _) = Method::Barycentric
            .centers(&mesh, &conn, &OptimizeOptions::default())
            .unwrap();
        let l = build_operators(&mesh, &conn, &centers).unwrap().laplacian;
        // a diagonal shift makes -L definite
        let a = l.add(
            -1.0,
            &dualvol::linalg::SparseMatrix::from_diagonal(&vec![1e-3; l.n_rows()]),
            1.0,
        );
        let policy = PivotPolicy::Positive { threshold: 0.0 };
        group.bench_with_input(BenchmarkId::new("factorize", n), &a, |b, a| {
            b.iter(|| SparseLdl::factorize(a, None, policy).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, assembly, center_qp, ldl);
criterion_main!(benches);

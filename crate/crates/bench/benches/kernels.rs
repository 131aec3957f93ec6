use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use gevrey_flow::gevrey::gevrey_norm;
use gevrey_flow::models::rhs;
use gevrey_flow::spectral::bilinear_advect;
use gevrey_flow::ModelKind;
use gevrey_flow_bench::{catalog_state, field_pair};

fn advect(c: &mut Criterion) {
    let mut g = c.benchmark_group("bilinear_advect");
    for (dim, n) in [(2, 32), (2, 64), (3, 16), (3, 32)] {
        let (u, v) = field_pair(dim, n);
        g.bench_with_input(BenchmarkId::new(format!("d{dim}"), n), &(u, v), |b, (u, v)| {
            b.iter(|| bilinear_advect(black_box(u), black_box(v), true).unwrap())
        });
    }
    g.finish();
}

fn model_rhs(c: &mut Criterion) {
    let mut g = c.benchmark_group("rhs");
    for (name, kind) in [
        ("euler", ModelKind::Euler),
        ("sqg", ModelKind::Sqg),
        ("boussinesq", ModelKind::boussinesq(1.0, 2)),
        ("mhd", ModelKind::Mhd { s: 1.0, rho0: 1.0 }),
    ] {
        let state = catalog_state(kind, 2, 32);
        g.bench_function(name, |b| b.iter(|| rhs(black_box(&state)).unwrap()));
    }
    g.finish();
}

fn norms(c: &mut Criterion) {
    let (u, _) = field_pair(3, 32);
    c.bench_function("gevrey_norm/d3/32", |b| b.iter(|| gevrey_norm(black_box(&u), 2.5, 0.5).unwrap()));
}

criterion_group!(benches, advect, model_rhs, norms);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use strauss_bench::{ansatz_near_optimum, three_podal};
use strauss_core::closed_forms::{f_coefficient, sym21_entropy, sym21_triangle};
use strauss_core::graphon::{graphon_entropy, riemann_oracle, triangle_density};

fn functionals(c: &mut Criterion) {
    let g = three_podal();
    c.bench_function("triangle_density/3-podal", |b| {
        b.iter(|| triangle_density(black_box(&g)))
    });
    c.bench_function("graphon_entropy/3-podal", |b| {
        b.iter(|| graphon_entropy(black_box(&g)))
    });

    let p = ansatz_near_optimum().as_sym21();
    c.bench_function("sym21_triangle", |b| {
        b.iter(|| sym21_triangle(black_box(&p)))
    });
    c.bench_function("sym21_entropy", |b| b.iter(|| sym21_entropy(black_box(&p))));
    c.bench_function("f_coefficient", |b| {
        b.iter(|| f_coefficient(black_box(0.1), black_box(0.103), black_box(0.0333)))
    });

    let mut group = c.benchmark_group("riemann_oracle");
    for n in [100, 400, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| riemann_oracle(&g, n))
        });
    }
    group.finish();
}

criterion_group!(benches, functionals);
criterion_main!(benches);

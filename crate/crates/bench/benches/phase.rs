use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use strauss_bench::ansatz_near_optimum;
use strauss_core::optimizer::SweepRange;
use strauss_core::phase::{best_tripodal, delta_max, fm_curve, maximize_f_at, DMode};
use strauss_core::NewtonOptions;

fn phase(c: &mut Criterion) {
    let opts = NewtonOptions::default();
    let seed = ansatz_near_optimum().as_sym21();
    c.bench_function("maximize_f_at/0.1", |b| {
        b.iter(|| maximize_f_at(black_box(0.1), None, &opts))
    });
    for mode in [DMode::Ansatz, DMode::FreeD] {
        c.bench_function(&format!("best_tripodal/{mode}"), |b| {
            b.iter(|| best_tripodal(0.1, black_box(0.003), mode, &seed, &opts))
        });
        c.bench_function(&format!("delta_max/{mode}"), |b| {
            b.iter(|| delta_max(black_box(0.1), mode, None, &opts))
        });
    }
    let range = SweepRange::new(0.1, 0.12, 0.001).unwrap();
    c.bench_function("fm_curve/21 rows", |b| {
        b.iter(|| fm_curve(black_box(range), &opts))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = phase
}
criterion_main!(benches);

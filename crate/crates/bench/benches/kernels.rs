use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use hopfion::energy::{energy_and_gradient_with, energy_with, Stencil};
use hopfion::topology::{compute_h, solve_potential, trace_preimage, TraceParams, SOUTH_POLE};
use hopfion_bench::hopfion;

fn energy(c: &mut Criterion) {
    let n = hopfion(32);
    let mut g = c.benchmark_group("energy_32");
    for stencil in [Stencil::Central, Stencil::Compact, Stencil::Improved] {
        let label = format!("{stencil:?}");
        g.bench_with_input(BenchmarkId::new("energy", &label), &stencil, |b, s| {
            b.iter(|| energy_with(black_box(&n), 1.0, 1.0, *s))
        });
        g.bench_with_input(BenchmarkId::new("energy_and_gradient", &label), &stencil, |b, s| {
            b.iter(|| energy_and_gradient_with(black_box(&n), 1.0, 1.0, *s))
        });
    }
    g.finish();
}

fn topology(c: &mut Criterion) {
    let n = hopfion(32);
    let h = compute_h(&n);
    let mut g = c.benchmark_group("topology_32");
    g.sample_size(20);
    g.bench_function("compute_h", |b| b.iter(|| compute_h(black_box(&n))));
    g.bench_function("spectral_potential", |b| b.iter(|| solve_potential(black_box(&h)).unwrap()));
    let params = TraceParams::for_grid(&n.grid);
    g.bench_function("trace_south_pole", |b| b.iter(|| trace_preimage(black_box(&h), SOUTH_POLE, &params).unwrap()));
    g.finish();
}

criterion_group!(benches, energy, topology);
criterion_main!(benches);

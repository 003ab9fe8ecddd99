use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use msnls_bench::{config, window};
use msnls_core::scheme::{mi, wang};
use msnls_core::{Complex64, MiScheme, TwoStepScheme, WangScheme};

fn cyclic_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("cyclic_solve");
    for k in [256usize, 1024, 4096] {
        let (p, g, _) = window("plane_beta2", k, 0.01);
        let factor = mi::assemble_linear(&p.params, &g).factor().unwrap();
        let rhs: Vec<Complex64> = (0..k)
            .map(|i| Complex64::new((i as f64).sin(), 1.0))
            .collect();
        group.throughput(Throughput::Elements(k as u64));
        group.bench_with_input(BenchmarkId::from_parameter(k), &rhs, |b, rhs| {
            b.iter(|| factor.solve(black_box(rhs)).unwrap())
        });
    }
    group.finish();
}

fn steps(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for k in [256usize, 1024] {
        let (p, g, w) = window("plane_beta2", k, 0.01);
        let midpoint = MiScheme::new(p.params, g, config()).unwrap();
        let energy = WangScheme::new(p.params, g, config()).unwrap();
        group.throughput(Throughput::Elements(k as u64));
        group.bench_with_input(BenchmarkId::new("midpoint", k), &w, |b, w| {
            b.iter(|| midpoint.step(black_box(w)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("energy_preserving", k), &w, |b, w| {
            b.iter(|| energy.step(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn residual(c: &mut Criterion) {
    let (p, g, w) = window("plane_beta2", 1024, 0.01);
    c.bench_function("mi_residual_1024", |b| {
        b.iter(|| {
            mi::scheme_residual(&w.u_prev, &w.u_cur, black_box(&w.u_cur), &p.params, &g).unwrap()
        })
    });
    c.bench_function("wang_residual_1024", |b| {
        b.iter(|| {
            wang::scheme_residual(&w.u_prev, &w.u_cur, black_box(&w.u_cur), &p.params, &g).unwrap()
        })
    });
}

criterion_group!(benches, cyclic_solve, steps, residual);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use henstock_ode::{fixtures, theorem_bound, SurrogateSolution};
use henstock_ode_bench::{reference_sweep, solve_and_sample};

fn surrogate(c: &mut Criterion) {
    let spec = fixtures::example4().spec;
    let mut group = c.benchmark_group("surrogate_solve");
    for level in [7u32, 10, 14, 18] {
        group.bench_with_input(BenchmarkId::from_parameter(level), &level, |b, &n| {
            b.iter(|| SurrogateSolution::from_problem(black_box(&spec), n).unwrap())
        });
    }
    group.finish();
    c.bench_function("solve_and_sample_512", |b| {
        b.iter(|| solve_and_sample(black_box(10), 512))
    });
}

fn reference(c: &mut Criterion) {
    c.bench_function("exact_via_formula_257", |b| {
        b.iter(|| reference_sweep(black_box(257)))
    });
}

fn bound(c: &mut Criterion) {
    let spec = fixtures::example3().spec;
    let mut group = c.benchmark_group("theorem_bound");
    for level in [4u32, 8, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(level), &level, |b, &n| {
            b.iter(|| theorem_bound(black_box(&spec), n).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, surrogate, reference, bound);
criterion_main!(benches);

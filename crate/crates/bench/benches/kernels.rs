use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use stuperm_core::{
    average_ranks, estimate_type1_error, run_method, sample_scenario, Alternative, Method, PValueConvention,
    PairedSample, RngState, ScenarioSpec, TestConfig,
};

fn mvn(n: usize) -> PairedSample {
    sample_scenario(&ScenarioSpec::Mvn, n, RngState::new(1, 0)).unwrap()
}

fn ranks(c: &mut Criterion) {
    let mut g = c.benchmark_group("average_ranks");
    for n in [50, 1_000, 100_000] {
        let s = mvn(n);
        g.bench_with_input(BenchmarkId::new("distinct", n), s.xs(), |b, xs| {
            b.iter(|| average_ranks(black_box(xs)))
        });
        let tied: Vec<f64> = s.xs().iter().map(|v| (v * 4.0).round()).collect();
        g.bench_with_input(BenchmarkId::new("tied", n), &tied, |b, xs| {
            b.iter(|| average_ranks(black_box(xs)))
        });
    }
    g.finish();
}

fn tests(c: &mut Criterion) {
    let cfg = TestConfig {
        permutations: 1_000,
        seed: 7,
        convention: PValueConvention::Plain,
    };
    let mut g = c.benchmark_group("test_b1000");
    for n in [10, 50, 200] {
        let s = mvn(n);
        for m in [
            Method::TTest,
            Method::FisherYates,
            Method::NaivePermute,
            Method::StuPermute,
        ] {
            g.bench_with_input(BenchmarkId::new(m.id(), n), &s, |b, s| {
                b.iter(|| run_method(m, black_box(s), Alternative::Greater, &cfg))
            });
        }
    }
    g.finish();
}

fn scenarios(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_n200");
    for spec in ScenarioSpec::canonical() {
        g.bench_function(spec.id(), |b| {
            b.iter(|| sample_scenario(&spec, 200, RngState::new(3, 9)))
        });
    }
    g.finish();
}

fn cell(c: &mut Criterion) {
    let mut g = c.benchmark_group("harness_cell");
    g.sample_size(10);
    g.bench_function("circular_n50_stu_100reps", |b| {
        b.iter(|| estimate_type1_error(ScenarioSpec::Circular, 50, Method::StuPermute, 0.05, 100, 1_000, 11))
    });
    g.finish();
}

criterion_group!(benches, ranks, tests, scenarios, cell);
criterion_main!(benches);

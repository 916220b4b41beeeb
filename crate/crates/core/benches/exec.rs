use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use stochord::asymptotics::{sweep, table1};
use stochord::crossings::crossing_sets_with;
use stochord::sim::precedence_monte_carlo;
use stochord::{Distribution, Exec, FamilyTemplate};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn pair() -> (Distribution, Distribution) {
    (Distribution::normal(0.0, 1.0).unwrap(), Distribution::student_t(4.0).unwrap())
}

fn bench_table(c: &mut Criterion) {
    let (x, y) = pair();
    let mut g = c.benchmark_group("table1");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| table1(black_box(&x), black_box(&y), e).unwrap())
        });
    }
    g.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let (x, y) = pair();
    let ns: Vec<u64> = (2..=200).collect();
    let fam = FamilyTemplate::order_stat(0.6);
    let mut g = c.benchmark_group("sweep_2_200");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| sweep(&x, &y, &fam, black_box(&ns), e).unwrap())
        });
    }
    g.finish();
}

fn bench_crossings(c: &mut Criterion) {
    let (x, y) = pair();
    let mut g = c.benchmark_group("crossing_sets_65536");
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| crossing_sets_with(&x, &y, black_box(65_536), e).unwrap())
        });
    }
    g.finish();
}

fn bench_monte_carlo(c: &mut Criterion) {
    let (x, y) = pair();
    let mut g = c.benchmark_group("precedence_mc_200k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &e| {
            b.iter(|| precedence_monte_carlo(&x, &y, 10, 0.8, black_box(200_000), 1, e))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_table, bench_sweep, bench_crossings, bench_monte_carlo);
criterion_main!(benches);

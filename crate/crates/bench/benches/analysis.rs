use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lodprof_bench::{labeled_elements, reuse_network, value_sample, weighted_graph};
use lodprof_core::extract::summarize;
use lodprof_core::reuse::reuse_statistic;
use lodprof_core::similarity::{build_similarity_network, louvain};

fn bench_louvain(c: &mut Criterion) {
    let mut group = c.benchmark_group("louvain");
    group.sample_size(20);
    for n in [100, 500, 2000] {
        let edges = weighted_graph(n, n * 2, 7);
        group.bench_with_input(BenchmarkId::from_parameter(n), &edges, |b, edges| {
            b.iter(|| louvain(n, black_box(edges), 42))
        });
    }
    group.finish();
}

fn bench_reuse_statistic(c: &mut Criterion) {
    let mut group = c.benchmark_group("reuse_statistic");
    for n in [1_000, 10_000, 100_000] {
        let network = reuse_network(n, n / 2, 3);
        group.bench_with_input(BenchmarkId::from_parameter(n), &network, |b, net| {
            b.iter(|| reuse_statistic(black_box(net)).unwrap())
        });
    }
    group.finish();
}

fn bench_similarity_network(c: &mut Criterion) {
    let mut group = c.benchmark_group("similarity_network");
    group.sample_size(20);
    for count in [200, 800] {
        let (labeled, table) = labeled_elements(count, 4, 300, 50, 11);
        group.bench_with_input(BenchmarkId::from_parameter(count), &labeled, |b, l| {
            b.iter(|| build_similarity_network(black_box(l), &table, 0.75))
        });
    }
    group.finish();
}

fn bench_summarize(c: &mut Criterion) {
    let values = value_sample(2000, 5);
    c.bench_function("summarize_2000", |b| {
        b.iter(|| summarize(black_box(&values)))
    });
}

criterion_group!(
    benches,
    bench_louvain,
    bench_reuse_statistic,
    bench_similarity_network,
    bench_summarize
);
criterion_main!(benches);

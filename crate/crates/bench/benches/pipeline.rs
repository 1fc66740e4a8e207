use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use mapforest::forest::sample_forest;
use mapforest::labels::decorate;
use mapforest::map::build_map;
use mapforest::metrics::bfs;
use mapforest_bench::{labelled, map, mixed, quadrangulation, rng};

fn forests(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_forest");
    for n in [10_000u64, 100_000] {
        let d = quadrangulation(n, 1);
        let mut r = rng(1);
        g.throughput(Throughput::Elements(n));
        g.bench_with_input(BenchmarkId::new("quadrangulation", n), &d, |b, d| {
            b.iter(|| sample_forest(d, &mut r).unwrap())
        });
        let d = mixed(n);
        g.bench_with_input(BenchmarkId::new("mixed", n), &d, |b, d| b.iter(|| sample_forest(d, &mut r).unwrap()));
    }
    g.finish();
}

fn labels(c: &mut Criterion) {
    let d = quadrangulation(100_000, 1);
    let mut r = rng(2);
    let f = sample_forest(&d, &mut r).unwrap();
    c.bench_function("decorate/100000", |b| b.iter(|| decorate(f.clone(), &mut r)));
}

fn maps(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_map");
    for n in [10_000u64, 100_000] {
        let mut r = rng(3);
        let lf = labelled(&quadrangulation(n, 1), &mut r);
        g.throughput(Throughput::Elements(n));
        g.bench_with_input(BenchmarkId::from_parameter(n), &lf, |b, lf| b.iter(|| build_map(lf).unwrap()));
    }
    g.finish();
}

fn distances(c: &mut Criterion) {
    let mut g = c.benchmark_group("bfs");
    for n in [10_000u64, 100_000] {
        let (_, m) = map(&quadrangulation(n, 1), &mut rng(4));
        g.throughput(Throughput::Elements(m.map.num_edges() as u64));
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| b.iter(|| bfs(&m.map, m.star).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, forests, labels, maps, distances);
criterion_main!(benches);

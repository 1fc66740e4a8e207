use criterion::{criterion_group, criterion_main, Criterion};
use mapforest::boltzmann::{
    default_floor, sample_condensed_walk, sample_conditioned_walk, JumpSet, OffspringLaw, DEFAULT_BUDGET,
};
use mapforest::continuum::simulate_forest_process;
use mapforest::forest::{sample_degree_bridge, vervaat_shift};
use mapforest_bench::{quadrangulation, rng};

fn conditioned(c: &mut Criterion) {
    let law = OffspringLaw::geometric();
    let mut r = rng(10);
    c.bench_function("conditioned_walk/geometric/leaves/10000", |b| {
        b.iter(|| sample_conditioned_walk(&law, 10_000, 1, &JumpSet::leaves(), DEFAULT_BUDGET, &mut r).unwrap())
    });
    let law = OffspringLaw::subcritical(2.5, 0.7).unwrap();
    let floor = default_floor(&law, 100_000).unwrap();
    c.bench_function("condensed_walk/subcritical/100000", |b| {
        b.iter(|| sample_condensed_walk(&law, 100_000, 1, floor, DEFAULT_BUDGET, &mut r).unwrap())
    });
}

fn bridges(c: &mut Criterion) {
    let d = quadrangulation(100_000, 50);
    let mut r = rng(11);
    c.bench_function("degree_bridge+vervaat/100000", |b| {
        b.iter(|| vervaat_shift(&sample_degree_bridge(&d, &mut r).unwrap(), &mut r).unwrap())
    });
}

fn continuum(c: &mut Criterion) {
    let mut r = rng(12);
    c.bench_function("forest_process/16384", |b| b.iter(|| simulate_forest_process(1.0, 1 << 14, &mut r).unwrap()));
}

criterion_group!(benches, conditioned, bridges, continuum);
criterion_main!(benches);

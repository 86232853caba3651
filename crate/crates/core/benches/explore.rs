use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use locasim_core::explore::{start_mapping, ExploreConfig, Explorer};
use locasim_core::oracle::{build_catalog, EnumerationSpace};
use locasim_core::par::Pool;
use locasim_core::{collect_supers, Automaton};

const SEED: &str = include_str!("../../../data/seed-6state.ca");

fn parallel_workers() -> usize {
    std::thread::available_parallelism().map_or(2, |n| n.get()).max(2)
}

fn exploration(c: &mut Criterion) {
    let ca = Automaton::parse(SEED).unwrap();
    let sup = collect_supers(&ca, 400, 100).unwrap();
    let start = start_mapping(&ca, ca.count_states()).unwrap();
    let mut group = c.benchmark_group("explore");
    group.sample_size(10);
    for (label, workers) in [("sequential", 1), ("parallel", parallel_workers())] {
        group.bench_with_input(BenchmarkId::new(label, workers), &workers, |b, &workers| {
            b.iter(|| {
                let cfg = ExploreConfig { node_budget: 5_000, workers, verify: None, ..ExploreConfig::default() };
                let mut ex = Explorer::new(start.clone(), &sup, cfg).unwrap();
                let mut n = 0u64;
                ex.run(|_| n += 1).unwrap();
                n
            })
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let space = EnumerationSpace { states: 2, allow_large: false };
    let mut group = c.benchmark_group("enumerate-s2-h64");
    group.sample_size(10);
    for (label, pool) in [("sequential", Pool::sequential()), ("parallel", Pool::new(parallel_workers()))] {
        group.bench_function(label, |b| b.iter(|| build_catalog(space, 64, None, &pool).unwrap().len()));
    }
    group.finish();
}

criterion_group!(benches, exploration, enumeration);
criterion_main!(benches);

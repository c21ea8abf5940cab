use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use grnf::{build_grnf, DistributionConfig};
use grnf_bench::sbm_graphs;

/// Graphs embedded per second for a corpus of 12-node SBM graphs.
fn embed(c: &mut Criterion) {
    let graphs = sbm_graphs(12, 64, 3);
    let mut group = c.benchmark_group("embed_many");
    group.throughput(Throughput::Elements(graphs.len() as u64));
    group.sample_size(10);
    for m in [64, 256] {
        let map = build_grnf(m, &DistributionConfig::default(), 1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(m), &map, |b, map| {
            b.iter(|| map.embed_many(&graphs).unwrap())
        });
    }
    group.finish();
}

/// One feature at each order on a single graph, by graph size.
fn single_feature(c: &mut Criterion) {
    let config = DistributionConfig::default();
    let map = build_grnf(64, &config, 2).unwrap();
    let mut group = c.benchmark_group("psi_by_order");
    for k in 1..=3 {
        let w = map.params().iter().find(|w| w.k == k).unwrap().clone();
        for n in [12, 32] {
            let g = &sbm_graphs(n, 1, 5)[0];
            group.bench_with_input(BenchmarkId::new(format!("k{k}"), n), g, |b, g| {
                b.iter(|| grnf::features::psi(g, &w, &config).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, embed, single_feature);
criterion_main!(benches);

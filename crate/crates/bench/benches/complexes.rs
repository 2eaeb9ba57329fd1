use std::hint::black_box;

use covertop_bench::default_density;
use covertop_core::{
    betti_numbers, build_cech, build_probabilistic_complex, estimate_global_coverage, ComplexKind,
    NetworkInstance,
};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn probabilistic_complex(c: &mut Criterion) {
    let mut group = c.benchmark_group("probabilistic_complex");
    for n in [30, 100, 300] {
        let config = default_density(n, 8, 1);
        for kind in [ComplexKind::Rips, ComplexKind::Cech] {
            group.bench_with_input(BenchmarkId::new(kind.as_str(), n), &config, |b, cfg| {
                b.iter(|| build_probabilistic_complex(black_box(cfg), kind))
            });
        }
    }
    group.finish();
}

fn homology(c: &mut Criterion) {
    let mut group = c.benchmark_group("betti_numbers");
    for n in [30, 300, 1000] {
        let config = default_density(n, 8, 2);
        let cx = build_cech(&NetworkInstance::anchors(&config).point_map(), config.rc());
        group.bench_with_input(BenchmarkId::from_parameter(n), &cx, |b, cx| {
            b.iter(|| betti_numbers(black_box(cx)).unwrap())
        });
    }
    group.finish();
}

fn global_coverage(c: &mut Criterion) {
    let config = default_density(30, 8, 3);
    c.bench_function("global_coverage/30x100", |b| {
        b.iter(|| estimate_global_coverage(black_box(&config), 100, 5.0, 7).unwrap())
    });
}

criterion_group!(benches, probabilistic_complex, homology, global_coverage);
criterion_main!(benches);

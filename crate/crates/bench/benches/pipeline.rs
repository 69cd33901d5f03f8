use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use flatveech::{
    build_default, compute_veech_group, delaunay_triangulation, enumerate_saddle_connections,
    find_copies, Family,
};

fn construction(c: &mut Criterion) {
    let mut g = c.benchmark_group("build");
    for n in [3, 4, 8] {
        g.bench_with_input(BenchmarkId::new("dihedral", n), &n, |b, &n| {
            b.iter(|| build_default(Family::Dihedral, black_box(n)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("cyclic", n), &n, |b, &n| {
            b.iter(|| build_default(Family::Cyclic, black_box(n)).unwrap())
        });
    }
    g.finish();
}

fn saddles(c: &mut Criterion) {
    let mut g = c.benchmark_group("saddle_connections");
    for n in [3, 4, 8] {
        let s = build_default(Family::Dihedral, n).unwrap();
        let bound = 3.0 * s.spec.l2;
        g.bench_with_input(BenchmarkId::new("dihedral_3l2", n), &s, |b, s| {
            b.iter(|| enumerate_saddle_connections(&s.surface, black_box(bound)).unwrap())
        });
    }
    g.finish();
}

fn copies_and_delaunay(c: &mut Criterion) {
    let s = build_default(Family::Cyclic, 5).unwrap();
    let square = s.spec.square().unwrap();
    c.bench_function("copies/cyclic5_square", |b| {
        b.iter(|| find_copies(&s.surface, black_box(&square)).unwrap())
    });
    c.bench_function("delaunay/cyclic5", |b| {
        b.iter(|| delaunay_triangulation(black_box(&s.surface)).unwrap())
    });
}

fn veech(c: &mut Criterion) {
    let mut g = c.benchmark_group("veech_group");
    g.sample_size(20);
    for n in [3, 4, 8] {
        for kind in [Family::Dihedral, Family::Cyclic] {
            let s = build_default(kind, n).unwrap();
            g.bench_with_input(BenchmarkId::new(kind.to_string(), n), &s, |b, s| {
                b.iter(|| compute_veech_group(black_box(&s.surface)).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group!(benches, construction, saddles, copies_and_delaunay, veech);
criterion_main!(benches);

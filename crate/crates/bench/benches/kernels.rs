use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use zol_core::axioms::{multiplicity, ExtensionPair};
use zol_core::colouring::{unique_up_to_permutation, xi_matrix, GadgetS};
use zol_core::measures::DeltaTable;
use zol_core::*;

fn enumeration(c: &mut Criterion) {
    let tf = fixtures::triangle_free();
    let mut g = c.benchmark_group("enumerate_triangle_free");
    for n in [5usize, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| tf.count(black_box(n)).unwrap()));
    }
    g.finish();
}

fn canonical(c: &mut Criterion) {
    let m = fixtures::cycle(7);
    c.bench_function("canonical_form_c7", |b| b.iter(|| canonical_form(black_box(&m)).unwrap()));
}

fn axioms(c: &mut Criterion) {
    let p = ExtensionPair::new(Structure::graph(2, &[]), fixtures::two_path_over_nonedge()).unwrap();
    let m = Structure::graph(8, &[(1, 5), (1, 6), (2, 5), (2, 7), (3, 6), (3, 8), (4, 7), (4, 8), (1, 8)]);
    let g = Pregeometry::trivial(8);
    c.bench_function("multiplicity_two_path_n8", |b| {
        b.iter(|| multiplicity(black_box(&m), &p, &g).unwrap())
    });
}

fn colouring(c: &mut Criterion) {
    let graph = Vocabulary::graph();
    let cls = ClassSpec::l_colourable(&graph, 2, false).unwrap();
    let sampler = Sampler::new(&cls, 14, MeasureKind::Delta).unwrap();
    let sample = sampler.sample_at(1, 0);
    let s = GadgetS::build(&graph, 2, false).unwrap();
    c.bench_function("xi_matrix_n14", |b| b.iter(|| xi_matrix(black_box(&sample.rel), &s)));
    c.bench_function("unique_colouring_n14", |b| {
        b.iter(|| unique_up_to_permutation(black_box(&sample.rel), 2, false))
    });
}

fn measures(c: &mut Criterion) {
    let ru = fixtures::restricted_unary_graph();
    c.bench_function("delta_table_restricted_unary_n4", |b| b.iter(|| DeltaTable::build(&ru, black_box(4)).unwrap()));
    let coloured = ClassSpec::l_coloured(&Vocabulary::graph(), 2, false).unwrap();
    let sampler = Sampler::new(&coloured, 40, MeasureKind::Delta).unwrap();
    let mut i = 0u64;
    c.bench_function("sample_coloured_n40", |b| {
        b.iter(|| {
            i += 1;
            sampler.sample_at(7, i)
        })
    });
}

criterion_group!(benches, enumeration, canonical, axioms, colouring, measures);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use graphfold_bench::{face_clauses, zigzag_face};

fn face_constraints(c: &mut Criterion) {
    let mut group = c.benchmark_group("face_constraints");
    for n in [1_000usize, 10_000, 100_000] {
        let face = zigzag_face(n, 1);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &face, |b, face| {
            b.iter(|| face_clauses(face))
        });
    }
    group.finish();
}

criterion_group!(benches, face_constraints);
criterion_main!(benches);

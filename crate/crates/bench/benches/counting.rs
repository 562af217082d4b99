use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use num_rational::Ratio;
use pgen_core::measure::{bad_set, BadSpec};
use pgen_core::stats::{required_length, z_profile};
use pgen_core::words::{count_words_as, Representation};
use pgen_core::{Base, Convention, DigitSource, Lambda, Limits, WindowSpec};

fn counting(c: &mut Criterion) {
    let lim = Limits::default();
    let base = Base::new(2).unwrap();
    let n = 1 << 22;
    let buf = DigitSource::random(base, 42).materialize(n, &lim).unwrap();

    let mut group = c.benchmark_group("count_words");
    group.throughput(Throughput::Elements(n as u64));
    for k in [8u32, 16, 20] {
        let spec = WindowSpec::prefix(k, n);
        for repr in [Representation::Dense, Representation::Sparse] {
            group.bench_with_input(
                BenchmarkId::new(format!("{repr:?}"), k),
                &spec,
                |b, spec| b.iter(|| black_box(count_words_as(&buf, spec, repr).unwrap())),
            );
        }
    }
    group.finish();
}

fn profiles(c: &mut Criterion) {
    let lim = Limits::default();
    let base = Base::new(2).unwrap();
    let lambda = Lambda::integer(1).unwrap();
    let need = required_length(base, 20, lambda, Convention::A).unwrap();
    let buf = DigitSource::random(base, 42)
        .materialize(need, &lim)
        .unwrap();
    let mut group = c.benchmark_group("z_profile");
    for k in [12u32, 16, 20] {
        group.bench_function(BenchmarkId::from_parameter(k), |b| {
            b.iter(|| black_box(z_profile(&buf, k, lambda, 16, Convention::A, &lim).unwrap()))
        });
    }
    group.finish();
}

fn bad_sets(c: &mut Criterion) {
    let lim = Limits::default();
    let base = Base::new(2).unwrap();
    let mut group = c.benchmark_group("bad_set");
    group.sample_size(10);
    for (lambda, k) in [("1", 2u32), ("3/2", 3), ("2", 3)] {
        let spec = BadSpec::new(
            base,
            lambda.parse().unwrap(),
            k,
            1,
            Ratio::new(1, u64::from(k)),
        );
        let label = format!("lambda={lambda},k={k}");
        group.bench_function(label, |b| {
            b.iter(|| black_box(bad_set(&spec, &lim).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, counting, profiles, bad_sets);
criterion_main!(benches);

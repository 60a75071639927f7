//! Constructive sorter throughput at sizes the exact search cannot reach.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use permsort_core::perm::Perm;
use permsort_core::sorters::{verify_certificate, Sorter};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random_perm(n: usize, rng: &mut ChaCha8Rng) -> Perm {
    let mut v: Vec<u16> = (1..=n as u16).collect();
    v.shuffle(rng);
    Perm::new(v).unwrap()
}

fn bench_sorters(c: &mut Criterion) {
    let mut group = c.benchmark_group("sort");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in [64usize, 256] {
        let inputs: Vec<Perm> = (0..16).map(|_| random_perm(n, &mut rng)).collect();
        for sorter in Sorter::ALL {
            group.bench_with_input(BenchmarkId::new(sorter.token(), n), &inputs, |b, inputs| {
                b.iter(|| {
                    for p in inputs {
                        criterion::black_box(sorter.sort(p));
                    }
                })
            });
        }
    }
    group.finish();
}

fn bench_verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    // Quadratic sorters produce long certificates; the layered one stays
    // logarithmic in step count and dominates on membership cost instead.
    for (sorter, n) in [(Sorter::Bubble, 64), (Sorter::Layered, 256)] {
        let cert = sorter.sort(&random_perm(n, &mut rng));
        group.bench_with_input(BenchmarkId::new(sorter.token(), n), &cert, |b, cert| {
            b.iter(|| verify_certificate(criterion::black_box(cert)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sorters, bench_verify);
criterion_main!(benches);

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use irrat_core::cfrac::conjecture2_scan;
use irrat_core::density::{density_report_with_table, sieve_smallest_prime_factor};
use irrat_core::enclosure::compare_distance_to_e;
use irrat_core::kempner::{kempner_s, kempner_s_naive};
use irrat_core::measures::check_theorem1;
use irrat_core::Rational;

fn kempner(c: &mut Criterion) {
    let mut g = c.benchmark_group("kempner_s 1..=2000");
    g.bench_function("factorization", |b| {
        b.iter(|| (1..=2000u64).map(|q| kempner_s(black_box(q)).unwrap()).sum::<u64>())
    });
    g.bench_function("naive", |b| {
        b.iter(|| (1..=2000u64).map(|q| kempner_s_naive(black_box(q)).unwrap()).sum::<u64>())
    });
    g.finish();
}

fn enclosure(c: &mut Criterion) {
    let r = Rational::new(65, 24).unwrap();
    let bound = Rational::new(1, 120).unwrap();
    c.bench_function("compare_distance 65/24 vs 1/120", |b| {
        b.iter(|| compare_distance_to_e(black_box(&r), black_box(&bound)).unwrap())
    });
    // 1084483/398959 is a convergent, so its distance sits just under 1/q^2
    let close = Rational::new(1_084_483, 398_959).unwrap();
    let tight = Rational::new(1, 398_959i64 * 398_959).unwrap();
    c.bench_function("compare_distance convergent vs 1/q^2", |b| {
        b.iter(|| compare_distance_to_e(black_box(&close), black_box(&tight)).unwrap())
    });
    c.bench_function("check_theorem1 q=1999", |b| {
        let p = 5434.into();
        b.iter(|| check_theorem1(black_box(&p), 1999).unwrap())
    });
}

fn density(c: &mut Criterion) {
    let mut g = c.benchmark_group("density");
    g.sample_size(10);
    g.bench_function("sieve 10^6", |b| {
        b.iter(|| sieve_smallest_prime_factor(black_box(1_000_000)).unwrap())
    });
    let table = sieve_smallest_prime_factor(1_000_000).unwrap();
    for workers in [1usize, 4] {
        g.bench_with_input(BenchmarkId::new("report 10^6", workers), &workers, |b, &w| {
            b.iter(|| density_report_with_table(&table, 1_000_000, w).unwrap())
        });
    }
    g.finish();
}

fn partial_sums(c: &mut Criterion) {
    let mut g = c.benchmark_group("conjecture2_scan");
    g.sample_size(10);
    for max_n in [100u64, 500] {
        g.bench_with_input(BenchmarkId::from_parameter(max_n), &max_n, |b, &n| {
            b.iter(|| conjecture2_scan(n).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, kempner, enclosure, density, partial_sums);
criterion_main!(benches);

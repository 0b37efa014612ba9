use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use fibstat_core::families::{diagonal_conics, diagonal_cubics};
use fibstat_core::localsolve::Place;
use fibstat_core::par;
use fibstat_core::projective::count_points;
use fibstat_core::stats::{sample_fold, scan_fold};

// "sequential" pins a one-worker pool; "pool" uses the default rayon pool.
// Built with --no-default-features both run the sequential code path.
fn modes() -> [(&'static str, usize); 2] {
    [("sequential", 1), ("pool", par::current_threads())]
}

fn omega_sum(acc: &mut u64, r: &fibstat_core::stats::ObstructionRecord) {
    *acc += r.omega as u64;
}

fn scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan_fold");
    g.sample_size(10);
    let conics = diagonal_conics();
    let cubics = diagonal_cubics();
    for (mode, threads) in modes() {
        g.bench_with_input(BenchmarkId::new("conics_b60", mode), &threads, |b, &t| {
            b.iter(|| {
                par::with_threads(t, || {
                    scan_fold(&conics, 60, &[Place::Infinity], || 0u64, omega_sum, |a, b| a + b)
                        .unwrap()
                })
            })
        });
        g.bench_with_input(BenchmarkId::new("cubics_b5", mode), &threads, |b, &t| {
            b.iter(|| {
                par::with_threads(t, || {
                    scan_fold(&cubics, 5, &[Place::Infinity], || 0u64, omega_sum, |a, b| a + b)
                        .unwrap()
                })
            })
        });
    }
    g.finish();
}

fn sample(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_fold");
    g.sample_size(10);
    let conics = diagonal_conics();
    for (mode, threads) in modes() {
        g.bench_with_input(BenchmarkId::new("conics_1e5_x50k", mode), &threads, |b, &t| {
            b.iter(|| {
                par::with_threads(t, || {
                    sample_fold(
                        &conics,
                        100_000,
                        &[Place::Infinity],
                        50_000,
                        black_box(7),
                        || 0u64,
                        omega_sum,
                        |a, b| a + b,
                    )
                    .unwrap()
                })
            })
        });
    }
    g.finish();
}

fn count(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_points");
    for (mode, threads) in modes() {
        g.bench_with_input(BenchmarkId::new("n2_b2000", mode), &threads, |b, &t| {
            b.iter(|| par::with_threads(t, || count_points(2, black_box(2000)).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, scan, sample, count);
criterion_main!(benches);

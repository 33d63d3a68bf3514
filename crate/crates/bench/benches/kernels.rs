use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ndarray::Array2;
use sfista_bench::fixture;
use sfista_core::harness::BlurLevel;
use sfista_core::solvers::estimate_lipschitz;
use sfista_core::structured::{ApplyMode, FactorApplyPlan, StructuredFactor};
use sfista_core::{fista, sfista, SolveConfig};

fn factor_apply(c: &mut Criterion) {
    let mut group = c.benchmark_group("factor_apply");
    for n in [64, 128, 256] {
        let gen: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let f = StructuredFactor::toep_plus_hank(&gen, n / 2 + 1).unwrap();
        let x = Array2::from_shape_fn((n, n), |(i, j)| ((i * 7 + j * 3) % 11) as f64);
        let dense = FactorApplyPlan::dense(&f);
        let fft = FactorApplyPlan::fft(&f);
        group.bench_with_input(BenchmarkId::new("dense", n), &n, |bch, _| {
            bch.iter(|| dense.apply(black_box(x.view()), ApplyMode::Left).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("fft", n), &n, |bch, _| {
            bch.iter(|| fft.apply(black_box(x.view()), ApplyMode::Left).unwrap())
        });
    }
    group.finish();
}

fn kron_apply(c: &mut Criterion) {
    let fx = fixture(128, BlurLevel::Medium);
    let mut group = c.benchmark_group("kron_apply_128");
    for s in [1, 5] {
        let op = fx.dec.operator(s).unwrap();
        group.bench_with_input(BenchmarkId::new("sequential", s), &s, |bch, _| {
            bch.iter(|| op.apply(black_box(fx.x.view())).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", s), &s, |bch, _| {
            bch.iter(|| op.apply_parallel(black_box(fx.x.view())).unwrap())
        });
    }
    group.finish();
}

/// Ten iterations of each solver on a 64x64 problem.
fn solvers(c: &mut Criterion) {
    let n = 64;
    let fx = fixture(n, BlurLevel::Medium);
    let exact = fx.dec.full_operator().unwrap();
    let l = estimate_lipschitz(&exact, 30, 1).unwrap().value;
    let cfg = SolveConfig::new(0.05, l).unwrap().max_iter(10);
    let bv = sfista_core::image::vec_of(&fx.b);
    let op5 = fx.dec.operator(5).unwrap();

    let mut group = c.benchmark_group("solver_10_iters_64");
    group.sample_size(10);
    group.bench_function("fista_exact", |bch| {
        bch.iter(|| fista(&exact, bv.view(), &cfg, ndarray::Array1::zeros(n * n)).unwrap())
    });
    group.bench_function("sfista_s5", |bch| {
        bch.iter(|| sfista(&op5, fx.b.view(), &cfg, Array2::zeros((n, n))).unwrap())
    });
    group.finish();
}

criterion_group!(benches, factor_apply, kron_apply, solvers);
criterion_main!(benches);

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hiapem::lagrangian::al_smooth_gradient;
use hiapem::{adap_apg, AlContext, ApgConfig, HiapemConfig, Mode, SmoothOracle};
use hiapem_bench::{first_subproblem, lcqp, qcqp};

fn al_gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("al_gradient");
    for n in [50, 200, 800] {
        let (problem, x0) = lcqp(n, n / 10, 1.0, 0);
        let (sub, p) = first_subproblem(&problem, &x0);
        let ctx = AlContext::new(&sub, 100.0, &p).unwrap();
        group.bench_with_input(BenchmarkId::new("lcqp", n), &n, |b, _| {
            b.iter(|| al_smooth_gradient(&ctx, black_box(&x0)).unwrap())
        });
    }
    let (problem, x0) = qcqp(100, 5, 1.0, 0);
    let (sub, p) = first_subproblem(&problem, &x0);
    let ctx = AlContext::new(&sub, 100.0, &p).unwrap();
    group.bench_function("qcqp/100", |b| b.iter(|| ctx.value_and_gradient(black_box(&x0))));
    group.finish();
}

fn inner_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("adap_apg");
    for beta in [1.0, 100.0] {
        let (problem, x0) = lcqp(100, 10, 1.0, 1);
        let (sub, p) = first_subproblem(&problem, &x0);
        let ctx = AlContext::new(&sub, beta, &p).unwrap();
        let cfg = ApgConfig::new(1.0, 1e-4, 1.0);
        group.bench_with_input(BenchmarkId::new("lcqp100_beta", beta), &beta, |b, _| {
            b.iter(|| adap_apg(&ctx, sub.nonsmooth(), black_box(&x0), &cfg).unwrap())
        });
    }
    group.finish();
}

fn full_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    let (problem, x0) = lcqp(50, 5, 0.1, 2);
    for mode in [Mode::Hybrid, Mode::PureIalm, Mode::PurePenalty] {
        let cfg = HiapemConfig::new(1e-3, 0.1).with_mode(mode);
        group.bench_function(BenchmarkId::new("lcqp50", mode.tag()), |b| {
            b.iter(|| hiapem::solve(&problem, black_box(&x0), &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, al_gradient, inner_solve, full_solve);
criterion_main!(benches);

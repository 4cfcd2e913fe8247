//! Sequential vs rayon execution on the hot paths: a small sweep, the
//! exhaustive grouping check, and honest runs over wide gradients.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use bgc_core::adversary::Honest;
use bgc_core::harness::{random_gradients, sweep, verify_lemma3, GridSpec, StrategyName};
use bgc_core::par::Execution;
use bgc_core::protocol::{run_protocol, ProtocolConfig};
use bgc_core::algebra::DEFAULT_MODULUS;
use bgc_core::{AssignmentKind, CodeContext};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn small_grid() -> GridSpec {
    GridSpec {
        n: vec![5, 6, 7],
        s: vec![1, 2],
        p: vec![4, 9],
        d: vec![3],
        assignments: vec![AssignmentKind::Cyclic, AssignmentKind::Fractional],
        adversaries: vec![StrategyName::RandomAlways, StrategyName::TournamentLiar],
        seeds: 4,
        ..GridSpec::default()
    }
}

fn bench_sweep(c: &mut Criterion) {
    let grid = small_grid();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| b.iter(|| black_box(sweep(&grid, exec))));
    }
    group.finish();
}

fn bench_lemma3(c: &mut Criterion) {
    let mut group = c.benchmark_group("grouping-check");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| black_box(verify_lemma3(&[(6, 2, 2)], exec)))
        });
    }
    group.finish();
}

fn bench_honest_run(c: &mut Criterion) {
    let (n, s, u, p) = (8, 2, 1, 16);
    let ctx = CodeContext::new(n, s, u, DEFAULT_MODULUS).expect("valid code");
    let a = AssignmentKind::Cyclic.generate(n, p, s + 1, 0).expect("valid");
    let mut group = c.benchmark_group("honest-run");
    group.sample_size(20);
    for d in [64, 1024] {
        let g = random_gradients(ctx.field(), d, p, 7);
        for (name, exec) in MODES {
            let config = ProtocolConfig {
                execution: exec,
                ..ProtocolConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(name, d), &d, |b, _| {
                b.iter(|| {
                    let mut adv = Honest::new();
                    black_box(run_protocol(&ctx, &a, &g, &mut adv, config).expect("honest run"))
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_lemma3, bench_honest_run);
criterion_main!(benches);

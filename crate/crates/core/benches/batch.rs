use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use posilab::par::{self, ExecMode};
use posilab::posinormal::{classify_grid_with, is_member, ClassQuery};
use posilab::random::{case_rng, conditioned};
use posilab::suites;

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn operators(count: usize, dim: usize) -> Vec<posilab::linalg::ComplexMatrix> {
    (0..count).map(|i| conditioned(&mut case_rng(7, i), dim, 0.5, 1.5)).collect()
}

fn batch_membership(c: &mut Criterion) {
    let ops = operators(256, 6);
    let q = ClassQuery::new(1, 2, 2.0).unwrap();
    let mut g = c.benchmark_group("batch_is_member");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, ops.len()), |b| {
            b.iter(|| par::map_with(mode, &ops, |t| is_member(t, &q, 1e-10).unwrap().holds))
        });
    }
    g.finish();
}

fn lambda_grid(c: &mut Criterion) {
    let t = conditioned(&mut case_rng(11, 0), 8, 0.5, 1.5);
    let mut g = c.benchmark_group("classify_grid");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, "8x8 k<=3 n<=4"), |b| {
            b.iter(|| classify_grid_with(mode, black_box(&t), 3, 4, 1e-10).unwrap())
        });
    }
    g.finish();
}

fn suites_bench(c: &mut Criterion) {
    let mut g = c.benchmark_group("tensor_suite");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, 64), |b| b.iter(|| suites::tensor(mode, 3, 64)));
    }
    g.finish();
}

criterion_group!(benches, batch_membership, lambda_grid, suites_bench);
criterion_main!(benches);

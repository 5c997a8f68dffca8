use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cscap_core::dsl::build_jk_system;
use cscap_core::exec::Execution;
use cscap_core::genfun::{jk_table, DEFAULT_TOL};
use cscap_core::maxent::{jk_phrase_support, maxentropic_pmf, sample_replicas};
use cscap_core::runlength::brute_force_counts;
use cscap_core::spectrum::{enumerate_spectrum_with, DEFAULT_WEIGHT_EPSILON};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn spectrum(c: &mut Criterion) {
    let sys = build_jk_system(3, 3).unwrap();
    let mut g = c.benchmark_group("enumerate_spectrum_jk33_w18");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| {
                enumerate_spectrum_with(&sys, 18.0, 10_000_000, DEFAULT_WEIGHT_EPSILON, exec)
                    .unwrap()
            })
        });
    }
    g.finish();
}

fn brute_force(c: &mut Criterion) {
    let mut g = c.benchmark_group("brute_force_jk22_len20");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| brute_force_counts(2, 2, black_box(20), exec))
        });
    }
    g.finish();
}

fn table(c: &mut Criterion) {
    let mut g = c.benchmark_group("jk_table_32");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| jk_table(black_box(32), 32, DEFAULT_TOL, exec).unwrap())
        });
    }
    g.finish();
}

fn replicas(c: &mut Criterion) {
    let pmf = maxentropic_pmf(&jk_phrase_support(2, 2).unwrap(), DEFAULT_TOL).unwrap();
    let seeds: Vec<u64> = (0..16).collect();
    let mut g = c.benchmark_group("sample_replicas_16x10k");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sample_replicas(&pmf, 10_000, &seeds, None, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, spectrum, brute_force, table, replicas);
criterion_main!(benches);

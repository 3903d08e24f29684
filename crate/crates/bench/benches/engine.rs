use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hetnet_meta::special::{gauss_2f1_neg, marcum_q1, regularized_incomplete_beta};
use hetnet_meta::{moment, run_monte_carlo, MomentOrder, QuadratureConfig};
use hetnet_meta_bench::{reference, single_ppp, small_run};
use num_complex::Complex64;

fn special(c: &mut Criterion) {
    c.bench_function("marcum_q1", |b| {
        b.iter(|| marcum_q1(black_box(3.0), black_box(2.5)))
    });
    c.bench_function("incomplete_beta", |b| {
        b.iter(|| regularized_incomplete_beta(black_box(0.3), 2.5, 1.5))
    });
    c.bench_function("2f1_complex_order", |b| {
        b.iter(|| {
            gauss_2f1_neg(
                black_box(Complex64::new(1.0, 4.0)),
                -0.5,
                0.5,
                black_box(-10.0),
            )
        })
    });
}

fn moments(c: &mut Criterion) {
    let cfg = QuadratureConfig::default();
    let ppp = single_ppp();
    c.bench_function("moment_single_ppp", |b| {
        b.iter(|| moment(black_box(1.0), MomentOrder::real(1.0), &ppp, &cfg))
    });
    let mut g = c.benchmark_group("moment_reference");
    g.sample_size(10);
    for (name, type2) in [("type1", false), ("type2", true)] {
        let m = reference(type2);
        g.bench_function(name, |b| {
            b.iter(|| moment(black_box(1.0), MomentOrder::real(1.0), &m, &cfg))
        });
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate_1000");
    g.sample_size(10);
    for (name, type2) in [("type1", false), ("type2", true)] {
        let m = reference(type2);
        let cfg = small_run(&m, 1000);
        g.bench_function(name, |b| b.iter(|| run_monte_carlo(&m, &cfg)));
    }
    g.finish();
}

criterion_group!(benches, special, moments, simulation);
criterion_main!(benches);

//! Benchmarks for the pieces that dominate wall time: the direct
//! characteristic evaluation, the Volterra iteration, the full zeta
//! pipeline, and the eigenvalue scan.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use slzeta_core::ivp::characteristic_value;
use slzeta_core::oracle::find_eigenvalues;
use slzeta_core::pipeline::zeta_values;
use slzeta_core::volterra::{base_solutions, iterate_series};
use slzeta_core::{
    BoundaryCondition, Coefficient, ComputeOptions, IntegratorConfig, Interval, OracleConfig,
    SLProblem,
};

fn linear_problem() -> SLProblem {
    SLProblem::schroedinger(
        Interval::new(0.0, 1.0).unwrap(),
        Coefficient::Polynomial {
            coeffs: vec![0.0, 1.0],
        },
    )
}

fn bench_characteristic(c: &mut Criterion) {
    let problem = linear_problem();
    let bc = BoundaryCondition::separated(0.0, 0.0);
    let cfg = IntegratorConfig::default();
    let mut group = c.benchmark_group("characteristic_value");
    for &mag in &[10.0, 1000.0, 100_000.0] {
        group.bench_with_input(BenchmarkId::from_parameter(mag), &mag, |b, &mag| {
            let z = Complex64::new(mag, 0.5 * mag);
            b.iter(|| characteristic_value(&problem, &bc, z, &cfg).unwrap());
        });
    }
    group.finish();
}

fn bench_volterra(c: &mut Criterion) {
    let problem = linear_problem();
    let cfg = IntegratorConfig::default();
    let mut group = c.benchmark_group("volterra");
    for &panels in &[256usize, 1024] {
        group.bench_with_input(
            BenchmarkId::new("base_solutions", panels),
            &panels,
            |b, &panels| b.iter(|| base_solutions(&problem, panels, &cfg).unwrap()),
        );
    }
    let base = base_solutions(&problem, 1024, &cfg).unwrap();
    group.bench_function("iterate_series_k12", |b| {
        b.iter(|| iterate_series(&base, 12))
    });
    group.finish();
}

fn bench_zeta_pipeline(c: &mut Criterion) {
    let problem = linear_problem();
    let bc = BoundaryCondition::separated(0.0, 0.0);
    let opts = ComputeOptions {
        n_panels: 512,
        refine_check: false,
        ..Default::default()
    };
    c.bench_function("zeta_values_n4", |b| {
        b.iter(|| zeta_values(&problem, &bc, 4, &opts).unwrap())
    });
}

fn bench_oracle(c: &mut Criterion) {
    let problem = linear_problem();
    let bc = BoundaryCondition::separated(0.0, 0.0);
    let cfg = OracleConfig::default();
    c.bench_function("find_eigenvalues_10", |b| {
        b.iter(|| find_eigenvalues(&problem, &bc, 10, &cfg).unwrap())
    });
}

criterion_group!(
    benches,
    bench_characteristic,
    bench_volterra,
    bench_zeta_pipeline,
    bench_oracle
);
criterion_main!(benches);

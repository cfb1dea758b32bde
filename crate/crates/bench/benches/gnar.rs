use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use netgnar::eval::{rolling_horizon, EvalOptions, Forecaster};
use netgnar::graph::{network_stats, triangular_lattice};
use netgnar::model::{fit, preset};
use netgnar_bench::lattice_panel;

fn stats(c: &mut Criterion) {
    let mut group = c.benchmark_group("network_stats");
    group.sample_size(10);
    for (rows, cols) in [(10, 20), (40, 78)] {
        let net = triangular_lattice(rows, cols).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("{rows}x{cols}")), &net, |b, net| {
            b.iter(|| network_stats(net).unwrap())
        });
    }
    group.finish();
}

fn fitting(c: &mut Criterion) {
    let mut group = c.benchmark_group("fit");
    for model in [1u8, 3] {
        let (net, series) = lattice_panel(8, 10, 200);
        let order = preset(model).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(format!("model{model}")), &order, |b, order| {
            b.iter(|| fit(&series, &net, order).unwrap())
        });
    }
    group.finish();
}

fn rolling(c: &mut Criterion) {
    let (net, series) = lattice_panel(5, 6, 120);
    let forecaster = Forecaster::Gnar(preset(3).unwrap());
    c.bench_function("rolling_horizon/40_periods", |b| {
        b.iter(|| rolling_horizon(&series, &net, &forecaster, 40, &EvalOptions::default()).unwrap())
    });
}

criterion_group!(benches, stats, fitting, rolling);
criterion_main!(benches);

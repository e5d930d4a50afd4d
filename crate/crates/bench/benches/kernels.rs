use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use std::hint::black_box;

use wlnn_bench::{perturbed_model, random_stencils, taylor_green, vortex};
use wlnn_core::solver::{gather_euler, rhs_euler};
use wlnn_core::wlnn::Batch;
use wlnn_core::Scheme;

fn forward(c: &mut Criterion) {
    let model = perturbed_model(1);
    let mut group = c.benchmark_group("wlnn_forward");
    for rows in [256usize, 4096, 65536] {
        let stencils = random_stencils(rows, 2);
        let mut batch = Batch::default();
        group.throughput(Throughput::Elements(rows as u64));
        group.bench_with_input(BenchmarkId::from_parameter(rows), &stencils, |b, s| {
            b.iter(|| {
                model.forward_batch(black_box(s), &mut batch);
                black_box(batch.weights()[0])
            })
        });
    }
    group.finish();
}

fn backward(c: &mut Criterion) {
    let model = perturbed_model(1);
    let rows = 4096;
    let stencils = random_stencils(rows, 3);
    let d_weights = vec![1e-3; rows * 6];
    let mut grad = vec![0.0; model.n_params()];
    let mut batch = Batch::default();
    c.bench_function("wlnn_forward_backward_4096", |b| {
        b.iter(|| {
            model.forward_batch(&stencils, &mut batch);
            model.backward_batch(&mut batch, &d_weights, &mut grad).expect("matching shapes");
            black_box(grad[0])
        })
    });
}

fn reconstruct(c: &mut Criterion) {
    let stencils = random_stencils(65536, 4);
    let mut out = vec![0.0; stencils.len()];
    let mut group = c.benchmark_group("reconstruct_65536");
    group.throughput(Throughput::Elements(stencils.len() as u64));
    for scheme in [Scheme::Ce6, Scheme::Up5, Scheme::Weno5Js, Scheme::wlnn(perturbed_model(5))] {
        group.bench_function(scheme.name(), |b| {
            b.iter(|| {
                scheme.reconstruct(black_box(&stencils), &mut out);
                black_box(out[0])
            })
        });
    }
    group.finish();
}

fn euler_rhs(c: &mut Criterion) {
    let mut group = c.benchmark_group("euler_rhs");
    group.sample_size(20);
    let v = vortex(80);
    group.bench_function("gather_vortex_80", |b| b.iter(|| gather_euler(black_box(&v)).expect("valid")));
    group.bench_function("weno5js_vortex_80", |b| b.iter(|| rhs_euler(black_box(&v), &Scheme::Weno5Js).expect("valid")));
    let tg = taylor_green(16);
    for scheme in [Scheme::Up5, Scheme::wlnn(perturbed_model(6))] {
        group.bench_function(format!("{}_taylor_green_16", scheme.name()), |b| {
            b.iter(|| rhs_euler(black_box(&tg), &scheme).expect("valid"))
        });
    }
    group.finish();
}

criterion_group!(benches, forward, backward, reconstruct, euler_rhs);
criterion_main!(benches);

//! Sequential versus data-parallel execution of the hot kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mgsp::apps::{short_time_mgst_with, Channel, Frame, LabeledPoint, StftOptions};
use mgsp::filters::poly_powers;
use mgsp::signal::apply_tensor_with;
use mgsp::tensor::contract_tensors_with;
use mgsp::{gen_er_multiplex, laplacian, Exec, MlnSignal};
use nalgebra::DMatrix;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn contraction(c: &mut Criterion) {
    let f = laplacian(&gen_er_multiplex(0.5, 0.5, 11, 15, 1).unwrap());
    let s = MlnSignal::new(DMatrix::from_fn(11, 15, |a, i| (a as f64 - i as f64).sin())).unwrap();
    let mut g = c.benchmark_group("contraction_11x15");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("tensor", name), |b| {
            b.iter(|| contract_tensors_with(exec, black_box(f.tensor()), f.tensor()).unwrap())
        });
        g.bench_function(BenchmarkId::new("signal", name), |b| {
            b.iter(|| apply_tensor_with(exec, black_box(f.tensor()), &s).unwrap())
        });
    }
    g.finish();
}

fn powers(c: &mut Criterion) {
    let f = laplacian(&gen_er_multiplex(0.3, 0.3, 6, 15, 2).unwrap());
    let mut g = c.benchmark_group("poly_powers_6x15");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| poly_powers(exec, black_box(&f), 5).unwrap()));
    }
    g.finish();
}

fn spectrogram(c: &mut Criterion) {
    let frames: Vec<Frame> = (0..60)
        .map(|t| {
            (0..12)
                .map(|k| LabeledPoint {
                    label: k,
                    xyz: [k as f64 * 0.5, 0.0, (0.3 * t as f64 + k as f64).sin()],
                })
                .collect()
        })
        .collect();
    let opts = StftOptions {
        window: 4,
        hop: 2,
        tau: 4.0,
        sigma: 1.0,
        channel: Channel::Z,
    };
    let mut g = c.benchmark_group("short_time_60_frames");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_function(name, |b| b.iter(|| short_time_mgst_with(exec, black_box(&frames), &opts).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, contraction, powers, spectrogram);
criterion_main!(benches);

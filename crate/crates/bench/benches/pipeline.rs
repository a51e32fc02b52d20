use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use glint::eval::{mean_ap, DEFAULT_THRESHOLDS};
use glint::render::render_frame;
use glint::Protocol;
use glint_bench::{synthetic_eval, Fixture};

fn plan(c: &mut Criterion) {
    let dr = Fixture::new(Protocol::Dr, 300, 16);
    let mut i = 0;
    c.bench_function("plan_frame/dr", |b| {
        b.iter(|| {
            i += 1;
            black_box(dr.planner.plan(1, i).unwrap())
        })
    });
}

fn render(c: &mut Criterion) {
    let mut g = c.benchmark_group("render_frame");
    g.sample_size(10);
    let ra = Fixture::new(Protocol::Ra, 300, 1);
    let spec = ra.planner.plan(1, 0).unwrap();
    g.bench_function("ra_300", |b| {
        b.iter(|| black_box(render_frame(&spec, &ra.assets, &ra.settings).unwrap()))
    });
    let dr = Fixture::new(Protocol::Dr, 300, 1);
    let spec = dr.planner.plan(1, 0).unwrap();
    g.bench_function("dr_300", |b| {
        b.iter(|| black_box(render_frame(&spec, &dr.assets, &dr.settings).unwrap()))
    });
    let mlt = Fixture::new(Protocol::Mltdr, 150, 4);
    let spec = mlt.planner.plan(1, 0).unwrap();
    g.bench_function("mltdr_150_spp4", |b| {
        b.iter(|| black_box(render_frame(&spec, &mlt.assets, &mlt.settings).unwrap()))
    });
    g.finish();
}

fn evaluate(c: &mut Criterion) {
    let (dets, gts) = synthetic_eval(2000);
    c.bench_function("mean_ap/2000_frames", |b| {
        b.iter(|| black_box(mean_ap(&dets, &gts, &DEFAULT_THRESHOLDS).unwrap()))
    });
}

criterion_group!(benches, plan, render, evaluate);
criterion_main!(benches);

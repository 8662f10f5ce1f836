//! Hot-path benchmarks: special functions, field evaluation, and the
//! split-operator step itself at 1-D and 3-D problem sizes.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use std::hint::black_box;

use sgi_bench::{model, phys};
use sgi_core::bessel::k0_k1;
use sgi_core::field::{PlaneInterpTable, QuadraticFieldPatch};
use sgi_core::propagator::{Axis1dSource, SpinFieldSource};
use sgi_core::{evolve, EvolveOptions, Grid, SpinorField};

fn bench_bessel(c: &mut Criterion) {
    let xs: Vec<f64> = (1..=64).map(|i| 0.05 * i as f64).collect();
    let mut g = c.benchmark_group("bessel");
    g.throughput(Throughput::Elements(xs.len() as u64));
    g.bench_function("k0_k1_sweep", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &x in &xs {
                let (k0, k1) = k0_k1(black_box(x)).unwrap();
                acc += k0 + k1;
            }
            acc
        })
    });
    g.finish();
}

fn bench_field_eval(c: &mut Criterion) {
    let m = model().unwrap();
    let p = phys();
    let delta = p.delta;

    let table = PlaneInterpTable::build(&m, -12.0 * delta, 12.0 * delta, 1024).unwrap();
    let patch = QuadraticFieldPatch::build(&m, [0.0, 0.0, 2.0 * delta], 5.0 * delta).unwrap();

    let probes: Vec<(f64, f64)> = (0..256)
        .map(|i| {
            let s = i as f64 / 255.0;
            (p.y0 * (1.0 - 2.0 * s), (s - 0.5) * 16.0 * delta)
        })
        .collect();

    let mut g = c.benchmark_group("field");
    g.throughput(Throughput::Elements(probes.len() as u64));
    g.bench_function("plane_table_probe", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &(y, z) in &probes {
                let pr = table.probe(black_box(y), black_box(z)).unwrap();
                acc += pr.norm + pr.grad_z;
            }
            acc
        })
    });
    g.bench_function("patch_field_and_grad", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for &(y, z) in &probes {
                let (bv, g2) =
                    patch.field_and_grad_norm_sq(black_box([0.3 * delta, 0.1 * y, z]));
                acc += bv[2] + g2;
            }
            acc
        })
    });
    g.finish();
}

fn step_options(dt: f64) -> EvolveOptions {
    EvolveOptions {
        dt,
        n_steps: 1,
        observe_every: 0,
        norm_drift_limit: 1e-6,
        boundary_limit: 1.0,
    }
}

fn bench_evolve_1d(c: &mut Criterion) {
    let m = model().unwrap();
    let p = phys();
    let delta = p.delta;
    let grid = Grid::line_z(1024, 64.0 * delta).unwrap();
    let field = SpinorField::gaussian_packet_x_polarised(grid, delta, [0.0; 3]).unwrap();
    let dt = p.t_total / 8192.0;

    c.bench_function("evolve_step_1d_nz1024", |b| {
        b.iter_batched(
            || (field.clone(), Axis1dSource::new(&m, &p, &grid).unwrap()),
            |(mut f, mut src)| {
                evolve(&mut f, &p, &mut src, &step_options(dt), |_, _| Ok(()))
                    .unwrap();
                f
            },
            BatchSize::LargeInput,
        )
    });
}

fn bench_evolve_3d(c: &mut Criterion) {
    let m = model().unwrap();
    let p = phys();
    let delta = p.delta;
    let grid = Grid::box3(
        [32, 32, 64],
        [8.0 * delta, 8.0 * delta, 16.0 * delta],
    )
    .unwrap();
    let field = SpinorField::gaussian_packet_x_polarised(grid, delta, [0.0; 3]).unwrap();
    let dt = p.t_total / 2048.0;

    let mut g = c.benchmark_group("evolve_3d");
    g.sample_size(20);
    g.throughput(Throughput::Elements(grid.len() as u64));
    g.bench_function("step_32x32x64", |b| {
        b.iter_batched(
            || {
                (
                    field.clone(),
                    SpinFieldSource::new(m.clone(), &p, 4.75 * delta).unwrap(),
                )
            },
            |(mut f, mut src)| {
                evolve(&mut f, &p, &mut src, &step_options(dt), |_, _| Ok(()))
                    .unwrap();
                f
            },
            BatchSize::LargeInput,
        )
    });
    g.finish();
}

criterion_group!(
    benches,
    bench_bessel,
    bench_field_eval,
    bench_evolve_1d,
    bench_evolve_3d
);
criterion_main!(benches);

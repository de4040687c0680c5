//! Benchmarks for the estimation and dynamics hot paths at the panel shape
//! the toolkit targets (7 variables, short annual samples) plus a larger
//! shape to expose scaling.

use bvar_core::testutil::simulate_var;
use bvar_core::{
    build_design, fit_bvar, fit_ols, irf, select_lag, stability, MinnesotaHyper, SeriesPanel,
    VarSpec,
};
use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nalgebra::{DMatrix, DVector};

fn stable_panel(n: usize, t: usize, seed: u64) -> SeriesPanel {
    let a = DMatrix::from_fn(n, n, |i, j| if i == j { 0.6 } else { 0.02 });
    let c = DVector::from_element(n, 0.1);
    simulate_var(&[a], &c, 0.3, t, seed)
}

fn bench_fit(c: &mut Criterion) {
    let small = stable_panel(7, 18, 11);
    let large = stable_panel(7, 400, 12);
    let spec = VarSpec::new(1, true, small.names().to_vec()).unwrap();
    let hyper = MinnesotaHyper::default();

    c.bench_function("fit_ols_7x18", |b| {
        let design = build_design(&small, 1, true, None).unwrap();
        b.iter(|| fit_ols(&design, &spec).unwrap())
    });
    c.bench_function("fit_bvar_7x18", |b| {
        b.iter(|| fit_bvar(&small, &spec, &hyper).unwrap())
    });
    c.bench_function("fit_bvar_7x400", |b| {
        b.iter(|| fit_bvar(&large, &spec, &hyper).unwrap())
    });
}

fn bench_selection(c: &mut Criterion) {
    let panel = stable_panel(7, 60, 21);
    let spec = VarSpec::new(1, true, panel.names().to_vec()).unwrap();
    c.bench_function("select_lag_dmax4_7x60", |b| {
        b.iter(|| select_lag(&panel, &spec, 4).unwrap())
    });
}

fn bench_dynamics(c: &mut Criterion) {
    let panel = stable_panel(7, 60, 31);
    let spec = VarSpec::new(1, true, panel.names().to_vec()).unwrap();
    let hyper = MinnesotaHyper::default();
    let (estimate, _) = fit_bvar(&panel, &spec, &hyper).unwrap();

    c.bench_function("stability_7", |b| {
        b.iter_batched(|| estimate.clone(), |e| stability(&e).unwrap(), BatchSize::SmallInput)
    });
    c.bench_function("irf_h50_7", |b| b.iter(|| irf(&estimate, 50, true).unwrap()));
}

criterion_group!(benches, bench_fit, bench_selection, bench_dynamics);
criterion_main!(benches);

//! Cross-module behaviour: whole-pipeline fits on realistic panel shapes.

use bvar_core::testutil::{simulate_var, synthetic_panel};
use bvar_core::*;
use nalgebra::{DMatrix, DVector};

/// A panel with the published study's shape: 7 variables, 18 yearly periods,
/// generated from a stable VAR(1) plus noise and then normalized.
fn annual_7x18_panel(seed: u64) -> SeriesPanel {
    let n = 7;
    let mut a1 = DMatrix::from_element(n, n, 0.02);
    for i in 0..n {
        a1[(i, i)] = 0.6;
    }
    let c = DVector::from_element(n, 0.1);
    let raw = simulate_var(&[a1], &c, 0.3, 18, seed);
    normalize(&raw).unwrap().0
}

#[test]
fn bvar_on_annual_7x18_is_stable_with_defaults() {
    let panel = annual_7x18_panel(2024);
    let spec = VarSpec::new(1, true, panel.names().to_vec()).unwrap();
    let (est, post) = fit_bvar(&panel, &spec, &MinnesotaHyper::default()).unwrap();
    assert_eq!(est.t_eff, 17);
    assert_eq!(est.source, EstimateSource::BvarPosteriorMean);
    assert!(post.v.clone().cholesky().is_some());

    let report = stability(&est).unwrap();
    assert!(report.stable, "max modulus = {}", report.max_modulus());
}

#[test]
fn ols_and_bvar_agree_on_long_samples() {
    let a1 = DMatrix::from_row_slice(2, 2, &[0.7, 0.1, -0.1, 0.6]);
    let panel = simulate_var(&[a1], &DVector::zeros(2), 0.2, 400, 7);
    let spec = VarSpec::new(1, true, panel.names().to_vec()).unwrap();
    let design = build_design(&panel, 1, true, None).unwrap();
    let ols = fit_ols(&design, &spec).unwrap();
    // loose shrinkage: posterior mean tracks OLS closely at T = 400
    let hyper = MinnesotaHyper { gamma: 1.0, ..Default::default() };
    let (bvar, _) = fit_bvar(&panel, &spec, &hyper).unwrap();
    assert!((&ols.a[0] - &bvar.a[0]).amax() < 0.02);
}

#[test]
fn lag_selection_feeds_estimation() {
    let a1 = DMatrix::from_row_slice(2, 2, &[0.8, 0.1, -0.15, 0.7]);
    let panel = simulate_var(&[a1], &DVector::zeros(2), 0.25, 120, 99);
    let spec = VarSpec::new(1, true, panel.names().to_vec()).unwrap();
    let table = select_lag(&panel, &spec, 3).unwrap();
    assert_eq!(table.rows.len(), 4);
    let chosen = table.winner(Criterion::Aic).max(1);
    let chosen_spec = VarSpec::new(chosen, true, panel.names().to_vec()).unwrap();
    let (est, _) = fit_bvar(&panel, &chosen_spec, &MinnesotaHyper::default()).unwrap();
    let ir = irf(&est, 20, false).unwrap();
    assert_eq!(ir.psi.len(), 21);
    let verdict = classify_effect(&ir, 0, 1, 1e-3);
    assert!(verdict.share_positive >= 0.0 && verdict.share_positive <= 1.0);
}

#[test]
fn univariate_scales_match_system_sample() {
    let panel = synthetic_panel(3, 60, 31);
    let s = univariate_ar_sigmas(&panel, 2, true).unwrap();
    assert_eq!(s.s.len(), 3);
    // AR residual sd cannot exceed the raw sd by much on white noise
    for (j, summary) in describe(&panel).iter().enumerate() {
        assert!(s.s[j] < 1.5 * summary.sd);
    }
}

#[test]
fn normalized_fit_round_trips_through_denormalize() {
    let panel = annual_7x18_panel(5);
    let (norm, params) = normalize(&panel).unwrap();
    let back = denormalize(&norm, &params).unwrap();
    for (a, b) in back.values().iter().zip(panel.values().iter()) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

//! Estimation toolkit for small multivariate time-series panels: classical
//! VAR by least squares, Minnesota-prior Bayesian VAR, lag-order selection,
//! companion-root stability tests, impulse responses and cumulative-effect
//! classification.
//!
//! All types are immutable after construction and every operation is a pure
//! function of its inputs, so calls are safe to issue concurrently.

pub mod dynamics;
pub mod error;
pub mod lag_select;
pub mod minnesota;
pub mod ols;
pub mod panel;

#[doc(hidden)]
pub mod testutil;

pub use dynamics::{
    classify_effect, companion, irf, stability, Direction, EffectVerdict, ImpulseResponse,
    ShockScale, StabilityReport,
};
pub use error::{Error, Result};
pub use lag_select::{criteria_row, lr_test, select_lag, CriteriaRow, Criterion, SelectionTable};
pub use minnesota::{
    build_prior, fit_bvar, posterior, MinnesotaHyper, MinnesotaPrior, PosteriorEstimate,
};
pub use ols::{
    fit_ols, fit_stats, log_likelihood, univariate_ar_sigmas, ArSigmaVector, EquationStats,
    EstimateSource, VarEstimate, VarSpec,
};
pub use panel::{
    build_design, denormalize, describe, load_panel, normalize, DesignMatrices,
    NormalizationParams, Regressor, SeriesPanel, VariableSummary,
};

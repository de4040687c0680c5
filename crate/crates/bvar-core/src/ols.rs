//! Classical VAR estimation by equation-wise least squares, residual
//! covariance under the ML convention, Gaussian log-likelihood, per-equation
//! fit statistics and the univariate AR residual scales used by the
//! Minnesota prior.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::panel::{DesignMatrices, Regressor, SeriesPanel};

/// Relative singular-value cutoff below which a design is declared singular.
pub const RANK_TOL: f64 = 1e-10;

/// Model order and variable bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarSpec {
    pub d: usize,
    pub constant: bool,
    pub variable_order: Vec<String>,
}

impl VarSpec {
    pub fn new(d: usize, constant: bool, variable_order: Vec<String>) -> Result<Self> {
        if d < 1 {
            return Err(Error::LagOutOfRange { d, t: 0 });
        }
        Ok(Self { d, constant, variable_order })
    }

    pub fn n_vars(&self) -> usize {
        self.variable_order.len()
    }
}

/// Which estimator produced a [`VarEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateSource {
    Ols,
    BvarPosteriorMean,
}

/// Per-equation goodness-of-fit numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct EquationStats {
    pub r_squared: f64,
    pub se_equation: f64,
}

/// An estimated VAR: coefficient matrices, constants, residual covariance
/// and fit diagnostics. `a[k-1][(i, j)]` is the effect of variable j at lag
/// k in equation i.
#[derive(Debug, Clone)]
pub struct VarEstimate {
    pub spec: VarSpec,
    pub a: Vec<DMatrix<f64>>,
    pub c: DVector<f64>,
    /// Residual covariance, ML divisor T_eff.
    pub sigma: DMatrix<f64>,
    pub t_eff: usize,
    pub log_l: f64,
    pub per_equation: Vec<EquationStats>,
    pub source: EstimateSource,
}

impl VarEstimate {
    pub fn n_vars(&self) -> usize {
        self.spec.n_vars()
    }
}

/// Residual standard deviations of univariate AR(d) fits, one per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ArSigmaVector {
    pub s: Vec<f64>,
}

/// Least-squares solve of X B = Y with an explicit rank check.
///
/// Returns the K x N coefficient matrix. Rank deficiency is a loud error
/// rather than a silent pseudo-inverse.
pub(crate) fn solve_least_squares(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.iter().copied().fold(0.0_f64, f64::max);
    let smin = if svd.singular_values.len() < x.ncols() {
        0.0 // fewer rows than columns: rank-deficient by construction
    } else {
        svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let tol = RANK_TOL * smax;
    if smax == 0.0 || smin <= tol {
        return Err(Error::SingularDesign { smin, tol });
    }
    let mut b = DMatrix::zeros(x.ncols(), y.ncols());
    for j in 0..y.ncols() {
        let col = svd.solve(&DMatrix::from_column_slice(x.nrows(), 1, y.column(j).as_slice()), 0.0)
            .map_err(|_| Error::SingularDesign { smin, tol })?;
        b.set_column(j, &col.column(0));
    }
    Ok(b)
}

/// Unpack a K x N stacked coefficient matrix into (A_1..A_d, c) following
/// the design layout. Column i of `b` is equation i.
pub(crate) fn unpack_coefficients(
    b: &DMatrix<f64>,
    layout: &[Regressor],
    n: usize,
    d: usize,
) -> (Vec<DMatrix<f64>>, DVector<f64>) {
    let mut a = vec![DMatrix::zeros(n, n); d];
    let mut c = DVector::zeros(n);
    for (row, reg) in layout.iter().enumerate() {
        for i in 0..n {
            match *reg {
                Regressor::Constant => c[i] = b[(row, i)],
                Regressor::Lag { var, lag } => a[lag - 1][(i, var)] = b[(row, i)],
            }
        }
    }
    (a, c)
}

fn gaussian_log_likelihood(t_eff: usize, n: usize, ln_det_sigma: f64) -> f64 {
    -(t_eff as f64 / 2.0) * (n as f64 * (1.0 + (2.0 * std::f64::consts::PI).ln()) + ln_det_sigma)
}

/// Log-determinant via Cholesky; errors if sigma is not positive definite.
pub fn ln_det_spd(sigma: &DMatrix<f64>) -> Result<f64> {
    let chol = sigma.clone().cholesky().ok_or(Error::DegenerateCovariance)?;
    Ok(2.0 * chol.l().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// Assemble a [`VarEstimate`] from solved coefficients and residuals.
///
/// `se_divisor_dof` guards the S.E. computation: with non-positive degrees
/// of freedom the standard errors are reported as NaN instead of erroring,
/// which matters for the regularized estimator on tiny samples.
pub(crate) fn assemble_estimate(
    design: &DesignMatrices,
    spec: &VarSpec,
    b: &DMatrix<f64>,
    source: EstimateSource,
) -> VarEstimate {
    let n = spec.n_vars();
    let t_eff = design.t_eff();
    let residuals = &design.y_out - &design.x_out * b;
    let sigma = residuals.transpose() * &residuals / t_eff as f64;
    let log_l = match ln_det_spd(&sigma) {
        Ok(ld) => gaussian_log_likelihood(t_eff, n, ld),
        Err(_) => f64::INFINITY, // zero-residual fit: degenerate likelihood
    };
    let per_equation = equation_stats(design, &residuals);
    let (a, c) = unpack_coefficients(b, &design.layout, n, spec.d);
    VarEstimate { spec: spec.clone(), a, c, sigma, t_eff, log_l, per_equation, source }
}

fn equation_stats(design: &DesignMatrices, residuals: &DMatrix<f64>) -> Vec<EquationStats> {
    let t_eff = design.t_eff();
    let k = design.k();
    (0..design.n_vars())
        .map(|i| {
            let y = design.y_out.column(i);
            let mean = y.iter().sum::<f64>() / t_eff as f64;
            let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
            let ssr: f64 = residuals.column(i).iter().map(|e| e * e).sum();
            let r_squared = if sst > 0.0 { 1.0 - ssr / sst } else if ssr == 0.0 { 1.0 } else { f64::NEG_INFINITY };
            let se_equation =
                if t_eff > k { (ssr / (t_eff - k) as f64).sqrt() } else { f64::NAN };
            EquationStats { r_squared, se_equation }
        })
        .collect()
}

/// Equation-wise least-squares fit of a VAR on prepared design matrices.
pub fn fit_ols(design: &DesignMatrices, spec: &VarSpec) -> Result<VarEstimate> {
    let n = spec.n_vars();
    assert_eq!(design.n_vars(), n, "design built from a different panel");
    assert_eq!(design.d, spec.d);
    let b = solve_least_squares(&design.x_out, &design.y_out)?;
    Ok(assemble_estimate(design, spec, &b, EstimateSource::Ols))
}

/// Gaussian log-likelihood of an estimate: l = -(T_eff/2) (N (1 + ln 2pi) + ln det Sigma).
pub fn log_likelihood(estimate: &VarEstimate) -> Result<f64> {
    let ld = ln_det_spd(&estimate.sigma)?;
    Ok(gaussian_log_likelihood(estimate.t_eff, estimate.n_vars(), ld))
}

/// Recompute per-equation fit statistics of an estimate against its design.
pub fn fit_stats(design: &DesignMatrices, estimate: &VarEstimate) -> Result<Vec<EquationStats>> {
    let t_eff = design.t_eff();
    let k = design.k();
    if t_eff <= k {
        return Err(Error::NonPositiveDof { t_eff, k });
    }
    let b = stack_coefficients(estimate, &design.layout);
    let residuals = &design.y_out - &design.x_out * b;
    Ok(equation_stats(design, &residuals))
}

/// Inverse of `unpack_coefficients`: K x N matrix with column i = equation i.
pub(crate) fn stack_coefficients(estimate: &VarEstimate, layout: &[Regressor]) -> DMatrix<f64> {
    let n = estimate.n_vars();
    let mut b = DMatrix::zeros(layout.len(), n);
    for (row, reg) in layout.iter().enumerate() {
        for i in 0..n {
            b[(row, i)] = match *reg {
                Regressor::Constant => estimate.c[i],
                Regressor::Lag { var, lag } => estimate.a[lag - 1][(i, var)],
            };
        }
    }
    b
}

/// Residual standard deviation of a univariate AR(d) per variable, fitted on
/// the same common sample as the system model (divisor T_eff - params).
pub fn univariate_ar_sigmas(
    panel: &SeriesPanel,
    d: usize,
    constant: bool,
) -> Result<ArSigmaVector> {
    let t = panel.n_periods();
    let params = d + usize::from(constant);
    if t.saturating_sub(d) <= params {
        return Err(Error::NonPositiveDof { t_eff: t.saturating_sub(d), k: params });
    }
    let t_eff = t - d;
    let mut s = Vec::with_capacity(panel.n_vars());
    for j in 0..panel.n_vars() {
        let col = panel.column(j);
        let mut x = DMatrix::zeros(t_eff, params);
        let mut y = DMatrix::zeros(t_eff, 1);
        for r in 0..t_eff {
            y[(r, 0)] = col[d + r];
            let mut c_idx = 0;
            if constant {
                x[(r, 0)] = 1.0;
                c_idx = 1;
            }
            for k in 1..=d {
                x[(r, c_idx + k - 1)] = col[d + r - k];
            }
        }
        let b = solve_least_squares(&x, &y)?;
        let resid = &y - &x * &b;
        let ssr: f64 = resid.iter().map(|e| e * e).sum();
        // a deterministic recursion leaves only round-off residuals
        let ss_y: f64 = y.iter().map(|v| v * v).sum();
        if ssr <= 1e-24 * ss_y.max(f64::MIN_POSITIVE) {
            return Err(Error::DegenerateScale(panel.names()[j].clone()));
        }
        let dof = t_eff - params;
        s.push((ssr / dof as f64).sqrt());
    }
    Ok(ArSigmaVector { s })
}

//! Minnesota prior construction and the conditional posterior of the
//! stacked VAR coefficient vector, plus a one-call BVAR fit.
//!
//! The posterior uses the precision-weighted form
//! V = [X'(Sigma^-1 (x) I) X + M0^-1]^-1 computed through Cholesky
//! factorizations; the Q x Q precision is never inverted element-wise.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ols::{
    assemble_estimate, fit_ols, univariate_ar_sigmas, ArSigmaVector, EstimateSource, VarEstimate,
    VarSpec,
};
use crate::panel::{build_design, DesignMatrices, SeriesPanel};

/// Hyperparameters of the Minnesota prior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinnesotaHyper {
    /// Overall tightness gamma; smaller = stronger shrinkage to the prior mean.
    pub gamma: f64,
    /// Lag decay exponent: g(k) = k^(-decay_exponent).
    pub decay_exponent: f64,
    /// Cross-variable tightness f(i,j) for i != j, in (0, 1].
    pub cross_tightness: f64,
    /// Prior standard deviation of the constant term (near-diffuse).
    pub constant_scale: f64,
}

impl Default for MinnesotaHyper {
    fn default() -> Self {
        Self { gamma: 0.1, decay_exponent: 1.0, cross_tightness: 0.5, constant_scale: 1e3 }
    }
}

impl MinnesotaHyper {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::NonPositiveScale(format!("gamma = {}", self.gamma)));
        }
        if !(self.decay_exponent > 0.0) {
            return Err(Error::NonPositiveScale(format!(
                "decay_exponent = {}",
                self.decay_exponent
            )));
        }
        if !(self.cross_tightness > 0.0 && self.cross_tightness <= 1.0) {
            return Err(Error::NonPositiveScale(format!(
                "cross_tightness = {} (need (0, 1])",
                self.cross_tightness
            )));
        }
        if !(self.constant_scale > 0.0) {
            return Err(Error::NonPositiveScale(format!(
                "constant_scale = {}",
                self.constant_scale
            )));
        }
        Ok(())
    }
}

/// Prior mean and diagonal prior covariance of the stacked coefficient
/// vector, equation-major: equation i's K coefficients are contiguous and
/// follow the design layout.
#[derive(Debug, Clone, PartialEq)]
pub struct MinnesotaPrior {
    pub mu0: DVector<f64>,
    pub m0_diag: DVector<f64>,
}

impl MinnesotaPrior {
    pub fn new(mu0: DVector<f64>, m0_diag: DVector<f64>) -> Result<Self> {
        if m0_diag.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::NonPositiveScale("prior variance".into()));
        }
        assert_eq!(mu0.len(), m0_diag.len());
        Ok(Self { mu0, m0_diag })
    }

    pub fn q(&self) -> usize {
        self.mu0.len()
    }
}

/// Posterior mean and covariance of the stacked coefficients.
#[derive(Debug, Clone)]
pub struct PosteriorEstimate {
    pub beta_b: DVector<f64>,
    pub v: DMatrix<f64>,
    pub sigma_plugin: DMatrix<f64>,
    pub hyper: MinnesotaHyper,
}

/// Prior standard deviation of the coefficient on variable j at lag k in
/// equation i: gamma * k^(-decay) * f(i,j) * s_i / s_j.
fn prior_sd(hyper: &MinnesotaHyper, s: &[f64], i: usize, j: usize, k: usize) -> f64 {
    let f = if i == j { 1.0 } else { hyper.cross_tightness };
    hyper.gamma * (k as f64).powf(-hyper.decay_exponent) * f * s[i] / s[j]
}

/// Build the Minnesota prior for an N-variable VAR(d): random-walk mean
/// (own first lag = 1, all else 0) and the four-factor variance product.
pub fn build_prior(
    hyper: &MinnesotaHyper,
    s: &ArSigmaVector,
    spec: &VarSpec,
    n: usize,
) -> Result<MinnesotaPrior> {
    hyper.validate()?;
    if s.s.len() != n {
        return Err(Error::DimensionMismatch { panel: n, params: s.s.len() });
    }
    if s.s.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::NonPositiveScale("univariate AR sigma".into()));
    }
    let k_per_eq = n * spec.d + usize::from(spec.constant);
    let q = n * k_per_eq;
    let mut mu0 = DVector::zeros(q);
    let mut m0 = DVector::zeros(q);
    let mut idx = 0;
    for i in 0..n {
        if spec.constant {
            mu0[idx] = 0.0;
            m0[idx] = hyper.constant_scale * hyper.constant_scale;
            idx += 1;
        }
        for k in 1..=spec.d {
            for j in 0..n {
                mu0[idx] = if i == j && k == 1 { 1.0 } else { 0.0 };
                let sd = prior_sd(hyper, &s.s, i, j, k);
                m0[idx] = sd * sd;
                idx += 1;
            }
        }
    }
    MinnesotaPrior::new(mu0, m0)
}

/// Conditional posterior N(beta_B, V) given a plug-in Sigma.
pub fn posterior(
    design: &DesignMatrices,
    prior: &MinnesotaPrior,
    sigma: &DMatrix<f64>,
) -> Result<PosteriorEstimate> {
    let n = design.n_vars();
    let k = design.k();
    let q = n * k;
    if prior.q() != q {
        return Err(Error::PriorDimensionMismatch { prior: prior.q(), design: q });
    }
    let sigma_chol = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("plug-in Sigma".into()))?;
    let sigma_inv = sigma_chol.inverse();

    let xtx = design.x_out.transpose() * &design.x_out;
    let xty = design.x_out.transpose() * &design.y_out;

    // precision = Sigma^-1 (x) X'X + M0^-1, equation-major blocks
    let mut precision = DMatrix::zeros(q, q);
    for bi in 0..n {
        for bj in 0..n {
            let w = sigma_inv[(bi, bj)];
            if w != 0.0 {
                let mut block = precision.view_mut((bi * k, bj * k), (k, k));
                for c in 0..k {
                    for r in 0..k {
                        block[(r, c)] += w * xtx[(r, c)];
                    }
                }
            }
        }
    }
    let mut rhs = DVector::zeros(q);
    let data_term = &xty * &sigma_inv; // column i = X'Y Sigma^-1 e_i
    for i in 0..n {
        for r in 0..k {
            rhs[i * k + r] = data_term[(r, i)];
        }
    }
    for t in 0..q {
        precision[(t, t)] += 1.0 / prior.m0_diag[t];
        rhs[t] += prior.mu0[t] / prior.m0_diag[t];
    }

    let chol = precision
        .cholesky()
        .ok_or_else(|| Error::NotPositiveDefinite("posterior precision".into()))?;
    let beta_b = chol.solve(&rhs);
    let v = chol.inverse();
    Ok(PosteriorEstimate { beta_b, v, sigma_plugin: sigma.clone(), hyper: MinnesotaHyper::default() })
}

/// Full BVAR fit: design, plug-in Sigma, AR scales, prior, posterior, all
/// packaged as a [`VarEstimate`] whose coefficients are the posterior mean.
pub fn fit_bvar(
    panel: &SeriesPanel,
    spec: &VarSpec,
    hyper: &MinnesotaHyper,
) -> Result<(VarEstimate, PosteriorEstimate)> {
    hyper.validate()?;
    if spec.variable_order != panel.names() {
        return Err(Error::VariableOrderMismatch);
    }
    let n = panel.n_vars();
    let design = build_design(panel, spec.d, spec.constant, None)?;
    let s = univariate_ar_sigmas(panel, spec.d, spec.constant)?;

    // plug-in Sigma from OLS on the same design; fall back to the diagonal
    // of univariate AR variances when the design is rank-deficient or the
    // OLS residual covariance is not positive definite
    let sigma = match fit_ols(&design, spec) {
        Ok(est) if est.sigma.clone().cholesky().is_some() => est.sigma,
        _ => DMatrix::from_diagonal(&DVector::from_iterator(n, s.s.iter().map(|v| v * v))),
    };

    let prior = build_prior(hyper, &s, spec, n)?;
    let mut post = posterior(&design, &prior, &sigma)?;
    post.hyper = *hyper;

    // unpack beta_B (equation-major) into the K x N stacked matrix
    let k = design.k();
    let b = DMatrix::from_fn(k, n, |r, i| post.beta_b[i * k + r]);
    let mut estimate = assemble_estimate(&design, spec, &b, EstimateSource::BvarPosteriorMean);
    estimate.sigma = sigma;
    estimate.log_l = crate::ols::log_likelihood(&estimate)?;
    Ok((estimate, post))
}

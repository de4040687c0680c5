//! Stability diagnostics via companion-matrix eigenvalues and
//! impulse-response analysis with the cumulative-response effect
//! classification rule.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::ols::VarEstimate;

/// Companion eigenvalues, their moduli (sorted descending) and the strict
/// stability verdict.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub roots: Vec<Complex<f64>>,
    pub moduli: Vec<f64>,
    pub stable: bool,
}

impl StabilityReport {
    pub fn max_modulus(&self) -> f64 {
        self.moduli.first().copied().unwrap_or(0.0)
    }
}

/// Shock normalization of an impulse-response computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShockScale {
    Unit,
    OneSdCholesky,
}

/// (H+1) x N x N response tensor: `psi[h][(i, j)]` is the response of
/// variable i at step h to a shock in variable j, plus running sums.
#[derive(Debug, Clone)]
pub struct ImpulseResponse {
    pub horizon: usize,
    pub psi: Vec<DMatrix<f64>>,
    pub cumulative: Vec<DMatrix<f64>>,
    pub orthogonalized: bool,
    pub shock_scale: ShockScale,
}

/// Direction assigned by the cumulative-majority rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increases,
    Decreases,
    Indeterminate,
}

impl Direction {
    pub fn label(self) -> &'static str {
        match self {
            Direction::Increases => "increases",
            Direction::Decreases => "decreases",
            Direction::Indeterminate => "indeterminate",
        }
    }
}

/// Classification of one impulse-target pair.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectVerdict {
    pub source: usize,
    pub target: usize,
    pub direction: Direction,
    /// Fraction of cumulative-response horizons h = 1..H that are > 0.
    pub share_positive: f64,
    /// Step with the largest absolute (plain) response.
    pub peak_period: usize,
    /// First h after which |response| stays below tolerance through H.
    pub settle_period: Option<usize>,
}

/// Stack the coefficient matrices into the (N d) x (N d) companion form.
/// For d = 1 this is A_1 itself.
pub fn companion(estimate: &VarEstimate) -> DMatrix<f64> {
    let n = estimate.n_vars();
    let d = estimate.spec.d;
    let m = n * d;
    let mut comp = DMatrix::zeros(m, m);
    for (k, a_k) in estimate.a.iter().enumerate() {
        comp.view_mut((0, k * n), (n, n)).copy_from(a_k);
    }
    for block in 1..d {
        for i in 0..n {
            comp[(block * n + i, (block - 1) * n + i)] = 1.0;
        }
    }
    comp
}

/// Eigen-decompose the companion matrix and test all moduli strictly
/// against the unit circle.
pub fn stability(estimate: &VarEstimate) -> Result<StabilityReport> {
    let comp = companion(estimate);
    let schur = comp.try_schur(1e-12, 10_000).ok_or(Error::EigenFailure)?;
    let roots: Vec<Complex<f64>> = schur
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    let mut moduli: Vec<f64> = roots.iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let stable = moduli.first().map_or(true, |&m| m < 1.0);
    Ok(StabilityReport { roots, moduli, stable })
}

/// Moving-average representation: psi[0] = I, psi[h] = sum A_k psi[h-k],
/// optionally right-multiplied by the lower Cholesky factor of Sigma.
pub fn irf(estimate: &VarEstimate, horizon: usize, orthogonalized: bool) -> Result<ImpulseResponse> {
    let n = estimate.n_vars();
    let d = estimate.spec.d;
    let mut psi: Vec<DMatrix<f64>> = Vec::with_capacity(horizon + 1);
    psi.push(DMatrix::identity(n, n));
    for h in 1..=horizon {
        let mut m = DMatrix::zeros(n, n);
        for k in 1..=d.min(h) {
            m += &estimate.a[k - 1] * &psi[h - k];
        }
        psi.push(m);
    }
    if orthogonalized {
        let chol = estimate
            .sigma
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NotPositiveDefinite("Sigma for orthogonalization".into()))?;
        let l = chol.l();
        for m in &mut psi {
            *m *= &l;
        }
    }
    let mut cumulative = Vec::with_capacity(horizon + 1);
    let mut acc = DMatrix::zeros(n, n);
    for m in &psi {
        acc += m;
        cumulative.push(acc.clone());
    }
    Ok(ImpulseResponse {
        horizon,
        psi,
        cumulative,
        orthogonalized,
        shock_scale: if orthogonalized { ShockScale::OneSdCholesky } else { ShockScale::Unit },
    })
}

/// Majority rule over the cumulative response at h = 1..H; impact step 0 is
/// excluded. Peak and settle periods are measured on the plain response.
pub fn classify_effect(
    ir: &ImpulseResponse,
    target: usize,
    source: usize,
    tolerance: f64,
) -> EffectVerdict {
    let h = ir.horizon;
    assert!(h >= 1, "classification needs at least one post-impact step");
    let positives = (1..=h)
        .filter(|&step| ir.cumulative[step][(target, source)] > 0.0)
        .count();
    let share_positive = positives as f64 / h as f64;
    let direction = if share_positive > 0.5 {
        Direction::Increases
    } else if share_positive < 0.5 {
        Direction::Decreases
    } else {
        Direction::Indeterminate
    };

    let mut peak_period = 0;
    let mut peak_value = f64::NEG_INFINITY;
    for step in 0..=h {
        let v = ir.psi[step][(target, source)].abs();
        if v > peak_value {
            peak_value = v;
            peak_period = step;
        }
    }

    let mut settle_period = None;
    for step in (0..=h).rev() {
        if ir.psi[step][(target, source)].abs() >= tolerance {
            break;
        }
        settle_period = Some(step);
    }

    EffectVerdict { source, target, direction, share_positive, peak_period, settle_period }
}

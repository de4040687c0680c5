//! Lag-order selection: LogL, sequential modified LR, FPE, AIC, SIC and
//! HQIC on a common effective sample, with per-criterion winners.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::ols::{fit_ols, ln_det_spd, VarSpec};
use crate::panel::{build_design, SeriesPanel};

/// Selection criteria that can nominate a lag order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    Lr,
    Fpe,
    Aic,
    Sic,
    Hqic,
}

impl Criterion {
    pub const ALL: [Criterion; 5] =
        [Criterion::Lr, Criterion::Fpe, Criterion::Aic, Criterion::Sic, Criterion::Hqic];

    pub fn label(self) -> &'static str {
        match self {
            Criterion::Lr => "lr",
            Criterion::Fpe => "fpe",
            Criterion::Aic => "aic",
            Criterion::Sic => "sic",
            Criterion::Hqic => "hqic",
        }
    }
}

/// One row of the selection table.
#[derive(Debug, Clone, PartialEq)]
pub struct CriteriaRow {
    pub lag: usize,
    pub log_l: f64,
    /// Sequential modified LR statistic; absent at the smallest lag.
    pub lr: Option<f64>,
    pub lr_reject: Option<bool>,
    pub fpe: f64,
    pub aic: f64,
    pub sic: f64,
    pub hqic: f64,
    pub n_total: usize,
    pub n_per_eq: usize,
}

/// Criteria rows for lag 0..d_max plus the per-criterion winning lag.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTable {
    pub rows: Vec<CriteriaRow>,
    pub winners: Vec<(Criterion, usize)>,
}

impl SelectionTable {
    pub fn winner(&self, criterion: Criterion) -> usize {
        self.winners.iter().find(|(c, _)| *c == criterion).map(|(_, l)| *l).unwrap()
    }
}

/// Per-observation-scaled information criteria and FPE for one candidate.
pub fn criteria_row(
    log_l: f64,
    ln_det_sigma: f64,
    t_eff: usize,
    n: usize,
    n_per_eq: usize,
) -> Result<CriteriaRow> {
    if t_eff <= n_per_eq {
        return Err(Error::FpeUndefined { t_eff, n_per_eq });
    }
    if t_eff <= 2 {
        // ln ln T_eff needs T_eff > e
        return Err(Error::HqicDomain(t_eff));
    }
    let t = t_eff as f64;
    let n_total = n * n_per_eq;
    let penalty = n_total as f64 / t;
    let aic = -2.0 * log_l / t + 2.0 * penalty;
    let sic = -2.0 * log_l / t + penalty * t.ln();
    let hqic = -2.0 * log_l / t + 2.0 * penalty * t.ln().ln();
    let fpe = ((t + n_per_eq as f64) / (t - n_per_eq as f64)).powi(n as i32) * ln_det_sigma.exp();
    Ok(CriteriaRow {
        lag: 0,
        log_l,
        lr: None,
        lr_reject: None,
        fpe,
        aic,
        sic,
        hqic,
        n_total,
        n_per_eq,
    })
}

/// Outcome of one sequential modified LR step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrOutcome {
    pub stat: f64,
    pub reject: bool,
}

/// Small-sample modified LR statistic ((T_eff - m)/T_eff) * 2 (l1 - l0)
/// against the chi-square upper-alpha quantile.
pub fn lr_test(
    log_l_curr: f64,
    log_l_prev: f64,
    t_eff: usize,
    m: usize,
    alpha: f64,
    df: usize,
) -> Result<LrOutcome> {
    if m >= t_eff {
        return Err(Error::DegenerateLrModification { m, t_eff });
    }
    debug_assert!(log_l_curr >= log_l_prev - 1e-9);
    let stat = ((t_eff - m) as f64 / t_eff as f64) * 2.0 * (log_l_curr - log_l_prev);
    let crit = ChiSquared::new(df as f64)
        .expect("df > 0")
        .inverse_cdf(1.0 - alpha);
    Ok(LrOutcome { stat, reject: stat > crit })
}

/// Fit every candidate order on the common sample and assemble the table.
pub fn select_lag(panel: &SeriesPanel, base: &VarSpec, d_max: usize) -> Result<SelectionTable> {
    let t = panel.n_periods();
    let n = panel.n_vars();
    if base.variable_order != panel.names() {
        return Err(Error::VariableOrderMismatch);
    }
    if d_max > 0 && t.saturating_sub(d_max) < n * d_max + 2 {
        return Err(Error::InsufficientSample { t, d_max, n });
    }
    let t_eff = t - d_max;

    let mut rows = Vec::with_capacity(d_max + 1);
    for d in 0..=d_max {
        let (log_l, ln_det, n_per_eq) = if d == 0 {
            let (log_l, ln_det) = constants_only_fit(panel, t_eff, base.constant)?;
            (log_l, ln_det, usize::from(base.constant))
        } else {
            let design = build_design(panel, d, base.constant, Some(d_max))?;
            let spec = VarSpec::new(d, base.constant, base.variable_order.clone())?;
            let est = fit_ols(&design, &spec)?;
            let ln_det = ln_det_spd(&est.sigma)?;
            (est.log_l, ln_det, design.k())
        };
        let mut row = criteria_row(log_l, ln_det, t_eff, n, n_per_eq)?;
        row.lag = d;
        rows.push(row);
    }

    // sequential modified LR from lag 1 upward; m = parameters per equation
    // of the larger model, df = N^2 per step
    for d in 1..=d_max {
        let outcome = lr_test(
            rows[d].log_l,
            rows[d - 1].log_l,
            t_eff,
            rows[d].n_per_eq,
            0.05,
            n * n,
        )?;
        rows[d].lr = Some(outcome.stat);
        rows[d].lr_reject = Some(outcome.reject);
    }

    let winners = Criterion::ALL
        .iter()
        .map(|&c| (c, pick_winner(&rows, c)))
        .collect();
    Ok(SelectionTable { rows, winners })
}

fn pick_winner(rows: &[CriteriaRow], criterion: Criterion) -> usize {
    match criterion {
        Criterion::Lr => rows
            .iter()
            .rev()
            .find(|r| r.lr_reject == Some(true))
            .map(|r| r.lag)
            .unwrap_or(0),
        _ => {
            let value = |r: &CriteriaRow| match criterion {
                Criterion::Fpe => r.fpe,
                Criterion::Aic => r.aic,
                Criterion::Sic => r.sic,
                Criterion::Hqic => r.hqic,
                Criterion::Lr => unreachable!(),
            };
            // ties break toward the smaller lag: strict improvement required
            let mut best = 0;
            for r in rows.iter().skip(1) {
                if value(r) < value(&rows[best]) {
                    best = r.lag;
                }
            }
            best
        }
    }
}

/// LogL and ln det Sigma of the lag-0 model on the trimmed common sample.
fn constants_only_fit(panel: &SeriesPanel, t_eff: usize, constant: bool) -> Result<(f64, f64)> {
    let t = panel.n_periods();
    let n = panel.n_vars();
    let skip = t - t_eff;
    let mut sigma = nalgebra::DMatrix::zeros(n, n);
    let means: Vec<f64> = (0..n)
        .map(|j| {
            if constant {
                (skip..t).map(|r| panel.values()[(r, j)]).sum::<f64>() / t_eff as f64
            } else {
                0.0
            }
        })
        .collect();
    for r in skip..t {
        for i in 0..n {
            for j in 0..n {
                sigma[(i, j)] += (panel.values()[(r, i)] - means[i])
                    * (panel.values()[(r, j)] - means[j]);
            }
        }
    }
    sigma /= t_eff as f64;
    let ln_det = ln_det_spd(&sigma)?;
    let log_l = -(t_eff as f64 / 2.0)
        * (n as f64 * (1.0 + (2.0 * std::f64::consts::PI).ln()) + ln_det);
    Ok((log_l, ln_det))
}

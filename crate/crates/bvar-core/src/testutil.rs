//! Deterministic fixture generators shared by the test suites and benches.
//!
//! A hand-rolled LCG keeps fixtures byte-stable across platforms and rand
//! version bumps.

use nalgebra::{DMatrix, DVector};

use crate::panel::SeriesPanel;

/// Minimal LCG (Numerical Recipes constants) with Box-Muller normals.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
    spare: Option<f64>,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Self { state: seed.wrapping_mul(2862933555777941757).wrapping_add(1), spare: None }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        self.state
    }

    /// Uniform in (0, 1).
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Standard normal via Box-Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Random panel of i.i.d. standard normals, `n` variables by `t` periods.
pub fn synthetic_panel(n: usize, t: usize, seed: u64) -> SeriesPanel {
    let mut rng = Lcg::new(seed);
    let values = DMatrix::from_fn(t, n, |_, _| rng.normal());
    let names = (0..n).map(|j| format!("v{}", j + 1)).collect();
    let times = (0..t).map(|i| format!("{}", 2000 + i)).collect();
    SeriesPanel::new(names, times, values).unwrap()
}

/// Simulate `t` periods of y_t = c + sum_k A_k y_{t-k} + noise_sd * eps_t.
///
/// `coeffs` holds one N x N matrix per lag. A burn-in of 50 periods is
/// discarded so the sample starts near the stationary distribution.
pub fn simulate_var(
    coeffs: &[DMatrix<f64>],
    constant: &DVector<f64>,
    noise_sd: f64,
    t: usize,
    seed: u64,
) -> SeriesPanel {
    let n = constant.len();
    let d = coeffs.len();
    let burn = 50;
    let mut rng = Lcg::new(seed);
    let mut history: Vec<DVector<f64>> = vec![DVector::zeros(n); d];
    let mut kept: Vec<DVector<f64>> = Vec::with_capacity(t);
    for step in 0..burn + t {
        let mut y = constant.clone();
        for (k, a) in coeffs.iter().enumerate() {
            y += a * &history[k];
        }
        for i in 0..n {
            y[i] += noise_sd * rng.normal();
        }
        history.rotate_right(1);
        history[0] = y.clone();
        if step >= burn {
            kept.push(y);
        }
    }
    let values = DMatrix::from_fn(t, n, |i, j| kept[i][j]);
    let names = (0..n).map(|j| format!("v{}", j + 1)).collect();
    let times = (0..t).map(|i| format!("{}", 2000 + i)).collect();
    SeriesPanel::new(names, times, values).unwrap()
}

/// The 7x7 lag-1 coefficient matrix and constants published for the Beijing
/// model, read in equation-major orientation: row i holds equation i's
/// coefficients on lagged variables 1..7. Eigenvalue moduli are unaffected
/// by transposition, so the stability check is orientation-proof.
pub fn beijing_coefficients() -> (DMatrix<f64>, DVector<f64>) {
    let a1 = DMatrix::from_row_slice(
        7,
        7,
        &[
            0.66, -0.14, 0.03, 0.06, -0.28, 0.09, 0.76,
            0.08, 0.71, -0.13, 0.63, -0.46, 0.35, 0.11,
            0.11, -0.12, 0.67, 0.28, 0.79, 0.36, 0.45,
            -0.06, 0.50, -0.04, 0.26, 0.28, 0.19, 0.22,
            0.15, 0.14, 0.21, 0.34, -0.02, 0.10, -0.04,
            -0.27, -0.30, 0.37, -0.48, 0.15, 0.17, 0.53,
            0.15, 0.06, -0.04, 0.03, -0.02, 0.05, 0.19,
        ],
    );
    let c = DVector::from_row_slice(&[-0.03, 0.08, 0.04, 0.02, 0.34, -0.11, -0.12]);
    (a1, c)
}

/// Variable names matching [`beijing_coefficients`] ordering.
pub fn beijing_names() -> Vec<String> {
    [
        "accidents",
        "population",
        "gdp",
        "private_vehicles",
        "bus_ownership",
        "subway_rail",
        "road_avg_speed",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

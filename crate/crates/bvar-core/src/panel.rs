//! Panel data model: CSV ingestion, min-max normalization and construction
//! of the stacked regression matrices shared by both estimators.

use std::cmp::Ordering;
use std::io::Read;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// A named multivariate time series: T periods by N variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPanel {
    names: Vec<String>,
    times: Vec<String>,
    values: DMatrix<f64>,
}

/// Compare period labels numerically when both parse as integers,
/// lexicographically otherwise.
fn time_cmp(a: &str, b: &str) -> Ordering {
    match (a.trim().parse::<i64>(), b.trim().parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

impl SeriesPanel {
    /// Build a panel from parts, enforcing all invariants.
    pub fn new(names: Vec<String>, times: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::NoVariables);
        }
        if times.len() < 2 {
            return Err(Error::TooFewPeriods(times.len()));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        for (i, w) in times.windows(2).enumerate() {
            if time_cmp(&w[0], &w[1]) != Ordering::Less {
                return Err(Error::NonIncreasingTimes {
                    row: i + 2,
                    prev: w[0].clone(),
                    curr: w[1].clone(),
                });
            }
        }
        assert_eq!(values.nrows(), times.len());
        assert_eq!(values.ncols(), names.len());
        Ok(Self { names, times, values })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn times(&self) -> &[String] {
        &self.times
    }

    /// T x N value matrix, row = period, column = variable.
    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Number of variables N.
    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    /// Number of periods T.
    pub fn n_periods(&self) -> usize {
        self.times.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j).iter().copied().collect()
    }
}

/// Per-variable (min, max) pairs captured when normalizing.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationParams {
    bounds: Vec<(f64, f64)>,
}

impl NormalizationParams {
    /// Rejects any variable with max <= min.
    pub fn new(bounds: Vec<(f64, f64)>, names: &[String]) -> Result<Self> {
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            if !(hi > lo) {
                return Err(Error::ZeroRange(names[j].clone()));
            }
        }
        Ok(Self { bounds })
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }
}

/// One regressor column of the design matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regressor {
    Constant,
    /// Variable `var` (panel index) at lag `lag` (1-based).
    Lag { var: usize, lag: usize },
}

/// Stacked regression matrices for a VAR(d): Y_out = X_out * B + E.
#[derive(Debug, Clone)]
pub struct DesignMatrices {
    pub y_out: DMatrix<f64>,
    pub x_out: DMatrix<f64>,
    /// Column descriptors of `x_out`: optional constant, then lag-k blocks
    /// in panel variable order.
    pub layout: Vec<Regressor>,
    pub d: usize,
    pub constant: bool,
}

impl DesignMatrices {
    /// Effective sample size (usable rows).
    pub fn t_eff(&self) -> usize {
        self.y_out.nrows()
    }

    /// Regressor count K.
    pub fn k(&self) -> usize {
        self.x_out.ncols()
    }

    pub fn n_vars(&self) -> usize {
        self.y_out.ncols()
    }
}

/// Parse a `time,name1,...,nameN` CSV stream into a validated panel.
pub fn load_panel<R: Read>(source: R) -> Result<SeriesPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(source);

    let header = reader.headers()?.clone();
    if header.is_empty() || !header[0].eq_ignore_ascii_case("time") {
        return Err(Error::MalformedHeader);
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    if names.is_empty() {
        return Err(Error::NoVariables);
    }
    let n = names.len();

    let mut times = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let row_no = idx + 2; // 1-based, counting the header
        if record.len() != n + 1 {
            return Err(Error::RaggedRow {
                row: row_no,
                expected: n + 1,
                found: record.len(),
            });
        }
        times.push(record[0].to_owned());
        let mut row = Vec::with_capacity(n);
        for (j, cell) in record.iter().skip(1).enumerate() {
            if cell.is_empty() {
                return Err(Error::MissingValue { row: row_no, column: names[j].clone() });
            }
            let v: f64 = cell.parse().map_err(|_| Error::NonNumericCell {
                row: row_no,
                column: names[j].clone(),
                cell: cell.to_owned(),
            })?;
            row.push(v);
        }
        rows.push(row);
    }

    if rows.len() < 2 {
        return Err(Error::TooFewPeriods(rows.len()));
    }
    let values = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
    SeriesPanel::new(names, times, values)
}

/// Min-max rescale every variable to [0, 1] over the full panel.
pub fn normalize(panel: &SeriesPanel) -> Result<(SeriesPanel, NormalizationParams)> {
    let bounds: Vec<(f64, f64)> = (0..panel.n_vars())
        .map(|j| {
            let col = panel.values.column(j);
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (lo, hi)
        })
        .collect();
    let params = NormalizationParams::new(bounds, panel.names())?;

    let values = DMatrix::from_fn(panel.n_periods(), panel.n_vars(), |i, j| {
        let (lo, hi) = params.bounds[j];
        (panel.values[(i, j)] - lo) / (hi - lo)
    });
    let normalized = SeriesPanel::new(panel.names.clone(), panel.times.clone(), values)?;
    Ok((normalized, params))
}

/// Exact inverse of [`normalize`] up to round-off.
pub fn denormalize(panel: &SeriesPanel, params: &NormalizationParams) -> Result<SeriesPanel> {
    if params.len() != panel.n_vars() {
        return Err(Error::DimensionMismatch { panel: panel.n_vars(), params: params.len() });
    }
    let values = DMatrix::from_fn(panel.n_periods(), panel.n_vars(), |i, j| {
        let (lo, hi) = params.bounds[j];
        lo + panel.values[(i, j)] * (hi - lo)
    });
    SeriesPanel::new(panel.names.clone(), panel.times.clone(), values)
}

/// Build the lagged regression matrices for a VAR(d).
///
/// `trim_to` discards the first `d_max - d` usable rows so every candidate
/// order in a lag-selection sweep shares one effective sample.
pub fn build_design(
    panel: &SeriesPanel,
    d: usize,
    constant: bool,
    trim_to: Option<usize>,
) -> Result<DesignMatrices> {
    let t = panel.n_periods();
    let n = panel.n_vars();
    if d < 1 || d > t.saturating_sub(2) {
        return Err(Error::LagOutOfRange { d, t });
    }
    let d_max = trim_to.unwrap_or(d);
    if d_max < d {
        return Err(Error::BadTrim { d, d_max });
    }
    if d_max > t.saturating_sub(2) {
        return Err(Error::LagOutOfRange { d: d_max, t });
    }

    let skip = d_max - d;
    let rows = t - d_max;
    let k = n * d + usize::from(constant);

    let mut layout = Vec::with_capacity(k);
    if constant {
        layout.push(Regressor::Constant);
    }
    for lag in 1..=d {
        for var in 0..n {
            layout.push(Regressor::Lag { var, lag });
        }
    }

    let mut y_out = DMatrix::zeros(rows, n);
    let mut x_out = DMatrix::zeros(rows, k);
    for r in 0..rows {
        let t_idx = d + skip + r; // response period
        for j in 0..n {
            y_out[(r, j)] = panel.values[(t_idx, j)];
        }
        for (c, reg) in layout.iter().enumerate() {
            x_out[(r, c)] = match *reg {
                Regressor::Constant => 1.0,
                Regressor::Lag { var, lag } => panel.values[(t_idx - lag, var)],
            };
        }
    }

    Ok(DesignMatrices { y_out, x_out, layout, d, constant })
}

/// Per-variable summary statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableSummary {
    pub name: String,
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    /// Sample standard deviation, (T-1) denominator.
    pub sd: f64,
}

/// Summary statistics per variable, Table-style.
pub fn describe(panel: &SeriesPanel) -> Vec<VariableSummary> {
    let t = panel.n_periods() as f64;
    (0..panel.n_vars())
        .map(|j| {
            let col = panel.column(j);
            let mean = col.iter().sum::<f64>() / t;
            let ss: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
            let sd = (ss / (t - 1.0)).sqrt();
            let mut sorted = col.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mid = sorted.len() / 2;
            let median = if sorted.len() % 2 == 0 {
                (sorted[mid - 1] + sorted[mid]) / 2.0
            } else {
                sorted[mid]
            };
            VariableSummary {
                name: panel.names[j].clone(),
                mean,
                median,
                min: sorted[0],
                max: *sorted.last().unwrap(),
                sd,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn panel_from(csv: &str) -> Result<SeriesPanel> {
        load_panel(csv.as_bytes())
    }

    #[test]
    fn minimal_panel() {
        let p = panel_from("time,a\n2003,1.0\n2004,2.0\n").unwrap();
        assert_eq!(p.n_vars(), 1);
        assert_eq!(p.n_periods(), 2);
    }

    #[test]
    fn blank_cell_names_row_and_column() {
        let err = panel_from("time,a,b\n2003,1.0,2.0\n2004,,3.0\n").unwrap_err();
        match err {
            Error::MissingValue { row, column } => {
                assert_eq!(row, 3);
                assert_eq!(column, "a");
            }
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn ragged_row_rejected() {
        let err = panel_from("time,a,b\n2003,1.0,2.0\n2004,1.0\n").unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 3, .. }));
    }

    #[test]
    fn non_numeric_cell_rejected() {
        let err = panel_from("time,a\n2003,1.0\n2004,xyz\n").unwrap_err();
        assert!(matches!(err, Error::NonNumericCell { .. }));
    }

    #[test]
    fn duplicate_names_rejected() {
        let err = panel_from("time,a,a\n2003,1,2\n2004,3,4\n").unwrap_err();
        assert!(matches!(err, Error::DuplicateName(_)));
    }

    #[test]
    fn times_must_increase_numerically() {
        let err = panel_from("time,a\n2004,1\n2003,2\n").unwrap_err();
        assert!(matches!(err, Error::NonIncreasingTimes { .. }));
        // "9" < "10" numerically even though "10" < "9" lexicographically
        assert!(panel_from("time,a\n9,1\n10,2\n").is_ok());
    }

    #[test]
    fn too_few_periods() {
        let err = panel_from("time,a\n2003,1\n").unwrap_err();
        assert!(matches!(err, Error::TooFewPeriods(1)));
    }

    #[test]
    fn annual_7x18_panel() {
        let mut csv = String::from("time,v1,v2,v3,v4,v5,v6,v7\n");
        for t in 0..18 {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                2003 + t,
                t as f64,
                (t * t) as f64,
                t as f64 + 0.5,
                (t as f64).sin(),
                (t as f64).cos(),
                t as f64 * 2.0,
                t as f64 - 3.0
            ));
        }
        let p = panel_from(&csv).unwrap();
        assert_eq!(p.n_vars(), 7);
        assert_eq!(p.n_periods(), 18);
    }

    #[test]
    fn normalize_table1_accidents() {
        // Beijing accidents bounds from published summary statistics
        let csv = "time,acc\n2003,12053\n2004,4181\n2005,2639\n";
        let p = panel_from(csv).unwrap();
        let (norm, params) = normalize(&p).unwrap();
        assert_eq!(params.bounds()[0], (2639.0, 12053.0));
        assert_relative_eq!(norm.values()[(0, 0)], 1.0);
        assert_relative_eq!(norm.values()[(2, 0)], 0.0);
        assert!((norm.values()[(1, 0)] - 0.16379).abs() < 1e-5);
    }

    #[test]
    fn constant_column_is_error() {
        let p = panel_from("time,a,b\n2003,1,5\n2004,2,5\n").unwrap();
        let err = normalize(&p).unwrap_err();
        match err {
            Error::ZeroRange(name) => assert_eq!(name, "b"),
            e => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn denormalize_boundary_and_midpoint() {
        let names = vec!["a".to_string(), "b".to_string()];
        let times = vec!["1".to_string(), "2".to_string()];
        let values = DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 1.0, 1.0]);
        let p = SeriesPanel::new(names.clone(), times, values).unwrap();
        let params = NormalizationParams::new(vec![(5.0, 9.0), (2.0, 4.0)], &names).unwrap();
        let back = denormalize(&p, &params).unwrap();
        assert_relative_eq!(back.values()[(0, 0)], 5.0);
        assert_relative_eq!(back.values()[(0, 1)], 3.0);
        assert_relative_eq!(back.values()[(1, 0)], 9.0);
    }

    #[test]
    fn denormalize_dimension_mismatch() {
        let p = panel_from("time,a\n2003,1\n2004,2\n").unwrap();
        let params = NormalizationParams::new(
            vec![(0.0, 1.0), (0.0, 1.0)],
            &["x".to_string(), "y".to_string()],
        )
        .unwrap();
        assert!(matches!(denormalize(&p, &params), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn design_scalar_lag1() {
        let p = panel_from("time,a\n1,1\n2,2\n3,3\n").unwrap();
        let dm = build_design(&p, 1, false, None).unwrap();
        assert_eq!(dm.y_out.as_slice(), &[2.0, 3.0]);
        assert_eq!(dm.x_out.as_slice(), &[1.0, 2.0]);
        assert_eq!(dm.layout, vec![Regressor::Lag { var: 0, lag: 1 }]);

        let dm_c = build_design(&p, 1, true, None).unwrap();
        assert_eq!(dm_c.x_out.row(0).iter().copied().collect::<Vec<_>>(), vec![1.0, 1.0]);
        assert_eq!(dm_c.x_out.row(1).iter().copied().collect::<Vec<_>>(), vec![1.0, 2.0]);
    }

    #[test]
    fn design_out_of_range() {
        let p = panel_from("time,a\n1,1\n2,2\n3,3\n").unwrap();
        assert!(matches!(build_design(&p, 2, false, None), Err(Error::LagOutOfRange { .. })));
        assert!(matches!(build_design(&p, 0, false, None), Err(Error::LagOutOfRange { .. })));
    }

    #[test]
    fn design_7x18_common_sample() {
        let p = crate::testutil::synthetic_panel(7, 18, 42);
        let dm = build_design(&p, 1, true, Some(1)).unwrap();
        assert_eq!(dm.t_eff(), 17);
        assert_eq!(dm.k(), 8);
    }

    #[test]
    fn design_reconstructs_lagged_values() {
        let p = crate::testutil::synthetic_panel(3, 12, 7);
        let d = 2;
        let dm = build_design(&p, d, true, None).unwrap();
        assert_eq!(dm.t_eff(), 10);
        for r in 0..dm.t_eff() {
            for (c, reg) in dm.layout.iter().enumerate() {
                if let Regressor::Lag { var, lag } = *reg {
                    assert_eq!(dm.x_out[(r, c)], p.values()[(d + r - lag, var)]);
                }
            }
        }
    }

    #[test]
    fn describe_hand_examples() {
        let p = panel_from("time,a\n1,1\n2,2\n3,3\n").unwrap();
        let s = &describe(&p)[0];
        assert_relative_eq!(s.mean, 2.0);
        assert_relative_eq!(s.median, 2.0);
        assert_relative_eq!(s.sd, 1.0);

        let p = panel_from("time,a\n1,1\n2,1\n3,1\n4,5\n").unwrap();
        assert_relative_eq!(describe(&p)[0].median, 1.0);
    }

    #[test]
    fn describe_matches_brute_force() {
        let p = crate::testutil::synthetic_panel(1, 18, 9);
        let col = p.column(0);
        let s = &describe(&p)[0];
        // spreadsheet-style recomputation
        let mean = col.iter().sum::<f64>() / 18.0;
        let ss: f64 = col.iter().map(|v| (v - mean) * (v - mean)).sum();
        assert_relative_eq!(s.mean, mean, max_relative = 1e-12);
        assert_relative_eq!(s.sd * s.sd * 17.0, ss, max_relative = 1e-9);
    }
}

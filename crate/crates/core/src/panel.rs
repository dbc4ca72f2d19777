//! Time-series panels and their forward-difference derivative series.

use crate::error::{Error, Result};

/// `d` equi-spaced series of common length `N`, sampled every `dt`.
///
/// Rows are variables, columns are time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPanel {
    rows: Vec<Vec<f64>>,
    dt: f64,
    labels: Vec<String>,
}

impl TimeSeriesPanel {
    /// Builds a panel, checking `d >= 2`, `N >= d + 3`, `dt > 0` and finiteness.
    ///
    /// Labels default to `X1..Xd` when `labels` is `None`.
    pub fn new(rows: Vec<Vec<f64>>, dt: f64, labels: Option<Vec<String>>) -> Result<Self> {
        let d = rows.len();
        if d < 2 {
            return Err(Error::InvalidPanel(format!(
                "need at least 2 variables, got {d}"
            )));
        }
        let panel = Self::build(rows, dt, labels)?;
        let n = panel.len();
        if n < d + 3 {
            return Err(Error::InvalidPanel(format!(
                "need at least d + 3 = {} samples, got {n}",
                d + 3
            )));
        }
        Ok(panel)
    }

    /// Shape checks only (`d >= 1`, equal lengths, finite values, `dt > 0`).
    pub(crate) fn build(rows: Vec<Vec<f64>>, dt: f64, labels: Option<Vec<String>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidPanel("panel has no variables".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidPanel(format!(
                "dt must be positive, got {dt}"
            )));
        }
        let n = rows[0].len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidPanel(format!(
                    "row {i} has length {} but row 0 has length {n}",
                    row.len()
                )));
            }
            if let Some(t) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidPanel(format!(
                    "non-finite value in variable {i} at step {t}"
                )));
            }
        }
        let labels = match labels {
            Some(l) if l.len() == rows.len() => l,
            Some(l) => {
                return Err(Error::InvalidPanel(format!(
                    "{} labels for {} variables",
                    l.len(),
                    rows.len()
                )))
            }
            None => (1..=rows.len()).map(|i| format!("X{i}")).collect(),
        };
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidPanel(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self { rows, dt, labels })
    }

    /// Number of variables.
    pub fn d(&self) -> usize {
        self.rows.len()
    }

    /// Number of time steps.
    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// New panel made of the given variables, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.d()) {
            return Err(Error::InvalidArgument(format!(
                "variable index {bad} out of range for d = {}",
                self.d()
            )));
        }
        let rows = indices.iter().map(|&i| self.rows[i].clone()).collect();
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        Self::new(rows, self.dt, Some(labels))
    }
}

/// Forward-difference derivatives `(X[n+k] - X[n]) / (k dt)` of every row.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSeries {
    rows: Vec<Vec<f64>>,
    k: usize,
}

impl DerivedSeries {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of derivative samples, `N - k`.
    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Euler forward difference of a single series with stride `k`.
pub fn forward_difference(series: &[f64], k: usize, dt: f64) -> Vec<f64> {
    let span = k as f64 * dt;
    series
        .iter()
        .zip(series.iter().skip(k))
        .map(|(now, ahead)| (ahead - now) / span)
        .collect()
}

/// Differences every row of `panel` with stride `k`, `1 <= k <= N - 1`.
///
/// The result has `N - k` columns; column `n` pairs with panel column `n`.
pub fn derive_series(panel: &TimeSeriesPanel, k: usize) -> Result<DerivedSeries> {
    let n = panel.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidArgument(format!(
            "differencing stride k = {k} outside [1, N - 1] for N = {n}"
        )));
    }
    let rows = panel
        .rows()
        .iter()
        .map(|row| forward_difference(row, k, panel.dt()))
        .collect();
    Ok(DerivedSeries { rows, k })
}

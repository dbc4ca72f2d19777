//! Sample statistics and the per-target maximum likelihood fit of the
//! linear model `dX_i/dt = f_i + Σ_j a_ij X_j + noise`.
//!
//! Covariances use the aligned sample count `N - k` as divisor. Only ratios
//! of covariances enter the flow estimates, so the divisor cancels there.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::panel::{DerivedSeries, TimeSeriesPanel};

/// Largest condition number of `C` accepted before a fit is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Everything the estimators need from a panel and its derivative series.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticsBundle {
    /// Sample means of the aligned panel columns.
    pub means: Vec<f64>,
    /// Sample means of the derivative series.
    pub dot_means: Vec<f64>,
    /// Covariance matrix `C`, entry `(i, j)` is `C_ij`.
    pub cov: DMatrix<f64>,
    /// Entry `(j, i)` is `C_{j,di}`, the covariance of `X_j` with `dX_i/dt`.
    pub cross_cov: DMatrix<f64>,
    pub det: f64,
    /// Aligned sample count `N - k`.
    pub n_used: usize,
    pub k: usize,
    pub dt: f64,
    eigenvalues: Vec<f64>,
}

impl StatisticsBundle {
    pub fn d(&self) -> usize {
        self.means.len()
    }

    /// Condition number of `C + ridge·I` (infinite when not positive definite).
    pub fn condition(&self, ridge: f64) -> f64 {
        let lo = self
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
            + ridge;
        let hi = self
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
            + ridge;
        if lo <= 0.0 {
            f64::INFINITY
        } else {
            hi / lo
        }
    }

    /// `C_ij`.
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.cov[(i, j)]
    }

    /// `C_{j,di}`.
    pub fn c_dot(&self, j: usize, i: usize) -> f64 {
        self.cross_cov[(j, i)]
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn covariance(xs: &[f64], mx: f64, ys: &[f64], my: f64) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / xs.len() as f64
}

/// Means, `C`, and `C_{j,di}` over the `N - k` aligned samples.
pub fn compute_statistics(
    panel: &TimeSeriesPanel,
    derived: &DerivedSeries,
) -> Result<StatisticsBundle> {
    let d = panel.d();
    let n_used = derived.len();
    if derived.rows().len() != d || n_used + derived.k() != panel.len() {
        return Err(Error::InvalidArgument(
            "derived series does not match the panel".into(),
        ));
    }
    for i in 0..d {
        let row = &panel.row(i)[..n_used];
        if row.iter().all(|&v| v == row[0]) {
            return Err(Error::DegenerateInput {
                index: i,
                label: panel.labels()[i].clone(),
            });
        }
    }

    let x: Vec<&[f64]> = (0..d).map(|i| &panel.row(i)[..n_used]).collect();
    let means: Vec<f64> = x.iter().map(|r| mean(r)).collect();
    let dot_means: Vec<f64> = derived.rows().iter().map(|r| mean(r)).collect();

    let mut cov = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let c = covariance(x[i], means[i], x[j], means[j]);
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
    }
    let cross_cov = DMatrix::from_fn(d, d, |j, i| {
        covariance(x[j], means[j], derived.row(i), dot_means[i])
    });

    for i in 0..d {
        if cov[(i, i)] <= 0.0 {
            return Err(Error::DegenerateInput {
                index: i,
                label: panel.labels()[i].clone(),
            });
        }
    }

    let det = cov.clone().lu().determinant();
    let eigenvalues = cov
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();

    Ok(StatisticsBundle {
        means,
        dot_means,
        cov,
        cross_cov,
        det,
        n_used,
        k: derived.k(),
        dt: panel.dt(),
        eigenvalues,
    })
}

/// Maximum likelihood fit of the linear model for one target variable.
#[derive(Debug, Clone, PartialEq)]
pub struct RowMLE {
    pub target: usize,
    /// Intercept `f_i`.
    pub f_hat: f64,
    /// Coefficients `a_i1 .. a_id`.
    pub a_hat: Vec<f64>,
    /// Noise variance rate `g_ii = b_i²`.
    pub g_hat: f64,
    /// Residual sum of squares `Q_{N,i}`.
    pub residual_ss: f64,
}

impl RowMLE {
    /// Residuals `dX_i/dt - f_i - Σ_j a_ij X_j` over the aligned samples.
    pub fn residuals<'a>(
        &'a self,
        panel: &'a TimeSeriesPanel,
        derived: &'a DerivedSeries,
    ) -> impl Iterator<Item = f64> + 'a {
        let target = derived.row(self.target);
        (0..derived.len()).map(move |n| {
            let fitted = self.f_hat
                + self
                    .a_hat
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * panel.row(j)[n])
                    .sum::<f64>();
            target[n] - fitted
        })
    }
}

/// Solves the normal equations `(C + ridge·I) a = C_{·,di}` for target `i`.
///
/// `ridge` is added to the diagonal of `C`; pass `0.0` for the plain MLE.
/// Fails with [`Error::SingularCovariance`] when the (regularized) covariance
/// has condition number above [`MAX_CONDITION`].
pub fn fit_row(
    stats: &StatisticsBundle,
    panel: &TimeSeriesPanel,
    derived: &DerivedSeries,
    i: usize,
    ridge: f64,
) -> Result<RowMLE> {
    let d = stats.d();
    if i >= d {
        return Err(Error::InvalidArgument(format!(
            "target {i} out of range for d = {d}"
        )));
    }
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "ridge must be non-negative, got {ridge}"
        )));
    }
    let condition = stats.condition(ridge);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularCovariance { condition });
    }

    let mut system = stats.cov.clone();
    for l in 0..d {
        system[(l, l)] += ridge;
    }
    let rhs = DVector::from_fn(d, |j, _| stats.c_dot(j, i));
    let a = match system.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => system
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularCovariance { condition })?,
    };
    let a_hat: Vec<f64> = a.iter().copied().collect();
    let f_hat = stats.dot_means[i]
        - a_hat
            .iter()
            .zip(&stats.means)
            .map(|(a, m)| a * m)
            .sum::<f64>();

    let mut row = RowMLE {
        target: i,
        f_hat,
        a_hat,
        g_hat: 0.0,
        residual_ss: 0.0,
    };
    row.residual_ss = row.residuals(panel, derived).map(|r| r * r).sum();
    row.g_hat = row.residual_ss * stats.dt / stats.n_used as f64;
    Ok(row)
}

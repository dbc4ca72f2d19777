//! Information-flow rates, self-influence, noise contribution and their
//! Fisher-information standard errors.
//!
//! For target `i` the fitted model is `dX_i/dt = f_i + Σ_j a_ij X_j + b_i dW`.
//! The flow from `j` into `i` is `T_{j→i} = a_ij C_ij / C_ii`, the
//! self-influence is `a_ii`, and the noise contribution is `g_ii / (2 C_ii)`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::{normalize_flows, NormalizedFlows};
use crate::panel::{derive_series, DerivedSeries, TimeSeriesPanel};
use crate::quantile::{two_sided_critical, two_sided_p};
use crate::stats::{compute_statistics, fit_row, RowMLE, StatisticsBundle};

/// Parameters shared by every stage of an analysis run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Forward-differencing stride.
    pub k: usize,
    /// Confidence level of the two-sided intervals, e.g. `0.90`.
    pub alpha: f64,
    /// Diagonal loading of `C`; `0.0` disables regularization.
    pub ridge: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            k: 1,
            alpha: 0.90,
            ridge: 0.0,
        }
    }
}

impl AnalysisConfig {
    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence level must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ridge must be non-negative, got {}",
                self.ridge
            )));
        }
        Ok(())
    }
}

/// One estimated flow `T_{source→target}` with its confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlowEstimate {
    pub source: usize,
    pub target: usize,
    /// Flow rate in nats per unit time.
    pub value: f64,
    pub stderr: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Two-sided Gaussian p-value of `value / stderr`.
    pub p_value: f64,
    pub significant: bool,
}

/// Per-node self-influence and noise terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeDiagnostics {
    pub node: usize,
    /// `dH*_i/dt`, equal to the fitted `a_ii`.
    pub self_influence: f64,
    pub self_stderr: f64,
    pub self_ci_low: f64,
    pub self_ci_high: f64,
    pub self_p_value: f64,
    /// `dH^noise_i/dt = g_ii / (2 C_ii)`.
    pub noise_rate: f64,
    pub is_self_loop: bool,
}

/// Observed Fisher information for the parameters
/// `θ = (f_i, a_i1, …, a_id, b_i)` of one target row.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherBlock {
    pub target: usize,
    /// Per-sample information `I` ((d+2)×(d+2)).
    pub matrix: DMatrix<f64>,
    /// `(N I)^-1`, the asymptotic covariance of `θ̂`.
    pub param_cov: DMatrix<f64>,
    pub n: usize,
}

impl FisherBlock {
    /// Standard error of `â_{target,j}`.
    pub fn stderr_a(&self, j: usize) -> f64 {
        self.param_cov[(1 + j, 1 + j)].max(0.0).sqrt()
    }

    pub fn stderr_f(&self) -> f64 {
        self.param_cov[(0, 0)].max(0.0).sqrt()
    }

    pub fn stderr_b(&self) -> f64 {
        let last = self.param_cov.nrows() - 1;
        self.param_cov[(last, last)].max(0.0).sqrt()
    }
}

/// `T_{source→target} = â_{target,source} · C_{target,source} / C_{target,target}`.
pub fn info_flow(row: &RowMLE, stats: &StatisticsBundle, source: usize) -> Result<f64> {
    let i = row.target;
    if source == i {
        return Err(Error::InvalidArgument(format!(
            "source equals target ({i}); use self_influence"
        )));
    }
    if source >= stats.d() {
        return Err(Error::InvalidArgument(format!(
            "source {source} out of range for d = {}",
            stats.d()
        )));
    }
    Ok(row.a_hat[source] * stats.c(i, source) / stats.c(i, i))
}

pub fn self_influence(row: &RowMLE) -> f64 {
    row.a_hat[row.target]
}

pub fn noise_rate(row: &RowMLE, stats: &StatisticsBundle) -> f64 {
    row.g_hat / (2.0 * stats.c(row.target, row.target))
}

/// Log-likelihood of the Gaussian transition density summed over the
/// aligned samples, at `theta = (f, a_1..a_d, b)`.
///
/// Each step contributes `-½ ln(2π b² Δt) - Δt R_n² / (2 b²)` with
/// `R_n = dX_{i,n}/dt - f - Σ_j a_j X_{j,n}`.
pub fn transition_log_likelihood(
    panel: &TimeSeriesPanel,
    derived: &DerivedSeries,
    target: usize,
    theta: &[f64],
) -> f64 {
    let d = panel.d();
    let dt = panel.dt();
    let (f, a, b) = (theta[0], &theta[1..=d], theta[d + 1]);
    let var = b * b;
    let norm = -0.5 * (std::f64::consts::TAU * var * dt).ln();
    let xdot = derived.row(target);
    (0..derived.len())
        .map(|n| {
            let fitted = f + (0..d).map(|j| a[j] * panel.row(j)[n]).sum::<f64>();
            let r = xdot[n] - fitted;
            norm - dt * r * r / (2.0 * var)
        })
        .sum()
}

/// Observed information of the Gaussian transition log-likelihood at the MLE,
/// assembled from its closed-form second derivatives.
pub fn fisher_block(
    panel: &TimeSeriesPanel,
    derived: &DerivedSeries,
    row: &RowMLE,
) -> Result<FisherBlock> {
    let d = panel.d();
    let n = derived.len();
    let dt = panel.dt();
    let target = row.target;
    let b2 = row.g_hat;
    if !(b2 > 0.0 && b2.is_finite()) {
        return Err(Error::SingularInformation { target });
    }
    let b = b2.sqrt();

    let residuals: Vec<f64> = row.residuals(panel, derived).collect();
    let x: Vec<&[f64]> = (0..d).map(|j| &panel.row(j)[..n]).collect();

    let sum_r: f64 = residuals.iter().sum();
    let sum_r2: f64 = residuals.iter().map(|r| r * r).sum();
    let sum_x: Vec<f64> = x.iter().map(|r| r.iter().sum()).collect();
    let sum_xr: Vec<f64> = x
        .iter()
        .map(|r| r.iter().zip(&residuals).map(|(a, b)| a * b).sum())
        .collect();

    // Summed information N·I.
    let p = d + 2;
    let mut info = DMatrix::zeros(p, p);
    let w = dt / b2;
    info[(0, 0)] = w * n as f64;
    for j in 0..d {
        info[(0, 1 + j)] = w * sum_x[j];
        for l in j..d {
            let s: f64 = x[j].iter().zip(x[l]).map(|(u, v)| u * v).sum();
            info[(1 + j, 1 + l)] = w * s;
        }
        info[(1 + j, d + 1)] = 2.0 * dt / (b2 * b) * sum_xr[j];
    }
    info[(0, d + 1)] = 2.0 * dt / (b2 * b) * sum_r;
    info[(d + 1, d + 1)] = 3.0 * dt / (b2 * b2) * sum_r2 - n as f64 / b2;
    for r in 0..p {
        for c in 0..r {
            info[(r, c)] = info[(c, r)];
        }
    }

    let param_cov = match info.clone().cholesky() {
        Some(ch) => ch.inverse(),
        None => info
            .clone()
            .try_inverse()
            .ok_or(Error::SingularInformation { target })?,
    };
    if param_cov.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularInformation { target });
    }
    Ok(FisherBlock {
        target,
        matrix: info / n as f64,
        param_cov,
        n,
    })
}

struct Interval {
    low: f64,
    high: f64,
    p: f64,
    significant: bool,
}

fn interval(value: f64, stderr: f64, z: f64) -> Interval {
    let low = value - z * stderr;
    let high = value + z * stderr;
    let p = if stderr > 0.0 {
        two_sided_p(value / stderr)
    } else if value == 0.0 {
        1.0
    } else {
        0.0
    };
    Interval {
        low,
        high,
        p,
        significant: low > 0.0 || high < 0.0,
    }
}

/// Flow estimate with `stderr = |C_ij / C_ii| σ̂(â_ij)` and a Gaussian
/// interval at confidence `alpha`.
pub fn flow_with_significance(
    row: &RowMLE,
    stats: &StatisticsBundle,
    fisher: &FisherBlock,
    source: usize,
    alpha: f64,
) -> Result<FlowEstimate> {
    let i = row.target;
    let value = info_flow(row, stats, source)?;
    let stderr = (stats.c(i, source) / stats.c(i, i)).abs() * fisher.stderr_a(source);
    Ok(estimate_from_parts(source, i, value, stderr, alpha))
}

/// Builds a [`FlowEstimate`] from a point value and its standard error.
pub fn estimate_from_parts(
    source: usize,
    target: usize,
    value: f64,
    stderr: f64,
    alpha: f64,
) -> FlowEstimate {
    let ci = interval(value, stderr, two_sided_critical(alpha));
    FlowEstimate {
        source,
        target,
        value,
        stderr,
        ci_low: ci.low,
        ci_high: ci.high,
        p_value: ci.p,
        significant: ci.significant,
    }
}

/// Self-influence, its interval, and the noise term for one node.
///
/// The self-loop verdict uses the same confidence level as the edges.
pub fn node_diagnostics(
    row: &RowMLE,
    stats: &StatisticsBundle,
    fisher: &FisherBlock,
    alpha: f64,
) -> NodeDiagnostics {
    let value = self_influence(row);
    let stderr = fisher.stderr_a(row.target);
    let ci = interval(value, stderr, two_sided_critical(alpha));
    NodeDiagnostics {
        node: row.target,
        self_influence: value,
        self_stderr: stderr,
        self_ci_low: ci.low,
        self_ci_high: ci.high,
        self_p_value: ci.p,
        noise_rate: noise_rate(row, stats),
        is_self_loop: ci.significant,
    }
}

/// All pairwise flows of a panel together with the per-node terms.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowMatrix {
    pub config: AnalysisConfig,
    pub stats: StatisticsBundle,
    pub rows: Vec<RowMLE>,
    pub fisher: Vec<FisherBlock>,
    /// `flows[target][source]`; `None` on the diagonal.
    pub flows: Vec<Vec<Option<FlowEstimate>>>,
    pub nodes: Vec<NodeDiagnostics>,
}

impl FlowMatrix {
    pub fn d(&self) -> usize {
        self.nodes.len()
    }

    /// `T_{source→target}`, `None` when `source == target`.
    pub fn flow(&self, source: usize, target: usize) -> Option<&FlowEstimate> {
        self.flows[target][source].as_ref()
    }

    /// Ordered `(source, target)` pairs with a significant flow.
    pub fn significant_pairs(&self) -> Vec<(usize, usize)> {
        let d = self.d();
        let mut pairs: Vec<(usize, usize)> = (0..d)
            .flat_map(|s| (0..d).map(move |t| (s, t)))
            .filter(|&(s, t)| self.flow(s, t).is_some_and(|f| f.significant))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    /// Normalized flows for every target node.
    pub fn normalized(&self) -> Result<Vec<NormalizedFlows>> {
        (0..self.d())
            .map(|i| {
                let inflows: Vec<FlowEstimate> = self.flows[i].iter().flatten().copied().collect();
                normalize_flows(&inflows, &self.nodes[i])
            })
            .collect()
    }
}

/// Runs the full estimation for every target row (rows in parallel).
pub fn estimate_flow_matrix(
    panel: &TimeSeriesPanel,
    config: &AnalysisConfig,
) -> Result<FlowMatrix> {
    config.validate()?;
    let derived = derive_series(panel, config.k)?;
    let stats = compute_statistics(panel, &derived)?;
    let d = panel.d();

    let per_row: Vec<(
        RowMLE,
        FisherBlock,
        Vec<Option<FlowEstimate>>,
        NodeDiagnostics,
    )> = (0..d)
        .into_par_iter()
        .map(|i| {
            let row = fit_row(&stats, panel, &derived, i, config.ridge)?;
            let fisher = fisher_block(panel, &derived, &row)?;
            let flows = (0..d)
                .map(|j| {
                    (j != i)
                        .then(|| flow_with_significance(&row, &stats, &fisher, j, config.alpha))
                        .transpose()
                })
                .collect::<Result<Vec<_>>>()?;
            let node = node_diagnostics(&row, &stats, &fisher, config.alpha);
            Ok((row, fisher, flows, node))
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(d);
    let mut fisher = Vec::with_capacity(d);
    let mut flows = Vec::with_capacity(d);
    let mut nodes = Vec::with_capacity(d);
    for (r, f, fl, n) in per_row {
        rows.push(r);
        fisher.push(f);
        flows.push(fl);
        nodes.push(n);
    }
    Ok(FlowMatrix {
        config: *config,
        stats,
        rows,
        fisher,
        flows,
        nodes,
    })
}

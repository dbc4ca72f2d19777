//! Information-flow causality analysis for multivariate time series.
//!
//! The pipeline fits a linear stochastic model to each series by maximum
//! likelihood, turns the fitted coefficients into rates of information flow
//! (nats per unit time) between every ordered pair of variables, tests each
//! rate with a Fisher-information confidence interval, normalizes the rates
//! per target node, and assembles the significant ones into a directed graph.
//!
//! ```no_run
//! use infoflow::{reconstruct, simgen::Preset, AnalysisConfig};
//!
//! let panel = Preset::Var6B1.analysis_panel(7, None)?;
//! let graph = reconstruct(&panel, &AnalysisConfig::default())?;
//! println!("{}", graph.to_dot());
//! # Ok::<(), infoflow::Error>(())
//! ```

pub mod error;
pub mod estimator;
pub mod graph;
pub mod normalize;
pub mod panel;
pub mod quantile;
pub mod rng;
pub mod simgen;
pub mod stats;

pub use error::{Error, Result};
pub use estimator::{
    estimate_flow_matrix, AnalysisConfig, FisherBlock, FlowEstimate, FlowMatrix, NodeDiagnostics,
};
pub use graph::{reconstruct, CausalGraph};
pub use normalize::NormalizedFlows;
pub use panel::{derive_series, DerivedSeries, TimeSeriesPanel};
pub use stats::{compute_statistics, fit_row, RowMLE, StatisticsBundle};

//! Per-target normalization of information flows.
//!
//! For target `i`, `Z = |dH*_i/dt| + Σ_{j≠i} |T_{j→i}| + dH^noise_i/dt` and
//! `τ_{j→i} = T_{j→i} / Z`, so every `|τ|` lies in `[0, 1]` and the shares of
//! `Z` add up to one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{FlowEstimate, NodeDiagnostics};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedFlows {
    pub target: usize,
    /// The normalizer `Z`.
    pub z: f64,
    /// `tau[j]` is `τ_{j→target}`; `None` at `j == target`.
    pub tau: Vec<Option<f64>>,
    pub self_share: f64,
    pub noise_share: f64,
}

/// Normalizes the inflows of one target from its raw terms.
///
/// `inflows` holds `(source, T_{source→target})` pairs.
pub fn normalize_terms(
    target: usize,
    d: usize,
    self_influence: f64,
    inflows: &[(usize, f64)],
    noise_rate: f64,
) -> Result<NormalizedFlows> {
    if target >= d {
        return Err(Error::InvalidArgument(format!(
            "target {target} out of range for d = {d}"
        )));
    }
    let z =
        self_influence.abs() + inflows.iter().map(|(_, t)| t.abs()).sum::<f64>() + noise_rate.abs();
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::DegenerateNormalizer { target });
    }
    let mut tau = vec![Some(0.0); d];
    tau[target] = None;
    for &(source, t) in inflows {
        if source == target || source >= d {
            return Err(Error::InvalidArgument(format!(
                "invalid source {source} for target {target}"
            )));
        }
        tau[source] = Some(t / z);
    }
    Ok(NormalizedFlows {
        target,
        z,
        tau,
        self_share: self_influence.abs() / z,
        noise_share: noise_rate.abs() / z,
    })
}

/// Normalizes one row of flow estimates (all sharing `diag.node` as target).
pub fn normalize_flows(flows: &[FlowEstimate], diag: &NodeDiagnostics) -> Result<NormalizedFlows> {
    let target = diag.node;
    if let Some(f) = flows.iter().find(|f| f.target != target) {
        return Err(Error::InvalidArgument(format!(
            "flow {}→{} does not end at target {target}",
            f.source, f.target
        )));
    }
    let inflows: Vec<(usize, f64)> = flows.iter().map(|f| (f.source, f.value)).collect();
    normalize_terms(
        target,
        flows.len() + 1,
        diag.self_influence,
        &inflows,
        diag.noise_rate,
    )
}

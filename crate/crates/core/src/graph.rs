//! Causal graph assembly and its DOT / JSON serializations.
//!
//! Every ordered pair `(j, i)` gets a flow estimate; the edge `j → i` is
//! added when that estimate is significant. Self-influence significance is
//! recorded on the node rather than as an edge.
//!
//! JSON layout (`schema_version` 1):
//!
//! ```text
//! { "meta": {"d", "N", "dt", "k", "alpha", "schema_version"},
//!   "nodes": [{"label", "self_influence", "self_stderr", "is_self_loop", "noise_rate"}],
//!   "flow_matrix": [[null | {"T", "stderr", "p", "tau", "significant"}]],   // [source][target]
//!   "edges": [{"source", "target", "T", "stderr", "p", "tau"}] }
//! ```

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{estimate_flow_matrix, AnalysisConfig, FlowMatrix};
use crate::panel::TimeSeriesPanel;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub d: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub dt: f64,
    pub k: usize,
    pub alpha: f64,
    pub schema_version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub label: String,
    pub self_influence: f64,
    pub self_stderr: f64,
    pub is_self_loop: bool,
    pub noise_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowCell {
    #[serde(rename = "T")]
    pub t: f64,
    pub stderr: f64,
    pub p: f64,
    pub tau: f64,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub source: usize,
    pub target: usize,
    #[serde(rename = "T")]
    pub t: f64,
    pub stderr: f64,
    pub p: f64,
    pub tau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CausalGraph {
    pub meta: GraphMeta,
    pub nodes: Vec<GraphNode>,
    /// `flow_matrix[source][target]`, `None` on the diagonal.
    pub flow_matrix: Vec<Vec<Option<FlowCell>>>,
    /// Significant flows, sorted by `(source, target)`.
    pub edges: Vec<GraphEdge>,
}

/// Estimates every pairwise flow of `panel` and keeps the significant ones.
pub fn reconstruct(panel: &TimeSeriesPanel, config: &AnalysisConfig) -> Result<CausalGraph> {
    let fm = estimate_flow_matrix(panel, config)?;
    CausalGraph::from_flow_matrix(panel, &fm)
}

impl CausalGraph {
    pub fn from_flow_matrix(panel: &TimeSeriesPanel, fm: &FlowMatrix) -> Result<Self> {
        let d = fm.d();
        if panel.d() != d {
            return Err(Error::InvalidArgument(
                "flow matrix does not match the panel".into(),
            ));
        }
        let normalized = fm.normalized()?;

        let nodes = fm
            .nodes
            .iter()
            .map(|n| GraphNode {
                label: panel.labels()[n.node].clone(),
                self_influence: n.self_influence,
                self_stderr: n.self_stderr,
                is_self_loop: n.is_self_loop,
                noise_rate: n.noise_rate,
            })
            .collect();

        let mut flow_matrix = vec![vec![None; d]; d];
        let mut edges = Vec::new();
        for (source, cells) in flow_matrix.iter_mut().enumerate() {
            for (target, cell) in cells.iter_mut().enumerate() {
                let Some(f) = fm.flow(source, target) else {
                    continue;
                };
                let tau = normalized[target].tau[source].unwrap_or(0.0);
                *cell = Some(FlowCell {
                    t: f.value,
                    stderr: f.stderr,
                    p: f.p_value,
                    tau,
                    significant: f.significant,
                });
                if f.significant {
                    edges.push(GraphEdge {
                        source,
                        target,
                        t: f.value,
                        stderr: f.stderr,
                        p: f.p_value,
                        tau,
                    });
                }
            }
        }

        Ok(Self {
            meta: GraphMeta {
                d,
                n: panel.len(),
                dt: panel.dt(),
                k: fm.config.k,
                alpha: fm.config.alpha,
                schema_version: SCHEMA_VERSION,
            },
            nodes,
            flow_matrix,
            edges,
        })
    }

    /// Edge list as `(source, target)` index pairs.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.source, e.target)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph values are always serializable")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let graph: Self =
            serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))?;
        if graph.meta.schema_version != SCHEMA_VERSION {
            return Err(Error::Serialization(format!(
                "unsupported schema_version {}",
                graph.meta.schema_version
            )));
        }
        Ok(graph)
    }

    /// Graphviz digraph of the significant edges.
    ///
    /// Edge labels carry `T` to three decimals and `τ` as a percentage.
    /// Self-loop nodes are drawn filled with a double border.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph causal {\n");
        for node in &self.nodes {
            let id = dot_id(&node.label);
            let label = escape(&format!("{}\\nself {:.3}", node.label, node.self_influence));
            if node.is_self_loop {
                let _ = writeln!(
                    out,
                    "  {id} [label=\"{label}\", style=filled, fillcolor=lightblue, peripheries=2];"
                );
            } else {
                let _ = writeln!(out, "  {id} [label=\"{label}\"];");
            }
        }
        for e in &self.edges {
            let _ = writeln!(
                out,
                "  {} -> {} [label=\"{:.3} ({:.1}%)\"];",
                dot_id(&self.nodes[e.source].label),
                dot_id(&self.nodes[e.target].label),
                e.t,
                100.0 * e.tau
            );
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('"', "\\\"")
}

fn dot_id(label: &str) -> String {
    const KEYWORDS: [&str; 6] = ["node", "edge", "graph", "digraph", "subgraph", "strict"];
    let plain = label
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !KEYWORDS.contains(&label.to_ascii_lowercase().as_str());
    if plain {
        label.to_string()
    } else {
        format!("\"{}\"", label.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    fn graph_with(edges: Vec<GraphEdge>, labels: &[&str]) -> CausalGraph {
        let d = labels.len();
        CausalGraph {
            meta: GraphMeta {
                d,
                n: 100,
                dt: 1.0,
                k: 1,
                alpha: 0.9,
                schema_version: SCHEMA_VERSION,
            },
            nodes: labels
                .iter()
                .map(|l| GraphNode {
                    label: l.to_string(),
                    self_influence: -1.0,
                    self_stderr: 0.01,
                    is_self_loop: false,
                    noise_rate: 0.5,
                })
                .collect(),
            flow_matrix: vec![vec![None; d]; d],
            edges,
        }
    }

    #[test]
    fn empty_graph_dot() {
        let dot = graph_with(vec![], &["A", "B"]).to_dot();
        assert!(dot.starts_with("digraph causal {\n"));
        assert!(dot.contains("  A [label="));
        assert!(dot.contains("  B [label="));
        assert!(!dot.contains("->"));
    }

    #[test]
    fn edge_label_format() {
        let e = GraphEdge {
            source: 0,
            target: 1,
            t: 0.19,
            stderr: 0.003,
            p: 0.0,
            tau: 0.132,
        };
        let dot = graph_with(vec![e], &["A", "B"]).to_dot();
        assert!(dot.contains("A -> B [label=\"0.190 (13.2%)\"];"), "{dot}");
    }

    #[test]
    fn awkward_labels_are_quoted() {
        assert_eq!(dot_id("x1"), "x1");
        assert_eq!(dot_id("1x"), "\"1x\"");
        assert_eq!(dot_id("node"), "\"node\"");
        assert_eq!(dot_id("sea \"ice\""), "\"sea \\\"ice\\\"\"");
    }

    #[test]
    fn json_schema_fields() {
        let g = graph_with(vec![], &["A", "B"]);
        let v: serde_json::Value = serde_json::from_str(&g.to_json()).unwrap();
        assert_eq!(v["meta"]["schema_version"], 1);
        assert_eq!(v["meta"]["N"], 100);
        assert_eq!(v["meta"]["alpha"], 0.9);
        assert_eq!(v["nodes"][1]["label"], "B");
        assert!(v["flow_matrix"][0][0].is_null());
        assert!(CausalGraph::from_json("{\"meta\": 1}").is_err());
    }

    #[test]
    fn reconstruct_round_trips_through_json() {
        let mut rng = SimRng::seed_from_u64(3);
        let n = 2000;
        let mut rows = vec![vec![0.0; n]; 3];
        let mut x = [0.0; 3];
        for t in 0..n {
            let e: Vec<f64> = (0..3).map(|_| rng.standard_normal()).collect();
            x = [
                0.5 * x[0] + e[0],
                0.3 * x[1] + 0.6 * x[0] + e[1],
                0.2 * x[2] + e[2],
            ];
            for i in 0..3 {
                rows[i][t] = x[i];
            }
        }
        let panel = TimeSeriesPanel::new(rows, 1.0, None).unwrap();
        let g = reconstruct(&panel, &AnalysisConfig::default()).unwrap();
        assert!(g.edge_pairs().contains(&(0, 1)));
        for e in &g.edges {
            assert_ne!(e.source, e.target);
            assert!(
                g.flow_matrix[e.source][e.target]
                    .as_ref()
                    .unwrap()
                    .significant
            );
        }
        let n_sig = g
            .flow_matrix
            .iter()
            .flatten()
            .flatten()
            .filter(|c| c.significant)
            .count();
        assert_eq!(n_sig, g.edges.len());
        let back = CausalGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), g.to_json());
    }
}

use std::fmt::Write;

use infoflow::CausalGraph;

const WIDTH: usize = 12;

fn cell(text: &str) -> String {
    format!("{text:>WIDTH$}")
}

fn header_row(graph: &CausalGraph, corner: &str) -> String {
    let mut line = format!("{corner:<WIDTH$}");
    for node in &graph.nodes {
        line.push_str(&cell(&node.label));
    }
    line
}

/// Human-readable summary: flow matrix with significance stars, node
/// diagnostics and the normalized matrix in percent.
pub fn summary(graph: &CausalGraph) -> String {
    let m = &graph.meta;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} variables, {} samples, dt = {}, k = {}, confidence level {}",
        m.d, m.n, m.dt, m.k, m.alpha
    );
    let _ = writeln!(
        out,
        "\nInformation flow T (row = source, column = target, nats per unit time)"
    );
    let _ = writeln!(out, "{}", header_row(graph, "source"));
    for (s, node) in graph.nodes.iter().enumerate() {
        let mut line = format!("{:<WIDTH$}", node.label);
        for c in &graph.flow_matrix[s] {
            let text = match c {
                Some(c) => format!("{:.4}{}", c.t, if c.significant { "*" } else { " " }),
                None => "-  ".into(),
            };
            line.push_str(&cell(&text));
        }
        let _ = writeln!(out, "{line}");
    }
    let _ = writeln!(
        out,
        "* significant at the {:.0}% level; {} significant edge(s)",
        100.0 * m.alpha,
        graph.edges.len()
    );

    let _ = writeln!(out, "\nNodes");
    let _ = writeln!(
        out,
        "{:<WIDTH$}{}{}{}{}",
        "label",
        cell("self"),
        cell("stderr"),
        cell("noise"),
        cell("self-loop")
    );
    for node in &graph.nodes {
        let _ = writeln!(
            out,
            "{:<WIDTH$}{}{}{}{}",
            node.label,
            cell(&format!("{:.4}", node.self_influence)),
            cell(&format!("{:.4}", node.self_stderr)),
            cell(&format!("{:.4}", node.noise_rate)),
            cell(if node.is_self_loop { "yes" } else { "no" })
        );
    }

    let _ = writeln!(
        out,
        "\nNormalized flow tau in percent (row = source, column = target)"
    );
    let _ = writeln!(out, "{}", header_row(graph, "source"));
    for (s, node) in graph.nodes.iter().enumerate() {
        let mut line = format!("{:<WIDTH$}", node.label);
        for c in &graph.flow_matrix[s] {
            let text = match c {
                Some(c) => format!(
                    "{:.2}{}",
                    100.0 * c.tau,
                    if c.significant { "*" } else { " " }
                ),
                None => "-  ".into(),
            };
            line.push_str(&cell(&text));
        }
        let _ = writeln!(out, "{line}");
    }
    out
}

/// The flow matrix as CSV: rows are sources, columns are targets, and the
/// diagonal is left empty.
pub fn csv_matrix(graph: &CausalGraph) -> String {
    let mut out = String::from("source");
    for node in &graph.nodes {
        out.push(',');
        out.push_str(&node.label);
    }
    out.push('\n');
    for (s, node) in graph.nodes.iter().enumerate() {
        out.push_str(&node.label);
        for c in &graph.flow_matrix[s] {
            out.push(',');
            if let Some(c) = c {
                out.push_str(&c.t.to_string());
            }
        }
        out.push('\n');
    }
    out
}

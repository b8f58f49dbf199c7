//! Graphviz export. Faces have no DOT counterpart and are left out.

use std::fmt::Write as _;

use crate::gog::GraphOfGraphs;
use crate::graph::SerreGraph;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn write_body(out: &mut String, g: &SerreGraph, prefix: &str, indent: &str) {
    for v in g.vertices() {
        let _ = writeln!(out, "{indent}{prefix}n{} [label={}];", v.0, quote(g.vertex_name(v)));
    }
    for e in g.edge_ids() {
        let edge = g.edge(e);
        let _ = writeln!(
            out,
            "{indent}{prefix}n{} -> {prefix}n{} [label={}];",
            edge.origin.0,
            edge.terminus.0,
            quote(&edge.name)
        );
    }
}

pub fn graph_to_dot(g: &SerreGraph) -> String {
    let mut out = String::from("digraph G {\n");
    write_body(&mut out, g, "", "  ");
    out.push_str("}\n");
    out
}

/// One cluster for the underlying graph and one per vertex and edge graph.
pub fn gog_to_dot(g: &GraphOfGraphs) -> String {
    let u = g.underlying();
    let mut out = String::from("digraph G {\n  compound=true;\n");
    let cluster = |out: &mut String, id: &str, label: &str, graph: &SerreGraph| {
        let _ = writeln!(out, "  subgraph cluster_{id} {{");
        let _ = writeln!(out, "    label={};", quote(label));
        write_body(out, graph, &format!("{id}_"), "    ");
        out.push_str("  }\n");
    };
    cluster(&mut out, "u", "underlying", u);
    for v in u.vertices() {
        cluster(&mut out, &format!("v{}", v.0), &format!("X({})", u.vertex_name(v)), g.vertex_graph(v));
    }
    for e in u.edge_ids() {
        cluster(&mut out, &format!("e{}", e.0), &format!("X({})", u.edge_name(e)), g.edge_graph(e));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_loop() {
        let g = SerreGraph::rose(&["a"]);
        assert_eq!(graph_to_dot(&g), "digraph G {\n  n0 [label=\"o\"];\n  n0 -> n0 [label=\"a\"];\n}\n");
    }

    #[test]
    fn theta_has_parallel_edges() {
        let d = graph_to_dot(&SerreGraph::theta(3));
        assert_eq!(d.matches("[label=").count(), 5);
        assert_eq!(d.matches("n0 -> n1").count(), 3);
    }

    #[test]
    fn labels_are_escaped() {
        let mut g = SerreGraph::new();
        g.add_vertex("say \"hi\"");
        assert!(graph_to_dot(&g).contains(r#"label="say \"hi\"""#));
    }
}

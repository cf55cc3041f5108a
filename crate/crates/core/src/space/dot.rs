use std::fmt::Write;

use super::StateSpace;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering: one node per state labelled with its valuation, one
/// edge per transition; the initial state is drawn with a double circle.
pub fn export_dot(ss: &StateSpace) -> String {
    let mut out = String::new();
    writeln!(out, "digraph \"{}\" {{", escape(ss.machine_name())).unwrap();
    out.push_str("  node [shape=circle];\n");
    for s in ss.state_ids() {
        let shape = if s == ss.initial() {
            ", shape=doublecircle"
        } else {
            ""
        };
        writeln!(out, "  {} [label=\"{}\"{shape}];", s.0, escape(&ss.render_state(s))).unwrap();
    }
    for t in ss.transitions() {
        writeln!(
            out,
            "  {} -> {} [label=\"{}\"];",
            t.src.0,
            t.dst.0,
            escape(&ss.label(t.label).to_string())
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

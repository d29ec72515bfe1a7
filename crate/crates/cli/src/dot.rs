use std::fmt::Write as _;

use pentaform::form::Pentaform;
use pentaform::partition::{is_subroot, piece_of_node};

const PALETTE: [&str; 8] = [
    "#dbe9f6", "#fde2c8", "#d9f0d3", "#f3d6e8", "#fff3b0", "#e0dcf0", "#d0eeee", "#f0e0d0",
];

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// A DOT digraph of the form. Subroots are drawn with a double border and
/// underlined labels; nodes are filled by piece.
pub fn to_dot(p: &Pentaform) -> String {
    let pieces = piece_of_node(p);
    let order: Vec<&String> = {
        let mut ts: Vec<&String> = pieces.values().collect();
        ts.sort();
        ts.dedup();
        ts
    };
    let colour = |x: &str| {
        let owner = if p.is_decision_node(x) {
            x
        } else {
            p.predecessor(x).expect("endnodes have predecessors")
        };
        let t = &pieces[owner];
        let n = order.iter().position(|s| *s == t).expect("piece");
        PALETTE[n % PALETTE.len()]
    };
    let mut out = String::from("digraph pentaform {\n  node [style=filled, shape=circle];\n");
    for x in p.nodes() {
        let shown = if x.is_empty() { "{}" } else { x.as_str() };
        let mut attrs = format!("fillcolor={}", quote(colour(x)));
        if is_subroot(p, x) {
            let _ = write!(attrs, ", peripheries=2, label=<<u>{}</u>>", html(shown));
        } else {
            let _ = write!(attrs, ", label={}", quote(shown));
        }
        if p.is_endnode(x) {
            attrs.push_str(", shape=box");
        }
        let _ = writeln!(out, "  {} [{attrs}];", quote(x));
    }
    for q in p.quintuples().canonical_order() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&q.decision_node),
            quote(&q.successor),
            quote(&format!("{} ({}@{})", q.action, q.player, q.situation))
        );
    }
    out.push_str("}\n");
    out
}

fn html(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

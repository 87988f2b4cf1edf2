//! Graphviz and JSON renderings of a state diagram.

use std::fmt::Write;

use ctslab_core::counter::{CounterOp, DiagramNode, StateDiagram};
use serde::{Deserialize, Serialize};

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// One statement per node and per edge. The initial and final nodes are
/// double circles; the initial one is also drawn bold.
pub fn diagram_to_dot(d: &StateDiagram) -> String {
    let mut s = String::from("digraph state_diagram {\n    rankdir=LR;\n");
    for &n in &d.nodes {
        let attrs = match n {
            DiagramNode::Final => "shape=doublecircle",
            _ if n == d.initial => "shape=doublecircle, style=bold",
            _ => "shape=circle",
        };
        let _ = writeln!(s, "    {} [{attrs}];", quote(&d.node_name(n)));
    }
    for e in &d.edges {
        let _ = writeln!(
            s,
            "    {} -> {} [label={}];",
            quote(&d.node_name(e.from)),
            quote(&d.node_name(e.to)),
            quote(&d.edge_label(e))
        );
    }
    s.push_str("}\n");
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub initial: String,
    pub nodes: Vec<String>,
    pub edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: String,
    pub to: String,
    pub label: String,
    /// `None` for λ.
    pub read: Option<String>,
    /// `+`, `-`, `0`, or `final`.
    pub op: String,
    pub rewrite: String,
}

pub fn diagram_json(d: &StateDiagram) -> DiagramJson {
    DiagramJson {
        initial: d.node_name(d.initial),
        nodes: d.nodes.iter().map(|&n| d.node_name(n)).collect(),
        edges: d
            .edges
            .iter()
            .map(|e| EdgeJson {
                from: d.node_name(e.from),
                to: d.node_name(e.to),
                label: d.edge_label(e),
                read: e.read.map(|t| d.terminals[t].to_string()),
                op: match e.op {
                    CounterOp::Plus => "+",
                    CounterOp::Minus => "-",
                    CounterOp::Zero => "0",
                    CounterOp::Finish => "final",
                }
                .to_string(),
                rewrite: d.rewrite_ids[e.rewrite].to_string(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ctslab_core::counter::build_state_diagram;
    use ctslab_core::format::parse_system;

    const EX52: &str = "system ex52\ntype rl-rb\ng1.terminals a b\ng1.nonterminals S1 X\n\
        g2.nonterminals S2 Z2\nrewrite r1 : S1 -> S1 ; S2 -> S2 Z2\n\
        rewrite r2 : S1 -> a S1 ; Z2 -> Z2 Z2\nrewrite r3 : S1 -> X ; Z2 -> ~\n\
        rewrite r4 : X -> b X ; Z2 -> ~\nrewrite r5 : X -> ~ ; S2 -> ~\n";

    fn ex52() -> StateDiagram {
        build_state_diagram(&parse_system(EX52).unwrap().compile().unwrap()).unwrap()
    }

    #[test]
    fn dot_statement_counts() {
        let dot = diagram_to_dot(&ex52());
        let edges = dot.lines().filter(|l| l.contains("->")).count();
        let nodes = dot.lines().filter(|l| l.contains("[shape=")).count();
        assert_eq!((nodes, edges), (5, 7));
        assert!(dot.contains("\"(S1,S2)\" [shape=doublecircle, style=bold];"));
        assert!(dot.contains("\"F\" [shape=doublecircle];"));
        assert!(dot.contains("\"(X,S2)\" -> \"F\" [label=\"~\"];"));
    }

    #[test]
    fn json_round_trips() {
        let j = diagram_json(&ex52());
        assert_eq!(j.edges.len(), 7);
        assert_eq!(j.edges.iter().filter(|e| e.op == "-").count(), 4);
        let text = serde_json::to_string(&j).unwrap();
        assert_eq!(serde_json::from_str::<DiagramJson>(&text).unwrap(), j);
    }

    #[test]
    fn quoting() {
        assert_eq!(quote(r#"a"b\"#), r#""a\"b\\""#);
    }
}

use std::fmt::Write;

use crate::formula::NodeId;
use crate::graph::{ReachabilityGraph, StateId};
use crate::tree::{CompressedTree, CriticalTree, SkipReason};

pub(crate) fn mark(i: usize, len: usize) -> &'static str {
    if i + 1 == len {
        "ERROR"
    } else {
        "OK"
    }
}

pub(crate) fn indent(depth: usize) -> String {
    "  ".repeat(depth)
}

pub(crate) fn skip_note(reason: SkipReason) -> String {
    format!("not constructed ({reason})")
}

/// Header text of a formula node in the indented views.
pub(crate) fn heading(t: &CriticalTree, id: NodeId) -> String {
    t.formula.op(id).heading()
}

/// Indented formula tree with each sequence listed under its operator, one
/// state per line.
pub fn render_states(t: &CriticalTree) -> String {
    let mut out = String::new();
    for node in t.formula.nodes() {
        let e = t.entry(node.id);
        let pad = indent(node.depth);
        let inner = indent(node.depth + 1);
        writeln!(out, "{pad}{}", heading(t, node.id)).unwrap();
        match e.skipped {
            Some(reason) => writeln!(out, "{inner}{}", skip_note(reason)).unwrap(),
            None => {
                for (i, s) in e.states.iter().enumerate() {
                    writeln!(out, "{inner}{s}  {}", mark(i, e.states.len())).unwrap();
                }
            }
        }
    }
    out
}

/// The compressed tree: state nodes listing the formula nodes merged into
/// them, and multi-state sequences as edges.
pub fn render_compressed(c: &CompressedTree, rg: &ReachabilityGraph) -> String {
    fn walk(c: &CompressedTree, rg: &ReachabilityGraph, at: usize, depth: usize, out: &mut String) {
        let n = &c.nodes[at];
        let members: Vec<String> = n
            .members
            .iter()
            .map(|m| format!("{m} {}", c.formula.op(*m).heading()))
            .collect();
        let pad = indent(depth);
        if members.is_empty() {
            writeln!(out, "{pad}{}", rg.describe(n.state)).unwrap();
        } else {
            writeln!(out, "{pad}{}  [{}]", rg.describe(n.state), members.join("; ")).unwrap();
        }
        for e in &n.edges {
            let path: Vec<String> = e.states.iter().map(StateId::to_string).collect();
            let kind = if e.jump { "jump" } else { "sequence" };
            writeln!(
                out,
                "{}{kind} {} {}: {}",
                indent(depth + 1),
                e.node,
                c.formula.op(e.node).heading(),
                path.join(" -> ")
            )
            .unwrap();
            walk(c, rg, e.to, depth + 2, out);
        }
    }
    let mut out = String::new();
    walk(c, rg, 0, 0, &mut out);
    out
}

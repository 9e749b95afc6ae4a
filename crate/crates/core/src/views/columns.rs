//! Column views: one column per automaton in declaration order.

use std::fmt::Write;

use super::states::{indent, mark, skip_note};
use crate::graph::{ReachabilityGraph, StateId};
use crate::tree::CriticalTree;

/// Cell shown for a component that did not change since the previous state
/// of the same sequence.
pub const UNCHANGED: &str = "·";

fn width(s: &str) -> usize {
    s.chars().count()
}

fn pad(s: &str, w: usize) -> String {
    format!("{s}{}", " ".repeat(w.saturating_sub(width(s))))
}

fn columnar(
    t: &CriticalTree,
    rg: &ReachabilityGraph,
    cell: impl Fn(StateId, Option<StateId>, usize) -> String,
) -> String {
    let net = rg.network();
    let names: Vec<&str> = net.automata.iter().map(|a| a.name.as_str()).collect();
    // rows per node, computed up front so column widths are global
    let mut rows: Vec<Vec<(String, Vec<String>, &str)>> = Vec::new();
    let mut widths: Vec<usize> = names.iter().map(|n| width(n)).collect();
    let mut label_w = width("state");
    for e in &t.entries {
        let mut r = Vec::new();
        for (i, &s) in e.states.iter().enumerate() {
            let prev = i.checked_sub(1).map(|j| e.states[j]);
            let cells: Vec<String> = (0..names.len()).map(|a| cell(s, prev, a)).collect();
            for (w, c) in widths.iter_mut().zip(&cells) {
                *w = (*w).max(width(c));
            }
            label_w = label_w.max(width(&s.to_string()));
            r.push((s.to_string(), cells, mark(i, e.states.len())));
        }
        rows.push(r);
    }
    let line = |label: &str, cells: &[String], tail: &str| {
        let mut l = pad(label, label_w);
        for (c, w) in cells.iter().zip(&widths) {
            l.push_str("  ");
            l.push_str(&pad(c, *w));
        }
        l.push_str("  ");
        l.push_str(tail);
        l.trim_end().to_string()
    };
    let mut out = String::new();
    let header: Vec<String> = names.iter().map(|n| n.to_string()).collect();
    writeln!(out, "{}", line("state", &header, "")).unwrap();
    for node in t.formula.nodes() {
        let e = t.entry(node.id);
        writeln!(out, "{}{}", indent(node.depth), node.op.heading()).unwrap();
        let inner = indent(node.depth + 1);
        match e.skipped {
            Some(reason) => writeln!(out, "{inner}{}", skip_note(reason)).unwrap(),
            None => {
                for (label, cells, m) in &rows[node.id.0 as usize - 1] {
                    writeln!(out, "{inner}{}", line(label, cells, m)).unwrap();
                }
            }
        }
    }
    out
}

/// Local states per automaton; a cell is filled only when the component
/// changed since the previous state of the sequence.
pub fn render_states_in_automata(t: &CriticalTree, rg: &ReachabilityGraph) -> String {
    let net = rg.network();
    columnar(t, rg, |s, prev, a| {
        let local = rg.components(s)[a];
        match prev {
            Some(p) if rg.components(p)[a] == local => UNCHANGED.to_string(),
            _ => net.automata[a].local_name(local).to_string(),
        }
    })
}

/// `signal(->listener,...)` for every signal the component emits.
pub fn signal_cell(rg: &ReachabilityGraph, s: StateId, a: usize) -> String {
    let net = rg.network();
    let comps = rg.components(s);
    let aut = &net.automata[a];
    aut.emits[comps[a] as usize]
        .iter()
        .map(|&x| {
            let listeners: Vec<&str> = net
                .listeners(comps, x)
                .into_iter()
                .map(|l| net.automata[l].name.as_str())
                .collect();
            format!("{}(->{})", net.signal_name(x), listeners.join(","))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render_signals(t: &CriticalTree, rg: &ReachabilityGraph) -> String {
    columnar(t, rg, |s, _, a| signal_cell(rg, s, a))
}

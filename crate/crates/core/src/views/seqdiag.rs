//! Text listing for sequence-diagram tools:
//!
//! ```text
//! 1. A --{ go }--> B
//! 2. A --{ go }--> B
//!  B --{ ack }--> A
//! 3.
//! ```
//!
//! States are numbered from 1. Every (emitter, signal, listener) triple of a
//! state gets its own line; lines after the first omit the number and are
//! indented by one space. A state passing no signal shows only its number.

use std::fmt::Write;

use thiserror::Error;

use super::xml::{self, state_payload, XmlDocument, XmlNode, XmlState};
use crate::graph::{ReachabilityGraph, StateId};
use crate::tree::CriticalTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeqDiagError {
    #[error("formula has no node {0}")]
    UnknownNode(u32),
    #[error("no temporal sequence at node {0}")]
    NoSequence(u32),
}

/// Signal lines of one state, in emitter then listener order.
pub fn triples(s: &XmlState) -> Vec<(String, String, String)> {
    let mut out = Vec::new();
    for sig in &s.signals {
        for l in &sig.listeners {
            out.push((sig.emitter.clone(), sig.name.clone(), l.clone()));
        }
    }
    out
}

pub fn listing(states: &[XmlState]) -> String {
    let mut out = String::new();
    for (i, s) in states.iter().enumerate() {
        let n = i + 1;
        let lines = triples(s);
        if lines.is_empty() {
            writeln!(out, "{n}.").unwrap();
        }
        for (j, (e, x, l)) in lines.iter().enumerate() {
            if j == 0 {
                writeln!(out, "{n}. {e} --{{ {x} }}--> {l}").unwrap();
            } else {
                writeln!(out, " {e} --{{ {x} }}--> {l}").unwrap();
            }
        }
    }
    out
}

/// Listing for an arbitrary list of states.
pub fn render_states_listing(rg: &ReachabilityGraph, states: &[StateId]) -> String {
    let payload: Vec<XmlState> = states
        .iter()
        .enumerate()
        .map(|(i, &s)| state_payload(rg, s, i + 1 == states.len()))
        .collect();
    listing(&payload)
}

pub fn render_node(node: &XmlNode) -> Result<String, SeqDiagError> {
    if node.states.len() < 2 {
        return Err(SeqDiagError::NoSequence(node.id));
    }
    Ok(listing(&node.states))
}

/// Listing for the sequence of formula node `node_id` in a parsed document.
pub fn render_from_document(doc: &XmlDocument, node_id: u32) -> Result<String, SeqDiagError> {
    render_node(doc.find(node_id).ok_or(SeqDiagError::UnknownNode(node_id))?)
}

pub fn render_seqdiagram(t: &CriticalTree, rg: &ReachabilityGraph, node_id: u32) -> Result<String, SeqDiagError> {
    if node_id == 0 || node_id as usize > t.formula.len() {
        return Err(SeqDiagError::UnknownNode(node_id));
    }
    render_from_document(&xml::document(t, rg), node_id)
}

/// Whether every line of `text` matches the listing grammar.
pub fn conforms(text: &str) -> bool {
    fn name(s: &str) -> bool {
        s.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    }
    fn triple(s: &str) -> bool {
        let Some((emitter, rest)) = s.split_once(" --{ ") else { return false };
        let Some((signal, listener)) = rest.split_once(" }--> ") else { return false };
        name(emitter) && name(signal) && name(listener)
    }
    let mut expected = 1usize;
    let mut open = false;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix(' ') {
            if !open || !triple(rest) {
                return false;
            }
            continue;
        }
        let Some((num, rest)) = line.split_once('.') else { return false };
        if num.parse::<usize>() != Ok(expected) || num.starts_with('0') {
            return false;
        }
        if !rest.is_empty() && !rest.strip_prefix(' ').is_some_and(triple) {
            return false;
        }
        open = !rest.is_empty();
        expected += 1;
    }
    text.is_empty() || text.ends_with('\n')
}

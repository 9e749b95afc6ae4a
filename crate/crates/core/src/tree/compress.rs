//! Compressed form of a critical tree.
//!
//! Tree nodes become states and multi-state sequences become edges between
//! them. A single-state sequence sitting at the state where its parent's
//! sequence ended is folded into that node, so a run of one-state
//! explanations at the same place shows up once.

use super::{CriticalTree, SequenceEntry};
use crate::formula::{Formula, NodeId};
use crate::graph::StateId;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedNode {
    pub state: StateId,
    /// Formula nodes whose single-state sequence is this node.
    pub members: Vec<NodeId>,
    pub edges: Vec<CompressedEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedEdge {
    /// Formula node owning the sequence.
    pub node: NodeId,
    pub states: Vec<StateId>,
    pub jump: bool,
    /// Index of the node the edge leads to.
    pub to: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedTree {
    pub formula: Formula,
    /// `nodes[0]` is the start state.
    pub nodes: Vec<CompressedNode>,
    /// Per formula node: the entry with its states removed.
    meta: Vec<SequenceEntry>,
}

impl CompressedTree {
    pub fn meta(&self, id: NodeId) -> &SequenceEntry {
        &self.meta[id.0 as usize - 1]
    }
}

fn place(t: &CriticalTree, nodes: &mut Vec<CompressedNode>, id: NodeId, at: usize) {
    let e = t.entry(id);
    if !e.is_constructed() {
        return;
    }
    let here = if e.states.len() == 1 && e.states[0] == nodes[at].state {
        nodes[at].members.push(id);
        at
    } else {
        let to = nodes.len();
        nodes.push(CompressedNode { state: *e.states.last().expect("nonempty"), members: Vec::new(), edges: Vec::new() });
        nodes[at].edges.push(CompressedEdge { node: id, states: e.states.clone(), jump: e.jump, to });
        to
    };
    for &k in t.formula.children(id) {
        place(t, nodes, k, here);
    }
}

pub fn compress(t: &CriticalTree) -> CompressedTree {
    let mut nodes = vec![CompressedNode { state: t.start, members: Vec::new(), edges: Vec::new() }];
    place(t, &mut nodes, t.formula.root(), 0);
    let meta = t
        .entries
        .iter()
        .map(|e| SequenceEntry { states: Vec::new(), ..e.clone() })
        .collect();
    CompressedTree { formula: t.formula.clone(), nodes, meta }
}

pub fn decompress(c: &CompressedTree) -> CriticalTree {
    let mut entries = c.meta.clone();
    for n in &c.nodes {
        for m in &n.members {
            entries[m.0 as usize - 1].states = vec![n.state];
        }
        for e in &n.edges {
            entries[e.node.0 as usize - 1].states = e.states.clone();
        }
    }
    CriticalTree { formula: c.formula.clone(), start: c.nodes[0].state, entries }
}

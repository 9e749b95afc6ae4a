//! Critical trees: one state sequence per formula node explaining a false
//! verdict.

mod build;
mod compress;
mod rules;

use std::fmt;

use thiserror::Error;

use crate::engine::EvalError;
use crate::formula::{Formula, NodeId};
use crate::graph::StateId;

pub use build::build_tree;
pub use compress::{compress, decompress, CompressedEdge, CompressedNode, CompressedTree};
pub use rules::{dispatch_rule, rule, ChildDirective, Endpoint, Rule, RULES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SkipReason {
    /// The argument already has the desired value at the finishing state.
    ValueAsDesired,
    /// Inside a subtree that was not constructed.
    NotReached,
}

impl SkipReason {
    /// Attribute token used by the XML view.
    pub fn token(self) -> &'static str {
        match self {
            SkipReason::ValueAsDesired => "value-as-desired",
            SkipReason::NotReached => "not-reached",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s {
            "value-as-desired" => Some(SkipReason::ValueAsDesired),
            "not-reached" => Some(SkipReason::NotReached),
            _ => None,
        }
    }
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkipReason::ValueAsDesired => "value as desired",
            SkipReason::NotReached => "not reached",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceEntry {
    pub node: NodeId,
    pub desired: Option<bool>,
    pub actual: Option<bool>,
    /// Table row; `None` for atoms and skipped nodes.
    pub rule: Option<u8>,
    /// Empty when skipped.
    pub states: Vec<StateId>,
    pub skipped: Option<SkipReason>,
    /// The sequence starts at a designated state rather than where the
    /// parent's sequence ends (quantifiers and at-state).
    pub jump: bool,
}

impl SequenceEntry {
    pub fn is_constructed(&self) -> bool {
        self.skipped.is_none()
    }

    pub fn first(&self) -> Option<StateId> {
        self.states.first().copied()
    }

    pub fn last(&self) -> Option<StateId> {
        self.states.last().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalTree {
    pub formula: Formula,
    pub start: StateId,
    /// Indexed by node id minus one.
    pub entries: Vec<SequenceEntry>,
}

impl CriticalTree {
    pub fn entry(&self, id: NodeId) -> &SequenceEntry {
        &self.entries[id.0 as usize - 1]
    }

    pub fn constructed(&self) -> impl Iterator<Item = &SequenceEntry> {
        self.entries.iter().filter(|e| e.is_constructed())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("the formula holds at {0}; only a false verdict has a critical tree")]
    VerdictTrue(StateId),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("node {node}: rule {row} found no finishing state")]
    NoEndpoint { node: NodeId, row: u8 },
    #[error("node {node}: expected value {expected} at {state}, evaluated otherwise")]
    Inconsistent { node: NodeId, state: StateId, expected: bool },
}

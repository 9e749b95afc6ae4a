//! Text renderings of a critical tree.
//!
//! All renderers are pure: the same tree over the same graph always yields
//! the same bytes.

mod columns;
pub mod seqdiag;
mod states;
pub mod xml;

use std::fmt;
use std::str::FromStr;

use crate::graph::ReachabilityGraph;
use crate::tree::CriticalTree;

pub use columns::{render_signals, render_states_in_automata, signal_cell, UNCHANGED};
pub use seqdiag::{render_seqdiagram, SeqDiagError};
pub use states::{render_compressed, render_states};
pub use xml::{render_xml, XmlDocument, XmlError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViewKind {
    States,
    StatesInAutomata,
    Signals,
    Xml,
    SeqDiagram,
}

impl ViewKind {
    /// The four tree views selectable with `check --view`.
    pub const TREE_VIEWS: [ViewKind; 4] = [ViewKind::States, ViewKind::StatesInAutomata, ViewKind::Signals, ViewKind::Xml];

    pub fn name(self) -> &'static str {
        match self {
            ViewKind::States => "states",
            ViewKind::StatesInAutomata => "automata",
            ViewKind::Signals => "signals",
            ViewKind::Xml => "xml",
            ViewKind::SeqDiagram => "seqdiag",
        }
    }
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ViewKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "states" => Ok(ViewKind::States),
            "automata" | "states-in-automata" => Ok(ViewKind::StatesInAutomata),
            "signals" => Ok(ViewKind::Signals),
            "xml" => Ok(ViewKind::Xml),
            "seqdiag" => Ok(ViewKind::SeqDiagram),
            other => Err(format!("unknown view `{other}` (expected states, automata, signals or xml)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedView {
    pub kind: ViewKind,
    pub text: String,
}

/// Renders one of the four tree views.
///
/// # Panics
/// On [`ViewKind::SeqDiagram`], which needs a node id; use
/// [`render_seqdiagram`].
pub fn render(kind: ViewKind, t: &CriticalTree, rg: &ReachabilityGraph) -> RenderedView {
    let text = match kind {
        ViewKind::States => render_states(t),
        ViewKind::StatesInAutomata => render_states_in_automata(t, rg),
        ViewKind::Signals => render_signals(t, rg),
        ViewKind::Xml => render_xml(t, rg),
        ViewKind::SeqDiagram => panic!("the sequence-diagram listing is rendered per node"),
    };
    RenderedView { kind, text }
}
